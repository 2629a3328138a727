import pytest

from qss_rocof.signals import SignalSpec, generate

FS = 5000.0


@pytest.fixture(scope="session")
def fs():
    return FS


def make(kind: str, fs: float = FS, **kw):
    return generate(SignalSpec(kind=kind, **kw), fs)


@pytest.fixture(scope="session")
def balanced():
    return make("balanced")


@pytest.fixture(scope="session")
def chirp():
    return make("chirp", ramp_hz_per_s=-1.0)


@pytest.fixture(scope="session")
def transient():
    return make("transient_event")


@pytest.fixture(scope="session")
def outage():
    return make("outage", ramp_hz_per_s=-1.5, duration_s=3.0)
