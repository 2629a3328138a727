import numpy as np
import pytest

from qss_rocof.pipeline import RELAY_FRONT_END, AnalysisConfig, analyze
from qss_rocof.relay import RelayConfig, compare_schemes


@pytest.mark.parametrize("kw", [dict(window_s=0.01), dict(epsilon=0.0), dict(inst_source="x"),
                                dict(washout_tau_s=float("nan"))])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        AnalysisConfig(**kw).validate()


def test_columns_aligned(transient):
    cols = analyze(transient).columns()
    n = len(transient)
    assert all(np.asarray(v).shape == (n,) for v in cols.values())


def test_pll_source_steady(balanced):
    res = analyze(balanced, AnalysisConfig(inst_source="pll"))
    conv = res.rocof_conventional.values
    assert np.nanmax(np.abs(conv)) < 0.01


def test_transient_relay_outcome(transient):
    rep = compare_schemes(transient, RelayConfig.conventional(), RelayConfig.qss(), RELAY_FRONT_END)
    assert not rep.qss.armed and rep.qss.events == []


def test_steady_no_trips(balanced):
    rep = compare_schemes(balanced, RelayConfig.conventional(), RelayConfig.qss())
    assert rep.conventional.events == [] and rep.qss.events == []
    assert rep.detection_delta_s() is None
