"""QSS-frequency RoCoF estimation with circulation gating, plus a
conventional PLL baseline and a two-step RoCoF-based UFLS relay."""
