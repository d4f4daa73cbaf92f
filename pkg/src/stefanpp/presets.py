"""Named run presets exercising each branch of the dichotomy.

These are the configurations the verification suite runs: a guaranteed
spreading case (supercritical habitat, weak hunting), a guaranteed vanishing
case (mu at half the barrier threshold), spreading forced by a large
expansion coefficient, and the strong-hunting regime.  They are also handy
CLI starting points: ``preset_config(name)`` returns a full RunConfig that
can be serialized with ``save_config``.
"""

from __future__ import annotations

from dataclasses import replace

from . import analysis
from .config import OutputsConfig, RunConfig
from .model import ModelParams, mu_upper_bound
from .profiles import sample_u0, sample_v0
from .solver import NumericsConfig, StopRules

PRESETS = ("spreading-weak", "vanishing", "spreading-by-mu", "strong-hunting")


def _barrier_mu0(p: ModelParams, u0_spec: dict, v0_spec: dict, numerics: NumericsConfig) -> float:
    cfg = numerics.resolve(p)
    sgrid, lgrid = cfg.grids()
    u0 = sample_u0(u0_spec, p, sgrid)
    v0 = sample_v0(v0_spec, lgrid)
    return analysis.build_supersolution(p, p.h0 * sgrid.y_nodes, u0, v0).mu0


def _upper_mu(p: ModelParams, u0_spec: dict, numerics: NumericsConfig) -> float:
    cfg = numerics.resolve(p)
    sgrid, _ = cfg.grids()
    u0 = sample_u0(u0_spec, p, sgrid)
    return mu_upper_bound(p, p.h0 * sgrid.y_nodes, u0)


def preset_config(name: str) -> RunConfig:
    """Build one of the named presets; see PRESETS for the choices."""
    u0 = {"family": "cosine", "amplitude": 1.0}
    if name == "spreading-weak":
        # Supercritical habitat (2 h0 > Lambda = pi/2); runs the full horizon
        # so the interior settles onto the coexistence limits.
        model = ModelParams(a=1.0, b=3.0, c=0.5, D=1.0, mu=0.1, h0=0.8)
        numerics = NumericsConfig(dt=2.5e-3, n_y=128, L=100.0, t_max=200.0, snapshot_dt=50.0)
        stop = StopRules(enabled=False)
        v0 = {"family": "constant", "value": 3.0}
    elif name == "vanishing":
        # Subcritical habitat with mu at half the barrier threshold.
        base = ModelParams(a=1.0, b=3.0, c=0.5, D=1.0, mu=1.0, h0=0.3)
        numerics = NumericsConfig(dt=1e-3, n_y=128, t_max=20.0, snapshot_dt=5.0)
        v0 = {"family": "constant", "value": 3.0}
        mu0 = _barrier_mu0(base, u0, v0, numerics)
        model = replace(base, mu=0.5 * mu0)
        stop = StopRules(enabled=False)
    elif name == "spreading-by-mu":
        # Subcritical habitat driven over the threshold by a large mu.
        base = ModelParams(a=1.0, b=3.0, c=0.5, D=1.0, mu=1.0, h0=0.3)
        numerics = NumericsConfig(dt=1e-3, n_y=128, t_max=40.0, snapshot_dt=10.0)
        v0 = {"family": "constant", "value": 3.0}
        model = replace(base, mu=1.5 * _upper_mu(base, u0, numerics))
        stop = StopRules()
    elif name == "strong-hunting":
        model = ModelParams(a=1.0, b=1.0, c=2.0, D=1.0, mu=0.5, h0=1.2)
        numerics = NumericsConfig(dt=2e-3, n_y=128, L=40.0, t_max=60.0, snapshot_dt=15.0)
        stop = StopRules(enabled=False)
        v0 = {"family": "constant", "value": 1.0}
    else:
        raise ValueError(f"unknown preset {name!r}; choose from {PRESETS}")
    return RunConfig(
        mode="simulate",
        model=model,
        u0=u0,
        v0=v0,
        numerics=replace(numerics, snapshot_dt=numerics.snapshot_dt),
        outputs=OutputsConfig(snapshot_dt=numerics.snapshot_dt, limit_tol=0.05),
        stop=stop,
    )
