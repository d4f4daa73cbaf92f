"""Initial-data families and file-based profile sampling.

Shipped families (all positive, endpoint-zero where required):

  predator: cosine  A cos(pi x / (2 h0))
            quartic A (1 - (x/h0)^2)^2
  prey:     constant V

A profile may instead come from a two-column CSV (x, value); it is sampled
onto the solver grids with a shape-preserving cubic so positivity survives.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import ValidationError
from .grids import LineGrid, StraightGrid
from .model import ModelParams

U0_FAMILIES = ("cosine", "quartic")
V0_FAMILIES = ("constant",)


def _load_samples(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"profile file not found: {path}")
    try:
        data = np.loadtxt(path, delimiter=",", ndmin=2)
    except ValueError as exc:
        raise ValidationError(f"cannot parse profile file {path}: {exc}") from exc
    if data.shape[1] != 2 or data.shape[0] < 5:
        raise ValidationError(f"profile file {path} must have two columns and >= 5 rows")
    x, vals = data[:, 0], data[:, 1]
    if not np.all(np.diff(x) > 0):
        raise ValidationError(f"profile abscissae in {path} must be strictly ascending")
    return x, vals


def validate_u0_spec(spec: dict, p: ModelParams) -> None:
    """Eager checks usable at config-load time (before grids exist)."""
    if "file" in spec:
        x, vals = _load_samples(spec["file"])
        if x[0] > -p.h0 + 1e-12 or x[-1] < p.h0 - 1e-12:
            raise ValidationError(f"u0 file must cover [-h0, h0] = [{-p.h0}, {p.h0}]")
        interp = PchipInterpolator(x, vals)
        ends = np.abs(interp(np.array([-p.h0, p.h0])))
        if float(ends.max()) > 1e-12:
            raise ValidationError(
                f"u0 must vanish at +-h0 within 1e-12; file gives {ends.max():.3e}"
            )
        if np.any(vals < 0):
            raise ValidationError("u0 file values must be nonnegative")
        return
    family = spec.get("family")
    if family not in U0_FAMILIES:
        raise ValidationError(f"unknown u0 family {family!r}; choose from {U0_FAMILIES} or give a file")
    amplitude = spec.get("amplitude", 1.0)
    if not amplitude > 0:
        raise ValidationError(f"u0 amplitude must be positive, got {amplitude}")


def validate_v0_spec(spec: dict) -> None:
    if "file" in spec:
        _, vals = _load_samples(spec["file"])
        if np.any(vals <= 0):
            raise ValidationError("v0 file values must be strictly positive")
        return
    family = spec.get("family")
    if family not in V0_FAMILIES:
        raise ValidationError(f"unknown v0 family {family!r}; choose from {V0_FAMILIES} or give a file")
    value = spec.get("value", 1.0)
    if not value > 0:
        raise ValidationError(f"v0 value must be positive, got {value}")


def sample_u0(spec: dict, p: ModelParams, sgrid: StraightGrid) -> np.ndarray:
    """Sample the initial predator at the straightened nodes (x = h0 * y)."""
    validate_u0_spec(spec, p)
    y = sgrid.y_nodes
    if "file" in spec:
        x, vals = _load_samples(spec["file"])
        interp = PchipInterpolator(x, vals)
        u0 = np.asarray(interp(p.h0 * y), dtype=float)
        u0[0] = u0[-1] = 0.0
        return np.maximum(u0, 0.0)
    amplitude = float(spec.get("amplitude", 1.0))
    if spec["family"] == "cosine":
        u0 = amplitude * np.cos(0.5 * np.pi * y)
    else:
        u0 = amplitude * (1.0 - y**2) ** 2
    u0[0] = u0[-1] = 0.0
    return u0


def sample_v0(spec: dict, lgrid: LineGrid) -> np.ndarray:
    """Sample the initial prey at the line nodes.

    File-based prey data must be near-constant on |x| >= L/2: the truncated
    line carries a zero-flux condition at +-L, which is only a faithful
    stand-in for the whole line when the far field has already flattened.
    """
    validate_v0_spec(spec)
    if "file" in spec:
        x, vals = _load_samples(spec["file"])
        if x[0] > -lgrid.L or x[-1] < lgrid.L:
            raise ValidationError(
                f"v0 file must cover the truncated line [-{lgrid.L}, {lgrid.L}]"
            )
        interp = PchipInterpolator(x, vals)
        sampled = np.asarray(interp(lgrid.x_nodes), dtype=float)
        far = sampled[np.abs(lgrid.x_nodes) >= 0.5 * lgrid.L]
        spread = float(far.max() - far.min())
        if spread > 0.1 * float(far.max()):
            raise ValidationError(
                f"v0 varies by {spread:.3g} on |x| >= L/2; the far field must be "
                "near-constant for the truncation to be defensible (enlarge L or flatten v0)"
            )
        return sampled
    return np.full(lgrid.n_x, float(spec.get("value", 1.0)))
