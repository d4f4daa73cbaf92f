"""Semi-implicit time integration of the coupled free-boundary system.

Each macro step of size dt advances the state in a fixed order:

  1. Fronts first.  One-sided boundary gradients of the current predator
     profile feed the Stefan conditions g' = -mu u_x(g), h' = -mu u_x(h);
     a discretization-induced wrong-sign velocity (front retreat) is clamped
     to zero motion and counted, never applied.
  2. Predator on the straightened grid: the stiff diffusion term
     phi * w_yy is implicit (tridiagonal solve); the advection psi * w_y and
     the reaction w (1 - w + a z) are explicit, with phi, psi evaluated from
     the updated fronts and z interpolated onto the moving nodes.
  3. Prey on the truncated line: D z_xx implicit with zero-flux ends,
     reaction z (b - z - c u) explicit with the freshly extended predator.

After every substep the a-priori boxes (positivity and the sup bounds
max(sup u0, 1 + a Mv), Mv = max(sup v0, b)) are checked.  A breach is treated
as an a-posteriori CFL violation: the macro step is retried with the substep
halved, up to 8 halvings, before the run aborts.  The macro time grid is
never altered, so output rows land on identical times for every run with the
same configuration.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import get_lapack_funcs

from .errors import FrontBreachError, GeometryError, SolverError, ValidationError
from .grids import (
    UNDERSHOOT_TOL,
    FrontState,
    LineGrid,
    StraightGrid,
    interp_pred_to_line,
    interp_prey_to_straight,
    transform_coefficients,
)
from .model import ModelParams, lambda_threshold

logger = logging.getLogger(__name__)

#: Maximum number of substep halvings before a macro step is declared failed.
MAX_HALVINGS = 8

#: Default target spacing of the prey grid when n_x is left unresolved.
DEFAULT_DX = 0.025


@dataclass(frozen=True)
class NumericsConfig:
    """Grid, step and horizon controls for one simulation.

    ``L`` and ``n_x`` may be left as None and are then resolved from the
    model parameters: L = max(10 h0, 4 Lambda, 20) and an odd node count
    giving a spacing of about ``DEFAULT_DX``.
    """

    dt: float = 1e-3
    n_y: int = 128
    n_x: int | None = None
    L: float | None = None
    t_max: float = 50.0
    front_stencil_order: int = 3
    tol_bounds: float = 1e-8
    probe_halfwidth: float = 1.0
    snapshot_dt: float | None = None

    def __post_init__(self) -> None:
        if self.dt <= 0:
            raise ValidationError(f"dt must be positive, got {self.dt}")
        if self.t_max < self.dt:
            raise ValidationError(f"t_max = {self.t_max} is shorter than one step dt = {self.dt}")
        if self.front_stencil_order not in (2, 3):
            raise ValidationError(f"front_stencil_order must be 2 or 3, got {self.front_stencil_order}")
        if self.tol_bounds <= 0:
            raise ValidationError("tol_bounds must be positive")
        if self.probe_halfwidth <= 0:
            raise ValidationError("probe_halfwidth must be positive")
        if self.snapshot_dt is not None and self.snapshot_dt <= 0:
            raise ValidationError("snapshot_dt must be positive when given")
        StraightGrid(self.n_y)  # validates the refinement floor

    def resolve(self, p: ModelParams) -> "NumericsConfig":
        """Fill L and n_x defaults for the given model parameters."""
        L = self.L
        if L is None:
            L = max(10.0 * p.h0, 4.0 * lambda_threshold(p), 20.0)
        n_x = self.n_x
        if n_x is None:
            n_x = 2 * int(math.ceil(L / DEFAULT_DX)) + 1
        if n_x > 400_001:
            raise ValidationError(f"resolved n_x = {n_x} is unreasonably large; coarsen or shrink L")
        return replace(self, L=float(L), n_x=int(n_x))

    def grids(self) -> tuple[StraightGrid, LineGrid]:
        if self.L is None or self.n_x is None:
            raise ValidationError("numerics config is unresolved; call resolve(params) first")
        return StraightGrid(self.n_y), LineGrid(self.L, self.n_x)

    def cfl_guard(self, p: ModelParams) -> float:
        """Soft explicit-step guard dy^2 (2 h0)^2 / 8 at the initial span."""
        dy = 2.0 / (self.n_y + 1)
        return dy**2 * (2.0 * p.h0) ** 2 / 8.0


@dataclass(frozen=True)
class StopRules:
    """Early-exit policy for :func:`simulate`.

    Classification conditions are only consulted after ``t_min`` and every
    ``check_every`` macro steps; a spreading decision additionally requires
    the probe-window sup-norm to stay above the floor for the trailing
    ``trail_window`` time units.
    """

    enabled: bool = True
    t_min: float = 0.0
    trail_window: float = 2.0
    check_every: int = 64


@dataclass(frozen=True)
class ClassifyTols:
    """Scale-aware classification tolerances.

    Defaults tie every tolerance to the problem's own magnitudes: the
    predator scale is the weak-regime interior limit (1 + a b)/(1 + a c)
    (defined for all positive parameters), the span slack is two prey cells,
    and the front-speed floor shrinks with the horizon.
    """

    lam: float
    span_tol: float
    u_tol: float
    v_tol: float
    u_floor: float


def default_tols(p: ModelParams, dx: float, t_max: float) -> ClassifyTols:
    u_ref = (1.0 + p.a * p.b) / (1.0 + p.a * p.c)
    return ClassifyTols(
        lam=lambda_threshold(p),
        span_tol=2.0 * dx,
        u_tol=1e-4 * u_ref,
        v_tol=1e-5 * p.h0 / t_max,
        u_floor=0.5 * u_ref,
    )


def vanishing_now(
    two_h0: float,
    span: float,
    sup_u: float,
    speed: float,
    tols: ClassifyTols,
) -> bool:
    """Instantaneous vanishing test: bounded span, decayed field, frozen fronts.

    Disabled outright when the initial span already meets the critical one,
    where spreading is guaranteed regardless of the data.
    """
    if two_h0 >= tols.lam:
        return False
    return span <= tols.lam + tols.span_tol and sup_u < tols.u_tol and speed < tols.v_tol


def spreading_index(
    t: np.ndarray,
    span: np.ndarray,
    probe_u: np.ndarray,
    tols: ClassifyTols,
    trail_window: float,
) -> int | None:
    """Earliest index at which the spreading criteria hold.

    Requires span > Lambda + span_tol together with the probe-window sup-norm
    staying at or above the floor throughout the trailing window (which must
    be fully contained in the recorded history).
    """
    n = t.size
    crossed = span > tols.lam + tols.span_tol
    if not np.any(crossed):
        return None
    bad_idx = np.where(probe_u < tols.u_floor, np.arange(n), -1)
    last_bad = np.maximum.accumulate(bad_idx)
    window_start = np.searchsorted(t, t - trail_window, side="left")
    candidate = crossed & (t >= trail_window * (1.0 - 1e-12)) & (last_bad < window_start)
    if not np.any(candidate):
        return None
    return int(np.argmax(candidate))


def _spreading_now(
    t: np.ndarray,
    probe_u: np.ndarray,
    k: int,
    span_now: float,
    tols: ClassifyTols,
    trail_window: float,
) -> bool:
    """Incremental form of :func:`spreading_index` at the latest step only."""
    t_k = t[k]
    if span_now <= tols.lam + tols.span_tol or t_k < trail_window * (1.0 - 1e-12):
        return False
    j0 = int(np.searchsorted(t[: k + 1], t_k - trail_window, side="left"))
    return bool(np.min(probe_u[j0 : k + 1]) >= tols.u_floor)


@dataclass(frozen=True)
class FieldState:
    """Both fields, the fronts, and the clock at one time level."""

    t: float
    w: np.ndarray
    z: np.ndarray
    front: FrontState

    def __post_init__(self) -> None:
        if self.w[0] != 0.0 or self.w[-1] != 0.0:
            raise ValidationError("predator field must be pinned to zero at y = +-1")


@dataclass(frozen=True)
class Snapshot:
    t: float
    u: np.ndarray
    v: np.ndarray


@dataclass(frozen=True)
class SimulationResult:
    """Immutable trajectory record emitted by :func:`simulate`."""

    params: ModelParams
    cfg: NumericsConfig
    sgrid: StraightGrid
    lgrid: LineGrid
    t: np.ndarray
    g: np.ndarray
    h: np.ndarray
    g_dot: np.ndarray
    h_dot: np.ndarray
    sup_u: np.ndarray
    probe_u: np.ndarray
    probe_v: np.ndarray
    snapshots: tuple[Snapshot, ...]
    final: FieldState
    bound_u: float
    bound_v: float
    diagnostics: dict

    @property
    def span(self) -> np.ndarray:
        return self.h - self.g

    @property
    def t_end(self) -> float:
        return float(self.t[-1])


def boundary_flux(
    w: np.ndarray,
    front: FrontState,
    side: str,
    sgrid: StraightGrid,
    order: int = 3,
) -> float:
    """One-sided estimate of the physical gradient u_x at a front.

    The chain rule gives u_x = (2 / (h - g)) w_y; w_y at y = -1 or +1 is
    estimated with a 3-point (order 2) or 4-point (order 3) one-sided
    stencil.  The predator is pinned to zero at both ends, but the boundary
    sample is kept in the formulas so the stencils stay exact on generic
    polynomial data.
    """
    span = front.span
    if span <= 0.0:
        raise GeometryError(f"degenerate span h - g = {span}")
    dy = sgrid.dy
    if side == "right":
        if order == 2:
            wy = (3.0 * w[-1] - 4.0 * w[-2] + w[-3]) / (2.0 * dy)
        else:
            wy = (11.0 * w[-1] - 18.0 * w[-2] + 9.0 * w[-3] - 2.0 * w[-4]) / (6.0 * dy)
    elif side == "left":
        if order == 2:
            wy = (-3.0 * w[0] + 4.0 * w[1] - w[2]) / (2.0 * dy)
        else:
            wy = (-11.0 * w[0] + 18.0 * w[1] - 9.0 * w[2] + 2.0 * w[3]) / (6.0 * dy)
    else:
        raise ValidationError(f"side must be 'left' or 'right', got {side!r}")
    return 2.0 / span * wy


class _Breach(Exception):
    """Internal: a substep violated a state invariant; retry smaller."""


class _Stepper:
    """Owns grids, buffers and cached prey factorizations for one run."""

    def __init__(self, p: ModelParams, cfg: NumericsConfig, bound_u: float, bound_v: float):
        self.p = p
        self.cfg = cfg
        self.sgrid, self.lgrid = cfg.grids()
        self.bound_u = bound_u
        self.bound_v = bound_v
        self.y_int = self.sgrid.y_nodes[1:-1]
        self.dy = self.sgrid.dy
        self.dx = self.lgrid.dx
        probe = np.empty(2)
        self._gtsv, self._gttrf, self._gttrs = get_lapack_funcs(("gtsv", "gttrf", "gttrs"), (probe,))
        self._prey_factors: dict[int, tuple] = {}
        self.flux_clamps = 0
        self.overshoot_w = 0.0
        self.overshoot_z = 0.0

    def _prey_factor(self, m: int) -> tuple:
        factor = self._prey_factors.get(m)
        if factor is None:
            r = (self.cfg.dt / m) * self.p.D / self.dx**2
            n = self.lgrid.n_x
            d = np.full(n, 1.0 + 2.0 * r)
            du = np.full(n - 1, -r)
            dl = np.full(n - 1, -r)
            du[0] = -2.0 * r  # zero-flux ghost mirror at both ends
            dl[-1] = -2.0 * r
            dlf, df, duf, du2, ipiv, info = self._gttrf(dl, d, du)
            if info != 0:  # pragma: no cover - constant-coefficient matrix
                raise SolverError(f"prey matrix factorization failed (info={info})")
            factor = (dlf, df, duf, du2, ipiv)
            self._prey_factors[m] = factor
        return factor

    def substep(
        self,
        w: np.ndarray,
        z: np.ndarray,
        front: FrontState,
        dt: float,
        m: int,
    ) -> tuple[np.ndarray, np.ndarray, FrontState, int]:
        p = self.p
        ux_l = boundary_flux(w, front, "left", self.sgrid, self.cfg.front_stencil_order)
        ux_r = boundary_flux(w, front, "right", self.sgrid, self.cfg.front_stencil_order)
        g_dot = -p.mu * ux_l
        h_dot = -p.mu * ux_r
        clamps = 0
        if g_dot > 0.0:
            g_dot = 0.0
            clamps += 1
        if h_dot < 0.0:
            h_dot = 0.0
            clamps += 1
        g_new = front.g + dt * g_dot
        h_new = front.h + dt * h_dot
        if h_new >= self.lgrid.L or g_new <= -self.lgrid.L:
            # A single substep flung a front out of the prey window: a
            # step-size artifact, distinct from legitimate growth (which the
            # macro-level 0.9 L abort catches first).
            raise _Breach(
                f"front jumped to [{g_new:.4g}, {h_new:.4g}], outside the prey window"
            )
        front2 = FrontState(g_new, h_new, g_dot, h_dot)

        phi, psi = transform_coefficients(front2)
        psi_vals = psi(self.y_int)
        z_on_w = interp_prey_to_straight(z, front2, self.sgrid, self.lgrid)[1:-1]
        w_int = w[1:-1]
        dw = (w[2:] - w[:-2]) / (2.0 * self.dy)
        rhs = w_int + dt * (psi_vals * dw + w_int * (1.0 - w_int + p.a * z_on_w))
        r = dt * phi / self.dy**2
        n_int = w_int.size
        diag = np.full(n_int, 1.0 + 2.0 * r)
        off_lo = np.full(n_int - 1, -r)
        off_hi = np.full(n_int - 1, -r)
        _, _, _, sol, info = self._gtsv(off_lo, diag, off_hi, rhs, 1, 1, 1, 1)
        if info != 0:
            raise _Breach(f"predator tridiagonal solve failed (info={info})")
        w_new = np.zeros_like(w)
        w_new[1:-1] = sol

        w_min = float(w_new.min())
        if w_min < -UNDERSHOOT_TOL:
            raise _Breach(f"predator undershoot {w_min:.3e}")
        if w_min < 0.0:
            np.maximum(w_new, 0.0, out=w_new)
        w_max = float(w_new.max())
        if w_max > self.bound_u + self.cfg.tol_bounds:
            raise _Breach(f"predator sup {w_max:.6g} exceeds box {self.bound_u:.6g}")
        self.overshoot_w = max(self.overshoot_w, w_max - self.bound_u)

        u_on_z = interp_pred_to_line(w_new, front2, self.sgrid, self.lgrid)
        rhs_z = z + dt * z * (p.b - z - p.c * u_on_z)
        dlf, df, duf, du2, ipiv = self._prey_factor(m)
        z_new, info = self._gttrs(dlf, df, duf, du2, ipiv, rhs_z, overwrite_b=1)
        if info != 0:
            raise _Breach(f"prey tridiagonal solve failed (info={info})")

        z_min = float(z_new.min())
        if z_min < -UNDERSHOOT_TOL:
            raise _Breach(f"prey undershoot {z_min:.3e}")
        if z_min < 0.0:
            np.maximum(z_new, 0.0, out=z_new)
        z_max = float(z_new.max())
        if z_max > self.bound_v + self.cfg.tol_bounds:
            raise _Breach(f"prey sup {z_max:.6g} exceeds box {self.bound_v:.6g}")
        self.overshoot_z = max(self.overshoot_z, z_max - self.bound_v)

        self.flux_clamps += clamps
        return w_new, z_new, front2, clamps

    def attempt(
        self, w: np.ndarray, z: np.ndarray, front: FrontState, m: int
    ) -> tuple[np.ndarray, np.ndarray, FrontState]:
        dt_sub = self.cfg.dt / m
        for _ in range(m):
            w, z, front, _ = self.substep(w, z, front, dt_sub, m)
        return w, z, front


def step(state: FieldState, p: ModelParams, cfg: NumericsConfig) -> FieldState:
    """Advance a single macro step; standalone entry point for one state.

    Runs the same ladder of substep halvings as :func:`simulate` uses
    internally.

    Raises:
        SolverError: the invariants still fail after 8 halvings.
    """
    cfg = cfg.resolve(p)
    bound_v = max(float(state.z.max()), p.b)
    bound_u = max(float(state.w.max()), 1.0 + p.a * bound_v)
    stepper = _Stepper(p, cfg, bound_u, bound_v)
    m = 1
    while True:
        try:
            w, z, front = stepper.attempt(state.w, state.z, state.front, m)
            return FieldState(t=state.t + cfg.dt, w=w, z=z, front=front)
        except _Breach as breach:
            m *= 2
            if m > 2**MAX_HALVINGS:
                raise SolverError(
                    f"invariant breach persists after {MAX_HALVINGS} halvings "
                    f"of dt = {cfg.dt:.3e} at t = {state.t:.6g}: {breach}"
                ) from breach


def _validate_initial(
    u0: np.ndarray, v0: np.ndarray, sgrid: StraightGrid, lgrid: LineGrid
) -> tuple[np.ndarray, np.ndarray]:
    u0 = np.asarray(u0, dtype=float).copy()
    v0 = np.asarray(v0, dtype=float).copy()
    if u0.shape != sgrid.y_nodes.shape:
        raise ValidationError(
            f"u0 must be sampled at the {sgrid.y_nodes.size} straightened nodes, got {u0.shape}"
        )
    if v0.shape != lgrid.x_nodes.shape:
        raise ValidationError(f"v0 must be sampled at the {lgrid.n_x} line nodes, got {v0.shape}")
    if abs(u0[0]) > 1e-12 or abs(u0[-1]) > 1e-12:
        raise ValidationError("u0 must vanish at the habitat endpoints (within 1e-12)")
    u0[0] = u0[-1] = 0.0
    if np.any(u0[1:-1] <= 0.0):
        raise ValidationError("u0 must be strictly positive inside the habitat")
    if np.any(v0 <= 0.0):
        raise ValidationError("v0 must be strictly positive")
    if not (np.all(np.isfinite(u0)) and np.all(np.isfinite(v0))):
        raise ValidationError("initial profiles must be finite")
    return u0, v0


def simulate(
    p: ModelParams,
    u0: np.ndarray,
    v0: np.ndarray,
    cfg: NumericsConfig,
    stop: StopRules | None = None,
) -> SimulationResult:
    """Integrate the coupled system to t_max or to an early classification.

    Args:
        p: model parameters.
        u0: initial predator samples at the straightened nodes (positive
            inside, exactly zero at the ends).
        v0: initial prey samples at the line nodes (strictly positive).
        cfg: numerics; resolved against ``p`` if L or n_x are unset.
        stop: early-exit policy; pass ``StopRules(enabled=False)`` to force
            the full horizon.

    Returns:
        The full trajectory record: per-step front series, profile snapshots
        at the configured cadence, and run diagnostics.

    Raises:
        SolverError: a macro step failed after all halvings.
        FrontBreachError: a front reached 0.9 L; rerun with a larger window.
    """
    cfg = cfg.resolve(p)
    sgrid, lgrid = cfg.grids()
    if stop is None:
        stop = StopRules()
    u0, v0 = _validate_initial(u0, v0, sgrid, lgrid)

    bound_v = max(float(v0.max()), p.b)
    bound_u = max(float(u0.max()), 1.0 + p.a * bound_v)
    tols = default_tols(p, lgrid.dx, cfg.t_max)

    guard = cfg.cfl_guard(p)
    if cfg.dt > guard:
        logger.info(
            "dt = %.3e exceeds the soft explicit-term guard %.3e; "
            "relying on a-posteriori invariant checks",
            cfg.dt,
            guard,
        )

    n_steps = int(round(cfg.t_max / cfg.dt))
    if n_steps < 1:
        raise ValidationError("t_max shorter than one macro step")
    if n_steps > 20_000_000:
        raise ValidationError(f"{n_steps} macro steps requested; refusing (check dt and t_max)")

    stepper = _Stepper(p, cfg, bound_u, bound_v)

    # Initial front velocities from the Stefan condition applied to u0.
    ux_l = boundary_flux(u0, FrontState(-p.h0, p.h0), "left", sgrid, cfg.front_stencil_order)
    ux_r = boundary_flux(u0, FrontState(-p.h0, p.h0), "right", sgrid, cfg.front_stencil_order)
    front = FrontState(-p.h0, p.h0, min(-p.mu * ux_l, 0.0), max(-p.mu * ux_r, 0.0))
    w = u0
    z = v0

    rec = {
        name: np.empty(n_steps + 1)
        for name in ("t", "g", "h", "g_dot", "h_dot", "sup_u", "probe_u", "probe_v")
    }
    center = lgrid.n_x // 2
    ph = cfg.probe_halfwidth

    def _probe_u(w_arr: np.ndarray, fr: FrontState) -> float:
        span = fr.h - fr.g
        mid = fr.h + fr.g
        y_lo = max(-1.0, (-2.0 * ph - mid) / span)
        y_hi = min(1.0, (2.0 * ph - mid) / span)
        i_lo = int(math.ceil((y_lo + 1.0) / sgrid.dy))
        i_hi = int(math.floor((y_hi + 1.0) / sgrid.dy))
        i_lo = max(0, min(i_lo, w_arr.size - 1))
        i_hi = max(i_lo, min(i_hi, w_arr.size - 1))
        return float(w_arr[i_lo : i_hi + 1].max())

    def _record(k: int, t: float) -> None:
        rec["t"][k] = t
        rec["g"][k] = front.g
        rec["h"][k] = front.h
        rec["g_dot"][k] = front.g_dot
        rec["h_dot"][k] = front.h_dot
        rec["sup_u"][k] = w.max()
        rec["probe_u"][k] = _probe_u(w, front)
        rec["probe_v"][k] = z[center]

    snapshots: list[Snapshot] = []

    def _snap(t: float) -> None:
        snapshots.append(
            Snapshot(t=t, u=interp_pred_to_line(w, front, sgrid, lgrid), v=z.copy())
        )

    _record(0, 0.0)
    _snap(0.0)
    next_snap = cfg.snapshot_dt if cfg.snapshot_dt is not None else math.inf

    retries = 0
    max_m = 1
    last_m = 1
    stopped_early: str | None = None
    two_h0 = 2.0 * p.h0
    k_done = 0

    for k in range(1, n_steps + 1):
        m = last_m
        if m > 1 and k % 8 == 0:
            m //= 2
        while True:
            try:
                w_new, z_new, front_new = stepper.attempt(w, z, front, m)
                break
            except _Breach as breach:
                retries += 1
                m *= 2
                if m > 2**MAX_HALVINGS:
                    raise SolverError(
                        f"invariant breach persists after {MAX_HALVINGS} halvings of "
                        f"dt = {cfg.dt:.3e} at t = {(k - 1) * cfg.dt:.6g}: {breach}"
                    ) from breach
        last_m = m
        max_m = max(max_m, m)
        w, z, front = w_new, z_new, front_new
        t_k = k * cfg.dt
        _record(k, t_k)
        k_done = k

        if front.h >= 0.9 * lgrid.L or -front.g >= 0.9 * lgrid.L:
            raise FrontBreachError(
                f"front reached 0.9 L at t = {t_k:.6g} (g = {front.g:.4g}, h = {front.h:.4g}); "
                f"rerun with L > {lgrid.L:.4g}"
            )

        if t_k + 1e-12 >= next_snap:
            _snap(t_k)
            next_snap += cfg.snapshot_dt  # type: ignore[operator]

        if stop.enabled and t_k >= stop.t_min and k % stop.check_every == 0:
            speed = abs(front.g_dot) + abs(front.h_dot)
            if vanishing_now(two_h0, front.span, float(w.max()), speed, tols):
                stopped_early = "vanishing"
                break
            if _spreading_now(rec["t"], rec["probe_u"], k, front.span, tols, stop.trail_window):
                stopped_early = "spreading"
                break

    if not snapshots or snapshots[-1].t < k_done * cfg.dt - 1e-12:
        _snap(k_done * cfg.dt)

    n_rec = k_done + 1
    arrays = {name: arr[:n_rec] for name, arr in rec.items()}
    for arr in arrays.values():
        arr.setflags(write=False)
    for snap in snapshots:
        snap.u.setflags(write=False)
        snap.v.setflags(write=False)

    diagnostics = {
        "flux_clamps": stepper.flux_clamps,
        "retries": retries,
        "max_substeps": max_m,
        "overshoot_w": max(0.0, stepper.overshoot_w),
        "overshoot_z": max(0.0, stepper.overshoot_z),
        "stopped_early": stopped_early,
        "n_steps": k_done,
        "cfl_guard": guard,
    }
    if stepper.flux_clamps:
        logger.info("clamped %d wrong-sign front velocities to zero motion", stepper.flux_clamps)

    return SimulationResult(
        params=p,
        cfg=cfg,
        sgrid=sgrid,
        lgrid=lgrid,
        t=arrays["t"],
        g=arrays["g"],
        h=arrays["h"],
        g_dot=arrays["g_dot"],
        h_dot=arrays["h_dot"],
        sup_u=arrays["sup_u"],
        probe_u=arrays["probe_u"],
        probe_v=arrays["probe_v"],
        snapshots=tuple(snapshots),
        final=FieldState(t=k_done * cfg.dt, w=w, z=z, front=front),
        bound_u=bound_u,
        bound_v=bound_v,
        diagnostics=diagnostics,
    )
