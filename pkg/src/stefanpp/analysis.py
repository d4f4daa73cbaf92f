"""Run classification, barrier oracles, and threshold bracketing.

A finished trajectory is classified as Spreading (span escaped past the
critical length with the predator holding up on the probe window) or
Vanishing (span stayed subcritical, the predator decayed, the fronts froze).
Neither firing by the horizon yields Undecided with a closest-margin
diagnostic; any finite-horizon classifier can mislabel near-threshold runs,
so Undecided is a value, not an error.

The vanishing-side threshold mu0 comes from an explicit barrier: a
separable supersolution f(t) cos(pi x / (2 eta(t))) whose support radius
eta(t) stays below theta = h0/2 + Lambda/4 whenever mu <= mu0.  The barrier
doubles as a runtime oracle: a correct solver must keep fronts and field
under it for every mu <= mu0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import cumulative_simpson

from .errors import BracketError, RegimeError, SolverError, ValidationError
from .model import UNCOVERED, ModelParams, lambda_threshold, spreading_limits
from .solver import (
    ClassifyTols,
    NumericsConfig,
    SimulationResult,
    StopRules,
    default_tols,
    simulate,
    spreading_index,
    vanishing_now,
)
from .steady import ode_upper_v

SPREADING = "Spreading"
VANISHING = "Vanishing"
UNDECIDED = "Undecided"


@dataclass(frozen=True)
class Verdict:
    """Classification outcome with the evidence that triggered it."""

    kind: str
    evidence: dict
    t_decided: float | None


def classify(
    result: SimulationResult,
    tols: ClassifyTols | None = None,
    trail_window: float = 2.0,
) -> Verdict:
    """Apply the dichotomy rules to a finished trajectory.

    Spreading needs span > Lambda + span_tol with the probe-window sup-norm
    at or above the floor throughout the trailing window; Vanishing needs a
    subcritical final span, a decayed sup-norm, and front speeds below the
    floor at the horizon.  A run whose initial span already meets Lambda can
    never be Vanishing, whatever the discrete fields look like.
    """
    p = result.params
    if tols is None:
        tols = default_tols(p, result.lgrid.dx, result.cfg.t_max)
    span = result.span
    idx = spreading_index(result.t, span, result.probe_u, tols, trail_window)
    if idx is not None:
        return Verdict(
            kind=SPREADING,
            evidence={
                "span_at_decision": float(span[idx]),
                "lambda": tols.lam,
                "span_tol": tols.span_tol,
                "u_floor": tols.u_floor,
                "trail_window": trail_window,
            },
            t_decided=float(result.t[idx]),
        )

    speed = np.abs(result.g_dot) + np.abs(result.h_dot)
    if vanishing_now(2.0 * p.h0, float(span[-1]), float(result.sup_u[-1]), float(speed[-1]), tols):
        held = (
            (span <= tols.lam + tols.span_tol)
            & (result.sup_u < tols.u_tol)
            & (speed < tols.v_tol)
        )
        k0 = result.t.size - 1
        while k0 > 0 and held[k0 - 1]:
            k0 -= 1
        return Verdict(
            kind=VANISHING,
            evidence={
                "final_span": float(span[-1]),
                "lambda": tols.lam,
                "span_tol": tols.span_tol,
                "final_sup_u": float(result.sup_u[-1]),
                "u_tol": tols.u_tol,
                "final_speed": float(speed[-1]),
                "v_tol": tols.v_tol,
            },
            t_decided=float(result.t[k0]),
        )

    margins = {
        "spreading_span_margin": float(span[-1] - (tols.lam + tols.span_tol)),
        "vanishing_sup_ratio": float(result.sup_u[-1] / tols.u_tol),
        "vanishing_speed_ratio": float(speed[-1] / tols.v_tol),
    }
    # Normalized distance to each verdict: 0 means it would have fired.
    dist_spread = max(0.0, -margins["spreading_span_margin"] / max(tols.lam, 1e-300))
    dist_vanish = max(
        0.0,
        max(margins["vanishing_sup_ratio"], margins["vanishing_speed_ratio"]) - 1.0,
    )
    margins["closest"] = "Spreading" if dist_spread <= dist_vanish else "Vanishing"
    return Verdict(kind=UNDECIDED, evidence=margins, t_decided=None)


@dataclass(frozen=True)
class Supersolution:
    """Explicit vanishing barrier (v_bar(t), f(t), eta(t)) and its threshold.

    The three pieces dominate the true solution whenever the run's expansion
    coefficient stays at or below ``mu0``: the prey by the logistic envelope,
    the predator by f(t) cos(pi x / (2 eta(t))), and the fronts by +-eta(t).
    """

    params: ModelParams
    M: float
    delta: float
    theta_len: float
    mu0: float
    v0_sup: float
    f_total: float
    tail_time: float
    _grid_t: np.ndarray
    _grid_F: np.ndarray

    def v_bar(self, t: np.ndarray | float) -> np.ndarray | float:
        return ode_upper_v(t, self.params.b, self.v0_sup)

    def _exponent(self, t: np.ndarray) -> np.ndarray:
        p = self.params
        ratio = p.b / self.v0_sup
        lead = 1.0 - (0.5 * math.pi / self.theta_len) ** 2
        return lead * t + p.a * (p.b * t + np.log1p((ratio - 1.0) * np.exp(-p.b * t))) - p.a * math.log(ratio)

    def f(self, t: np.ndarray | float) -> np.ndarray | float:
        t_arr = np.asarray(t, dtype=float)
        out = self.M * np.exp(self._exponent(t_arr))
        return float(out) if np.isscalar(t) else out

    def f_integral(self, t: np.ndarray | float) -> np.ndarray | float:
        """Cumulative integral of f from 0, saturating at ``f_total``."""
        out = np.interp(np.asarray(t, dtype=float), self._grid_t, self._grid_F, right=self.f_total)
        return float(out) if np.isscalar(t) else out

    def eta(self, t: np.ndarray | float) -> np.ndarray | float:
        p = self.params
        base = (p.h0 * (1.0 + self.delta)) ** 2
        out = np.sqrt(base + p.mu * math.pi * np.asarray(self.f_integral(t)))
        return float(out) if np.isscalar(t) else out

    def barrier_u(self, t: float, x: np.ndarray) -> np.ndarray:
        """Pointwise barrier value f(t) cos(pi x / (2 eta(t)))."""
        eta_t = self.eta(t)
        return self.f(t) * np.cos(0.5 * math.pi * np.asarray(x) / eta_t)

    def residual(self, t: float, x: np.ndarray) -> np.ndarray:
        """Discrete-free PDE defect of the barrier at (t, x), |x| <= eta(t).

        Evaluates d/dt - d2/dx2 - reaction of the barrier with exact partial
        derivatives; nonnegative up to the quadrature error in f wherever
        eta(t) <= theta.
        """
        p = self.params
        x = np.asarray(x, dtype=float)
        eta_t = float(self.eta(t))
        f_t = float(self.f(t))
        vb = float(self.v_bar(t))
        arg = 0.5 * math.pi * x / eta_t
        cosv = np.cos(arg)
        sinv = np.sin(arg)
        rate = 1.0 + p.a * vb - (0.5 * math.pi / self.theta_len) ** 2
        eta_dot = p.mu * math.pi * f_t / (2.0 * eta_t)
        u_t = rate * f_t * cosv + f_t * sinv * (0.5 * math.pi * x * eta_dot / eta_t**2)
        u_xx = -f_t * (0.5 * math.pi / eta_t) ** 2 * cosv
        u = f_t * cosv
        return u_t - u_xx - u * (1.0 - u + p.a * vb)


def build_supersolution(
    p: ModelParams,
    x_u: np.ndarray,
    u0: np.ndarray,
    v0: np.ndarray,
    delta: float | None = None,
) -> Supersolution:
    """Construct the explicit vanishing barrier for a subcritical habitat.

    The amplitude M is the smallest power-of-two multiple of sup u0 that
    dominates u0 by the inflated cosine cap M cos(pi x / (2 h0 (1+delta)))
    on the sample grid.  The improper integral of f is accumulated on a
    dense Simpson grid out to a horizon where the geometric tail bound
    drops below 1e-9 of the accumulated value.

    Raises:
        RegimeError: if 2 h0 >= Lambda (no subcritical barrier exists).
        ValidationError: bad delta, or u0 too close to the cosine's zero set
            for any M up to 2**40 sup u0.
    """
    lam = lambda_threshold(p)
    if 2.0 * p.h0 >= lam:
        raise RegimeError(
            f"2*h0 = {2 * p.h0:.6g} >= critical span {lam:.6g}: no vanishing barrier exists"
        )
    theta_len = 0.5 * p.h0 + 0.25 * lam
    if delta is None:
        delta = min(0.05, 0.5 * (theta_len / p.h0 - 1.0))
    if delta <= 0.0:
        raise ValidationError(f"delta must be positive, got {delta}")
    if theta_len <= p.h0 * (1.0 + delta):
        raise ValidationError(
            f"delta = {delta} too large: h0 (1+delta) = {p.h0 * (1 + delta):.6g} "
            f"must stay below theta = {theta_len:.6g}"
        )

    x_u = np.asarray(x_u, dtype=float)
    u0 = np.asarray(u0, dtype=float)
    if x_u.shape != u0.shape or np.any(u0 < 0):
        raise ValidationError("u0 must be nonnegative samples matching x_u")
    v0_sup = float(np.max(np.asarray(v0, dtype=float)))
    if v0_sup <= 0:
        raise ValidationError("v0 must have a positive sup")

    cap_shape = np.cos(0.5 * math.pi * x_u / (p.h0 * (1.0 + delta)))
    sup_u0 = float(np.max(u0))
    if sup_u0 <= 0:
        raise ValidationError("u0 must not be identically zero")
    M = sup_u0
    while np.any(u0 > M * cap_shape):
        M *= 2.0
        if M > 2.0**40 * sup_u0:
            raise ValidationError(
                "no cosine cap up to 2**40 sup u0 dominates u0; the profile hugs "
                "the habitat endpoints too tightly"
            )

    # Horizon where the instantaneous growth rate is negative and the
    # geometric tail bound is negligible against the accumulated integral.
    pi_over = (0.5 * math.pi / theta_len) ** 2
    sup_boot = Supersolution(
        params=p,
        M=M,
        delta=delta,
        theta_len=theta_len,
        mu0=math.nan,
        v0_sup=v0_sup,
        f_total=math.nan,
        tail_time=math.nan,
        _grid_t=np.array([0.0, 1.0]),
        _grid_F=np.array([0.0, 0.0]),
    )
    T = max(1.0, 2.0 / p.b)
    while True:
        rate_T = 1.0 + p.a * float(sup_boot.v_bar(T)) - pi_over
        if rate_T < -1e-3:
            grid_t = np.linspace(0.0, T, 8193)
            f_vals = sup_boot.f(grid_t)
            grid_F = cumulative_simpson(f_vals, x=grid_t, initial=0.0)
            tail = float(f_vals[-1]) / (-rate_T)
            if tail < 1e-9 * float(grid_F[-1]):
                break
        T *= 2.0
        if T > 1e12:  # pragma: no cover - rate_inf < 0 guarantees termination
            raise SolverError("barrier tail failed to decay; cannot happen for 2 h0 < Lambda")

    f_total = float(grid_F[-1])
    mu0 = (theta_len**2 - (p.h0 * (1.0 + delta)) ** 2) / (math.pi * f_total)
    grid_F.setflags(write=False)
    grid_t.setflags(write=False)
    return Supersolution(
        params=p,
        M=M,
        delta=delta,
        theta_len=theta_len,
        mu0=mu0,
        v0_sup=v0_sup,
        f_total=f_total,
        tail_time=T,
        _grid_t=grid_t,
        _grid_F=grid_F,
    )


@dataclass(frozen=True)
class DominationReport:
    """Worst margins of the barrier-domination oracle over a whole run."""

    ok: bool
    precondition_ok: bool
    worst_front_margin: float
    worst_u_margin: float
    first_violation: tuple[float, str] | None
    eps_grid: float


def check_domination(
    result: SimulationResult,
    sup: Supersolution,
    eps_grid: float | None = None,
) -> DominationReport:
    """Check that fronts and predator stay under the barrier.

    Front containment (g >= -eta, h <= eta) is checked at every output time;
    the pointwise field bound u <= f cos(pi x / (2 eta)) at every snapshot.
    A margin below ``-eps_grid`` marks a violation: for a run with
    mu <= mu0 that signals a solver bug, and the report (never an exception)
    carries the worst offenders.
    """
    if eps_grid is None:
        eps_grid = 2.0 * result.lgrid.dx
    precondition_ok = result.params.mu <= sup.mu0 * (1.0 + 1e-12)

    eta_t = np.asarray(sup.eta(result.t))
    margin_h = eta_t - result.h
    margin_g = result.g - (-eta_t)
    worst_front = float(min(margin_h.min(), margin_g.min()))
    first_violation: tuple[float, str] | None = None
    viol_front = np.minimum(margin_h, margin_g) < -eps_grid
    if np.any(viol_front):
        first_violation = (float(result.t[int(np.argmax(viol_front))]), "front")

    worst_u = math.inf
    for snap in result.snapshots:
        eta_s = float(sup.eta(snap.t))
        inside = snap.u > 0.0
        if not np.any(inside):
            continue
        x_in = result.lgrid.x_nodes[inside]
        barrier = sup.f(snap.t) * np.cos(0.5 * math.pi * np.clip(x_in / eta_s, -1.0, 1.0))
        margin = float(np.min(barrier - snap.u[inside]))
        worst_u = min(worst_u, margin)
        if margin < -eps_grid and (first_violation is None or snap.t < first_violation[0]):
            first_violation = (snap.t, "field")
    if worst_u is math.inf:
        worst_u = 0.0

    ok = worst_front >= -eps_grid and worst_u >= -eps_grid
    return DominationReport(
        ok=ok,
        precondition_ok=precondition_ok,
        worst_front_margin=worst_front,
        worst_u_margin=worst_u,
        first_violation=first_violation,
        eps_grid=eps_grid,
    )


@dataclass(frozen=True)
class ProbeRecord:
    mu: float
    kind: str
    t_end: float
    horizon_doubled: bool


@dataclass(frozen=True)
class MuStarBracket:
    """Bisection enclosure of the spreading threshold in mu."""

    lo: float
    hi: float
    probes: tuple[ProbeRecord, ...]
    near_threshold: tuple[float, ...]

    @property
    def width(self) -> float:
        return self.hi - self.lo


def estimate_mu_star(
    p_base: ModelParams,
    u0: np.ndarray,
    v0: np.ndarray,
    bracket: tuple[float, float],
    n_bisect: int,
    cfg: NumericsConfig,
    stop: StopRules | None = None,
) -> MuStarBracket:
    """Bisect the expansion coefficient between vanishing and spreading.

    Every probe is a full simulate + classify at the midpoint mu.  An
    Undecided probe is retried once with the horizon doubled; if it stays
    undecided it is recorded as near-threshold and the interval keeps its
    upper half (the boundary case belongs to the vanishing set, so biasing
    the bracket's upper end outward preserves a true enclosure under slow
    transients).

    Raises:
        BracketError: both bracket endpoints classify identically.
        RegimeError: the initial habitat is not subcritical, so no
            threshold exists to bracket.
    """
    mu_lo, mu_hi = bracket
    if not (0.0 < mu_lo < mu_hi):
        raise BracketError(f"need 0 < mu_lo < mu_hi, got ({mu_lo}, {mu_hi})")
    if 2.0 * p_base.h0 >= lambda_threshold(p_base):
        raise RegimeError("2*h0 >= Lambda: spreading occurs for every mu, nothing to bracket")
    if stop is None:
        stop = StopRules()
    cfg = cfg.resolve(p_base)

    probes: list[ProbeRecord] = []
    near: list[float] = []

    def probe(mu: float) -> str:
        p = replace(p_base, mu=mu)
        res = simulate(p, u0, v0, cfg, stop=stop)
        verdict = classify(res, trail_window=stop.trail_window)
        doubled = False
        if verdict.kind == UNDECIDED:
            doubled = True
            cfg2 = replace(cfg, t_max=2.0 * cfg.t_max)
            res = simulate(p, u0, v0, cfg2, stop=stop)
            verdict = classify(res, trail_window=stop.trail_window)
        probes.append(ProbeRecord(mu=mu, kind=verdict.kind, t_end=res.t_end, horizon_doubled=doubled))
        return verdict.kind

    kind_lo = probe(mu_lo)
    kind_hi = probe(mu_hi)
    if kind_lo != VANISHING or kind_hi != SPREADING:
        raise BracketError(
            f"invalid bracket: mu_lo={mu_lo} classified {kind_lo}, mu_hi={mu_hi} classified {kind_hi}"
        )

    lo, hi = mu_lo, mu_hi
    for _ in range(n_bisect):
        mid = 0.5 * (lo + hi)
        kind = probe(mid)
        if kind == SPREADING:
            hi = mid
        else:
            if kind == UNDECIDED:
                near.append(mid)
            lo = mid
    return MuStarBracket(lo=lo, hi=hi, probes=tuple(probes), near_threshold=tuple(near))


@dataclass(frozen=True)
class LimitCheck:
    name: str
    value: float
    target: float
    tol: float

    @property
    def ok(self) -> bool:
        return abs(self.value - self.target) <= self.tol


@dataclass(frozen=True)
class LimitReport:
    verdict_kind: str
    regime: str
    checks: tuple[LimitCheck, ...]
    note: str = ""

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)


def verify_limits(
    result: SimulationResult,
    verdict: Verdict,
    tol: float,
    probe_halfwidth: float | None = None,
) -> LimitReport:
    """Compare the final fields against the closed-form long-time targets.

    Spreading in weak hunting targets ((1+ab)/(1+ac), (b-c)/(1+ac)); in
    strong hunting (1, 0).  Vanishing targets a decayed predator and prey at
    carrying capacity b on the probe window.  Every assertion is absolute
    with the same tolerance; the report carries pass/fail per check.
    """
    p = result.params
    regime = p.regime
    if verdict.kind == UNDECIDED:
        raise ValidationError("limits are only defined for a decided verdict")
    if probe_halfwidth is None:
        probe_halfwidth = result.cfg.probe_halfwidth
    snap = result.snapshots[-1]
    window = np.abs(result.lgrid.x_nodes) <= probe_halfwidth
    if not np.any(window):
        raise ValidationError("probe window contains no line nodes")

    checks: list[LimitCheck] = []
    note = ""
    if verdict.kind == SPREADING:
        if regime == UNCOVERED:
            note = "no long-time limit is known for b > c with a*c >= 1; nothing to check"
        else:
            u_star, v_star = spreading_limits(p)
            u_worst = snap.u[window][int(np.argmax(np.abs(snap.u[window] - u_star)))]
            v_worst = snap.v[window][int(np.argmax(np.abs(snap.v[window] - v_star)))]
            checks.append(LimitCheck("u_on_window", float(u_worst), u_star, tol))
            checks.append(LimitCheck("v_on_window", float(v_worst), v_star, tol))
    else:
        v_worst = snap.v[window][int(np.argmax(np.abs(snap.v[window] - p.b)))]
        checks.append(LimitCheck("sup_u_final", float(result.sup_u[-1]), 0.0, tol))
        checks.append(LimitCheck("v_on_window", float(v_worst), p.b, tol))
    return LimitReport(verdict_kind=verdict.kind, regime=regime, checks=tuple(checks), note=note)
