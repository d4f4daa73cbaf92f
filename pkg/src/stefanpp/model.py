"""Model parameters, analytic thresholds, and the coexistence-limit iteration.

The underlying system couples a predator u living on a moving interval
[g(t), h(t)] with a prey v on the whole line:

    u_t - u_xx   = u (1 - u + a v)
    v_t - D v_xx = v (b - v - c u)

with Stefan conditions g' = -mu u_x(g), h' = -mu u_x(h).  Everything in this
module is closed-form arithmetic on the six positive constants
(a, b, c, D, mu, h0); no PDE machinery lives here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .errors import RegimeError, ValidationError

#: Hunting-regime labels.  "weak" admits a coexistence limit, "strong" drives
#: the prey extinct under spreading, "uncovered" has no known long-time limit.
WEAK = "weak"
STRONG = "strong"
UNCOVERED = "uncovered"


@dataclass(frozen=True)
class ModelParams:
    """The six positive constants of the two-species free boundary system.

    Attributes:
        a: predation-benefit coefficient (boost to predator growth per unit prey).
        b: prey intrinsic growth rate (also the prey carrying capacity).
        c: predation-loss coefficient (prey death per unit predator).
        D: prey diffusivity.
        mu: front expansion coefficient in the Stefan conditions.
        h0: initial habitat half-span, so the predator starts on [-h0, h0].
    """

    a: float
    b: float
    c: float
    D: float
    mu: float
    h0: float

    def __post_init__(self) -> None:
        for name in ("a", "b", "c", "D", "mu", "h0"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value)):
                raise ValidationError(f"{name} must be a finite number, got {value!r}")
            if value <= 0:
                raise ValidationError(f"{name} must be positive, got {value}")

    @property
    def regime(self) -> str:
        return hunting_regime(self.a, self.b, self.c)


def hunting_regime(a: float, b: float, c: float) -> str:
    """Classify the interaction strength from (a, b, c) alone.

    Weak hunting requires b > c and a*c < 1; strong hunting is b <= c.  The
    remaining corner (b > c with a*c >= 1) has no established long-time limit
    and is reported as "uncovered" so callers can refuse to extrapolate.
    """
    if b <= c:
        return STRONG
    if a * c < 1.0:
        return WEAK
    return UNCOVERED


def lambda_threshold(p: ModelParams) -> float:
    """Critical habitat span pi * sqrt(1 / (1 + a*b)).

    A habitat whose span ever reaches this length forces spreading; a
    vanishing run keeps its span below it forever.
    """
    return math.pi * math.sqrt(1.0 / (1.0 + p.a * p.b))


def spreading_limits(p: ModelParams) -> tuple[float, float]:
    """Long-time interior values (u*, v*) reached when spreading occurs.

    Weak hunting: ((1 + a*b)/(1 + a*c), (b - c)/(1 + a*c)).  Strong hunting:
    (1, 0), i.e. the prey is driven out and the predator saturates alone.

    Raises:
        RegimeError: for the uncovered regime (b > c with a*c >= 1), where no
            limit is known and extrapolation would be a guess.
    """
    regime = p.regime
    if regime == WEAK:
        denom = 1.0 + p.a * p.c
        return (1.0 + p.a * p.b) / denom, (p.b - p.c) / denom
    if regime == STRONG:
        return 1.0, 0.0
    raise RegimeError(
        "no long-time limit is established for b > c with a*c >= 1 "
        f"(a={p.a}, b={p.b}, c={p.c}); refusing to extrapolate"
    )


def mu_upper_bound(p: ModelParams, x: np.ndarray, u0: np.ndarray) -> float:
    """Expansion coefficient above which spreading is guaranteed.

    Returns
        max(1, sup u0) * (pi^2 - 4 h0^2) / (2 * int_{-h0}^{h0} (x + h0) u0 dx),

    the weighted-mass criterion for a subcritical initial habitat.  The
    integral is evaluated by composite Simpson quadrature on the caller's
    sample grid; second-order accuracy is ample because the bound is a
    sufficient criterion, not a sharp constant.

    Args:
        p: model parameters with 2*h0 < lambda_threshold(p).
        x: sample abscissae spanning [-h0, h0], ascending.
        u0: nonnegative predator samples at x, zero at both endpoints.

    Raises:
        RegimeError: if 2*h0 >= lambda_threshold(p); spreading is already
            guaranteed there and the formula does not apply.
        ValidationError: for malformed samples or a degenerate (nonpositive)
            weighted integral.
    """
    lam = lambda_threshold(p)
    if 2.0 * p.h0 >= lam:
        raise RegimeError(
            f"2*h0 = {2 * p.h0:.6g} >= critical span {lam:.6g}: spreading is "
            "already guaranteed, the large-mu criterion does not apply"
        )
    x = np.asarray(x, dtype=float)
    u0 = np.asarray(u0, dtype=float)
    if x.ndim != 1 or x.shape != u0.shape or x.size < 5:
        raise ValidationError("x and u0 must be 1-d arrays of equal length >= 5")
    if not (np.all(np.diff(x) > 0)):
        raise ValidationError("sample abscissae must be strictly ascending")
    if abs(x[0] + p.h0) > 1e-9 * max(1.0, p.h0) or abs(x[-1] - p.h0) > 1e-9 * max(1.0, p.h0):
        raise ValidationError(f"samples must span [-h0, h0] = [{-p.h0}, {p.h0}]")
    if np.any(u0 < 0):
        raise ValidationError("u0 must be nonnegative")
    if abs(u0[0]) > 1e-12 or abs(u0[-1]) > 1e-12:
        raise ValidationError("u0 must vanish at the habitat endpoints")

    weighted = simpson((x + p.h0) * u0, x=x)
    if weighted <= 0.0:
        raise ValidationError(f"degenerate initial profile: weighted mass {weighted:.3g} <= 0")
    sup = float(np.max(u0))
    return max(1.0, sup) * (math.pi**2 - 4.0 * p.h0**2) / (2.0 * weighted)


@dataclass(frozen=True)
class LimitIterates:
    """Monotone bounding sequences produced by :func:`limit_iteration`.

    ``under_u[i] <= u* <= over_u[i]`` and ``under_v[i] <= v* <= over_v[i]``
    for every round i, with the gaps contracting geometrically at rate
    (a*c)^2 per round.
    """

    under_u: np.ndarray
    over_u: np.ndarray
    under_v: np.ndarray
    over_v: np.ndarray

    @property
    def rounds(self) -> int:
        return self.under_u.size

    def final_gap(self) -> float:
        return float(self.over_v[-1] - self.under_v[-1])


def limit_iteration(p: ModelParams, n_rounds: int = 200, gap_tol: float = 1e-14) -> LimitIterates:
    """Run the alternating bounding recursion for the weak-hunting limits.

    Starting from under_u[1] = 1, each round applies

        over_v[i]  = b - c * under_u[i]
        over_u[i]  = 1 + a * over_v[i]
        under_v[i] = b - c * over_u[i]
        under_u[i+1] = 1 + a * under_v[i]

    The four sequences squeeze the spreading limits (u*, v*) from both sides.
    Iteration stops early once over_v - under_v < ``gap_tol``; convergence is
    geometric with ratio (a*c)^2 per round, so the default budget of 200
    rounds is never binding in practice.

    Raises:
        RegimeError: outside the weak-hunting regime, where the recursion has
            no bounding interpretation.
        ValidationError: if n_rounds < 1.
    """
    if p.regime != WEAK:
        raise RegimeError(
            f"limit iteration requires weak hunting (b > c and a*c < 1); got regime {p.regime!r}"
        )
    if n_rounds < 1:
        raise ValidationError(f"n_rounds must be >= 1, got {n_rounds}")

    under_u = np.empty(n_rounds)
    over_u = np.empty(n_rounds)
    under_v = np.empty(n_rounds)
    over_v = np.empty(n_rounds)

    uu = 1.0
    used = n_rounds
    for i in range(n_rounds):
        under_u[i] = uu
        ov = p.b - p.c * uu
        ou = 1.0 + p.a * ov
        uv = p.b - p.c * ou
        over_v[i] = ov
        over_u[i] = ou
        under_v[i] = uv
        uu = 1.0 + p.a * uv
        if ov - uv < gap_tol:
            used = i + 1
            break

    return LimitIterates(
        under_u=under_u[:used].copy(),
        over_u=over_u[:used].copy(),
        under_v=under_v[:used].copy(),
        over_v=over_v[:used].copy(),
    )
