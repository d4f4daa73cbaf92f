"""Steady logistic profiles on an interval, used as long-time oracles.

Solves the two-point boundary value problem

    -d w'' = w (beta - theta w)  on (-l, l),   w(-l) = w(l) = k

by damped Newton iteration on the centered-difference discretization.  For
k = 0 a positive solution exists exactly when l exceeds the principal
eigenvalue threshold (pi/2) * sqrt(d / beta); below it the iteration
collapses to the zero profile, which is reported with a subcritical flag
instead of an error.

Also provides the closed-form logistic upper bound for the prey sup-norm,
used when constructing vanishing-case barriers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .errors import SolverError, ValidationError

#: Iterate collapse threshold, relative to the carrying level beta/theta.
_COLLAPSE_REL = 1e-10


@dataclass(frozen=True)
class LogisticBVP:
    """Problem data for the steady logistic interval problem."""

    d: float
    beta: float
    theta: float
    l: float
    k: float = 0.0

    def __post_init__(self) -> None:
        for name in ("d", "beta", "theta", "l"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"{name} must be positive, got {getattr(self, name)}")
        if self.k < 0:
            raise ValidationError(f"boundary value k must be >= 0, got {self.k}")


@dataclass(frozen=True)
class SteadyProfile:
    """Converged discrete profile with its defect norm."""

    x_nodes: np.ndarray
    values: np.ndarray
    residual_norm: float
    subcritical: bool


def existence_threshold(d: float, beta: float) -> float:
    """Critical half-length (pi/2) * sqrt(d / beta) for a positive profile at k = 0.

    Coincides with the sign change of the principal Dirichlet eigenvalue
    beta - d * (pi / (2 l))^2.
    """
    if d <= 0 or beta <= 0:
        raise ValidationError("d and beta must be positive")
    return 0.5 * math.pi * math.sqrt(d / beta)


def _interior_residual(problem: LogisticBVP, w_full: np.ndarray, dx: float) -> np.ndarray:
    lap = (w_full[:-2] - 2.0 * w_full[1:-1] + w_full[2:]) / dx**2
    w = w_full[1:-1]
    return problem.d * lap + w * (problem.beta - problem.theta * w)


def solve_bvp(problem: LogisticBVP, n: int = 257, tol: float = 1e-12) -> SteadyProfile:
    """Damped Newton solve of the logistic two-point BVP.

    Starts from the positive cosine bump max(k, beta/theta) cos(pi x / (2 l)),
    saturated at the carrying level so that on wide intervals the guess keeps
    the plateau-with-boundary-layer shape of the true profile (a plain bump
    there puts Newton in the basin of a sign-changing root).  The positive
    solution is unique when it exists, so any convergent positive iterate is
    the answer; subcriticality (k = 0, l at or below threshold) manifests as
    collapse of the iterate toward zero and is cross-checked against the sign
    of beta - d (pi / (2 l))^2 so that slow convergence is never misreported
    as nonexistence.

    Args:
        problem: the BVP data.
        n: total node count including both endpoints (>= 64).
        tol: sup-norm bound on the discrete defect at convergence.  The
            defect scale d/dx^2 puts a roundoff floor under the achievable
            residual; a line search stagnating within a small multiple of
            that floor counts as converged and the actual residual is
            reported.

    Raises:
        SolverError: Newton fails to converge within 50 damped iterations, or
            the collapse signal contradicts the eigenvalue sign.
    """
    if n < 64:
        raise ValidationError(f"need n >= 64 nodes, got {n}")
    x = np.linspace(-problem.l, problem.l, n)
    dx = x[1] - x[0]
    carrying = problem.beta / problem.theta
    eig_margin = problem.beta - problem.d * (0.5 * math.pi / problem.l) ** 2

    w = np.full(n, problem.k)
    saturation = max(1.0, (2.0 * problem.l / math.pi) * math.sqrt(problem.beta / problem.d))
    w[1:-1] = max(problem.k, carrying) * np.minimum(
        1.0, saturation * np.cos(0.5 * math.pi * x[1:-1] / problem.l)
    )
    w[0] = w[-1] = problem.k

    off = problem.d / dx**2
    amp = max(problem.k, carrying)
    floor = 64.0 * np.finfo(float).eps * off * amp
    band = np.zeros((3, n - 2))
    res = _interior_residual(problem, w, dx)
    res_norm = float(np.max(np.abs(res)))

    for _ in range(50):
        if res_norm <= tol:
            break
        if problem.k == 0.0 and float(np.max(w)) < _COLLAPSE_REL * carrying:
            break
        band[0, 1:] = off
        band[2, :-1] = off
        band[1, :] = -2.0 * off + problem.beta - 2.0 * problem.theta * w[1:-1]
        try:
            delta = solve_banded((1, 1), band, res, check_finite=False)
        except np.linalg.LinAlgError as exc:  # pragma: no cover - singular Jacobian
            raise SolverError(f"singular Newton system: {exc}") from exc
        lam = 1.0
        improved = False
        while lam > 1e-10:
            trial = w.copy()
            trial[1:-1] = w[1:-1] - lam * delta
            trial_res = _interior_residual(problem, trial, dx)
            trial_norm = float(np.max(np.abs(trial_res)))
            if trial_norm < res_norm or trial_norm <= tol:
                improved = True
                break
            lam *= 0.5
        if not improved:
            if res_norm <= max(tol, floor):
                break  # stagnated at the roundoff floor of the defect
            raise SolverError(
                f"Newton line search stagnated at residual {res_norm:.3e} "
                f"(floor {floor:.3e})"
            )
        w = trial
        res = trial_res
        res_norm = trial_norm
    else:
        raise SolverError(f"Newton did not converge in 50 iterations; final residual {res_norm:.3e}")

    collapsed = problem.k == 0.0 and float(np.max(w)) < _COLLAPSE_REL * carrying
    if collapsed:
        if eig_margin > 0.0:
            raise SolverError(
                "iterate collapsed although the principal eigenvalue margin "
                f"{eig_margin:.3e} > 0 promises a positive profile"
            )
        zero = np.zeros(n)
        return SteadyProfile(x_nodes=x, values=zero, residual_norm=0.0, subcritical=True)
    if problem.k == 0.0 and eig_margin <= 0.0:
        raise SolverError(
            "converged to a nonzero profile although the eigenvalue margin "
            f"{eig_margin:.3e} <= 0 forbids one"
        )
    if float(np.min(w)) < -1e-12:
        raise SolverError(f"converged profile has negative values down to {np.min(w):.3e}")
    w = np.maximum(w, 0.0)
    return SteadyProfile(x_nodes=x, values=w, residual_norm=res_norm, subcritical=False)


def ode_upper_v(t: np.ndarray | float, b: float, v0_sup: float) -> np.ndarray | float:
    """Solution of the logistic ODE v' = v (b - v) started at the prey sup-norm.

    This bounds the prey field from above uniformly in space.  Evaluated in
    the overflow-safe form b / (1 + exp(-b t) * (b / v0 - 1)).
    """
    if b <= 0 or v0_sup <= 0:
        raise ValidationError("b and v0_sup must be positive")
    t_arr = np.asarray(t, dtype=float)
    out = b / (1.0 + np.exp(-b * t_arr) * (b / v0_sup - 1.0))
    return float(out) if np.isscalar(t) else out
