"""Steady logistic BVP solver against shooting and ODE oracles."""

import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from stefanpp import (
    LogisticBVP,
    ValidationError,
    existence_threshold,
    ode_upper_v,
    solve_bvp,
)


class TestExistenceThreshold:
    def test_reference_values(self):
        assert existence_threshold(1.0, 1.0) == pytest.approx(math.pi / 2, rel=1e-15)
        assert existence_threshold(4.0, 1.0) == pytest.approx(math.pi, rel=1e-15)

    def test_matches_eigenvalue_sign_change(self):
        # beta - d (pi / (2 l))^2 vanishes exactly at the threshold length.
        for d, beta in [(1.0, 1.0), (2.0, 3.0), (0.3, 1.7)]:
            l_crit = existence_threshold(d, beta)
            assert beta - d * (0.5 * math.pi / l_crit) ** 2 == pytest.approx(0.0, abs=1e-14)

    def test_positive_inputs_required(self):
        with pytest.raises(ValidationError):
            existence_threshold(0.0, 1.0)


def shooting_min_terminal(d, beta, theta, l, n_shots=60):
    """Independent oracle: smallest terminal value w(l) over shooting slopes.

    Integrates w'' = -w (beta - theta w)/d from w(-l) = 0, w'(-l) = s.  If a
    positive profile with w(l) = 0 existed, some slope would bring the
    terminal value (or the running minimum) to zero.
    """

    def rhs(x, y):
        return [y[1], -y[0] * (beta - theta * y[0]) / d]

    worst = math.inf
    for s in np.geomspace(1e-4, 10.0, n_shots):
        sol = solve_ivp(rhs, (-l, l), [0.0, s], rtol=1e-10, atol=1e-12, dense_output=True)
        xs = np.linspace(-l, l, 400)
        w = sol.sol(xs)[0]
        worst = min(worst, float(np.min(w[xs > -l + 1e-9])))
    return worst


class TestSolveBVP:
    def test_constant_fixed_point_exact(self):
        for beta, theta in [(1.0, 1.0), (3.0, 1.5)]:
            prob = LogisticBVP(d=1.0, beta=beta, theta=theta, l=2.0, k=beta / theta)
            prof = solve_bvp(prob, n=129)
            assert prof.residual_norm < 1e-12
            assert np.max(np.abs(prof.values - beta / theta)) < 1e-12
            assert not prof.subcritical

    def test_subcritical_collapse_confirmed_by_shooting(self):
        l = math.pi / 4  # below the pi/2 threshold at d = beta = 1
        prof = solve_bvp(LogisticBVP(d=1.0, beta=1.0, theta=1.0, l=l), n=129)
        assert prof.subcritical
        assert np.all(prof.values == 0.0)
        assert shooting_min_terminal(1.0, 1.0, 1.0, l) > 0.0

    def test_supercritical_positive_profile(self):
        prof = solve_bvp(LogisticBVP(d=1.0, beta=1.0, theta=1.0, l=1.6), n=257)
        assert not prof.subcritical
        assert float(np.max(prof.values)) > 0.01
        assert prof.residual_norm <= 1e-12

    def test_long_interval_reaches_carrying_capacity(self):
        prof = solve_bvp(LogisticBVP(d=1.0, beta=1.0, theta=1.0, l=20.0), n=1025)
        center = prof.values[prof.values.size // 2]
        assert center == pytest.approx(1.0, rel=0.01)

    def test_monotone_in_interval_length(self):
        xs = np.linspace(-1.8, 1.8, 41)
        prev = None
        for l in (2.0, 3.0, 5.0):
            prof = solve_bvp(LogisticBVP(d=1.0, beta=1.0, theta=1.0, l=l), n=513)
            vals = np.interp(xs, prof.x_nodes, prof.values)
            if prev is not None:
                assert np.all(vals >= prev - 1e-8)
            prev = vals

    def test_boundary_value_brackets(self):
        beta, theta = 1.0, 1.0
        prof_hi = solve_bvp(LogisticBVP(d=1.0, beta=beta, theta=theta, l=3.0, k=2.5), n=257)
        assert np.all(prof_hi.values >= beta / theta - 1e-10)
        assert np.all(prof_hi.values <= 2.5 + 1e-10)
        prof_lo = solve_bvp(LogisticBVP(d=1.0, beta=beta, theta=theta, l=30.0, k=0.3), n=2049)
        assert np.all(prof_lo.values <= max(0.3, beta / theta) + 1e-10)
        center = prof_lo.values[prof_lo.values.size // 2]
        assert center == pytest.approx(beta / theta, rel=0.01)

    def test_truncation_error_second_order(self):
        # Restrict a fine converged profile to a coarse grid and apply the
        # coarse operator: the defect is the truncation error, O(dx^2).
        prob = LogisticBVP(d=1.0, beta=1.0, theta=1.0, l=2.0)
        fine = solve_bvp(prob, n=1025, tol=1e-13)

        def coarse_defect(stride):
            x = fine.x_nodes[::stride]
            w = fine.values[::stride]
            dx = x[1] - x[0]
            lap = (w[:-2] - 2 * w[1:-1] + w[2:]) / dx**2
            return float(np.max(np.abs(prob.d * lap + w[1:-1] * (prob.beta - prob.theta * w[1:-1]))))

        d_coarse, d_fine = coarse_defect(16), coarse_defect(8)
        assert d_coarse / d_fine == pytest.approx(4.0, rel=0.25)

    def test_node_floor(self):
        with pytest.raises(ValidationError):
            solve_bvp(LogisticBVP(d=1.0, beta=1.0, theta=1.0, l=2.0), n=32)


class TestOdeUpperV:
    def test_initial_and_limit(self):
        assert ode_upper_v(0.0, b=2.0, v0_sup=0.7) == pytest.approx(0.7, rel=1e-14)
        b = 2.0
        assert abs(ode_upper_v(50.0 / b, b=b, v0_sup=0.7) - b) < 1e-10 * b

    @pytest.mark.parametrize("b,v0", [(1.0, 0.2), (3.0, 5.0), (0.5, 0.5)])
    def test_matches_high_order_integration(self, b, v0):
        ts = np.linspace(0.0, 10.0 / b, 33)
        sol = solve_ivp(
            lambda t, v: v * (b - v), (0.0, ts[-1]), [v0], t_eval=ts, rtol=1e-11, atol=1e-13
        )
        assert np.max(np.abs(sol.y[0] - ode_upper_v(ts, b, v0))) < 1e-8

    def test_positive_inputs_required(self):
        with pytest.raises(ValidationError):
            ode_upper_v(1.0, b=-1.0, v0_sup=1.0)
