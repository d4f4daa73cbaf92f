"""Stepping scheme: flux stencils, decoupled limits, invariants, monotonicity."""

import math

import numpy as np
import pytest

from stefanpp import (
    FieldState,
    FrontState,
    FrontBreachError,
    ModelParams,
    NumericsConfig,
    SolverError,
    StopRules,
    StraightGrid,
    ValidationError,
    boundary_flux,
    ode_upper_v,
    simulate,
    step,
)


def cosine_ic(cfg, p, v_const):
    sg, lg = cfg.grids()
    return np.cos(0.5 * np.pi * sg.y_nodes), np.full(lg.n_x, v_const)


class TestBoundaryFlux:
    def test_quadratic_exact_under_3_point_stencil(self):
        sg = StraightGrid(64)
        w = 1.0 - sg.y_nodes**2
        fr = FrontState(-1.0, 1.0)
        assert boundary_flux(w, fr, "right", sg, order=2) == pytest.approx(-2.0, rel=1e-12)
        assert boundary_flux(w, fr, "left", sg, order=2) == pytest.approx(2.0, rel=1e-12)

    def test_zero_field_zero_flux(self):
        sg = StraightGrid(32)
        w = np.zeros(sg.y_nodes.size)
        assert boundary_flux(w, FrontState(-1.0, 1.0), "right", sg) == 0.0

    def test_stretched_cosine_value(self):
        # u_x at the right front of the cosine on [-2, 2] is -pi/4.
        fr = FrontState(-2.0, 2.0)
        sg = StraightGrid(256)
        w = np.cos(0.5 * math.pi * sg.y_nodes)
        assert boundary_flux(w, fr, "right", sg, order=3) == pytest.approx(-math.pi / 4, rel=1e-6)
        assert boundary_flux(w, fr, "right", sg, order=2) == pytest.approx(-math.pi / 4, rel=1e-3)

    @pytest.mark.parametrize("order,expected_rate", [(2, 4.0), (3, 8.0)])
    def test_stencil_convergence_rates(self, order, expected_rate):
        # Exponential profile: all derivatives nonzero at the boundary, so
        # the stencil error contracts at exactly 2^order per grid halving.
        fr = FrontState(-1.0, 1.0)
        exact = math.e

        def err(n_y):
            sg = StraightGrid(n_y)
            w = np.exp(sg.y_nodes)
            return abs(boundary_flux(w, fr, "right", sg, order=order) - exact)

        e1, e2 = err(64), err(129)
        assert e1 / e2 == pytest.approx(expected_rate, rel=0.2)

    def test_side_validation(self):
        sg = StraightGrid(32)
        with pytest.raises(ValidationError):
            boundary_flux(np.zeros(34), FrontState(-1, 1), "top", sg)


class TestStepDecoupledLimits:
    def test_zero_predator_fronts_frozen_prey_logistic(self):
        p = ModelParams(a=1.0, b=3.0, c=0.5, D=1.0, mu=2.0, h0=0.5)
        cfg = NumericsConfig(dt=5e-3, n_y=32, t_max=1.0, L=10.0, n_x=201).resolve(p)
        sg, lg = cfg.grids()
        state = FieldState(
            t=0.0,
            w=np.zeros(sg.y_nodes.size),
            z=np.full(lg.n_x, 0.5),
            front=FrontState(-p.h0, p.h0),
        )
        deviations = []
        for _ in range(400):
            state = step(state, p, cfg)
            deviations.append(float(np.max(np.abs(state.z - p.b))))
        assert state.front.g == -p.h0 and state.front.h == p.h0
        assert np.all(state.w == 0.0)
        # With no predator the prey follows the spatially flat logistic law,
        # relaxing monotonically toward the carrying capacity.
        expected = ode_upper_v(state.t, p.b, 0.5)
        assert np.max(np.abs(state.z - expected)) < 2e-3
        assert np.max(state.z) < p.b
        assert np.all(np.diff(deviations) <= 0.0)

    def test_prey_at_capacity_stays_exact_when_uncoupled(self):
        p = ModelParams(a=1.0, b=3.0, c=1e-300, D=1.0, mu=0.5, h0=0.5)
        cfg = NumericsConfig(dt=2e-3, n_y=48, t_max=0.5, L=10.0, n_x=201).resolve(p)
        u0, v0 = cosine_ic(cfg, p, p.b)
        res = simulate(p, u0, v0, cfg, stop=StopRules(enabled=False))
        assert np.max(np.abs(res.final.z - p.b)) < 1e-12
        assert res.h[-1] > p.h0  # the predator still expands on its own


@pytest.fixture(scope="module")
def short_run():
    p = ModelParams(a=1.0, b=3.0, c=0.5, D=1.0, mu=1.0, h0=0.8)
    cfg = NumericsConfig(dt=2e-3, n_y=64, t_max=3.0, L=20.0, snapshot_dt=1.0).resolve(p)
    u0, v0 = cosine_ic(cfg, p, 3.0)
    return p, cfg, simulate(p, u0, v0, cfg, stop=StopRules(enabled=False))


class TestSimulateInvariants:

    def test_monotone_fronts(self, short_run):
        _, _, res = short_run
        assert np.all(np.diff(res.h) >= 0.0)
        assert np.all(np.diff(res.g) <= 0.0)

    def test_sup_bounds_hold(self, short_run):
        p, cfg, res = short_run
        assert res.bound_v == 3.0
        assert res.bound_u == 4.0
        assert np.max(res.sup_u) <= res.bound_u + cfg.tol_bounds
        assert res.diagnostics["overshoot_w"] <= cfg.tol_bounds
        assert res.diagnostics["overshoot_z"] <= cfg.tol_bounds
        assert np.min(res.final.z) > 0.0

    def test_symmetric_data_keeps_symmetric_fronts(self, short_run):
        _, _, res = short_run
        assert np.max(np.abs(res.g + res.h)) < 1e-8 * res.h[-1]

    def test_initial_velocities_from_stefan_condition(self, short_run):
        p, _, res = short_run
        expected = p.mu * math.pi / (2.0 * p.h0)
        assert res.h_dot[0] == pytest.approx(expected, rel=1e-4)
        assert res.g_dot[0] == pytest.approx(-expected, rel=1e-4)

    def test_pinned_endpoints_and_positive_fields(self, short_run):
        _, _, res = short_run
        assert res.final.w[0] == 0.0 and res.final.w[-1] == 0.0
        assert np.min(res.final.w) >= 0.0

    def test_snapshot_cadence(self, short_run):
        _, _, res = short_run
        times = [s.t for s in res.snapshots]
        assert times[0] == 0.0 and times[-1] == pytest.approx(3.0)
        assert len(times) == 4

    def test_result_arrays_immutable(self, short_run):
        _, _, res = short_run
        with pytest.raises(ValueError):
            res.h[0] = 42.0


class TestMuMonotonicity:
    def test_front_ordering_in_mu(self):
        base = dict(a=1.0, b=3.0, c=0.5, D=1.0, h0=0.6)
        cfg = NumericsConfig(dt=2e-3, n_y=64, t_max=4.0, L=25.0)
        runs = {}
        for mu in (0.3, 0.9):
            p = ModelParams(mu=mu, **base)
            c = cfg.resolve(p)
            u0, v0 = cosine_ic(c, p, 3.0)
            runs[mu] = simulate(p, u0, v0, c, stop=StopRules(enabled=False))
        dx = runs[0.3].lgrid.dx
        assert np.all(runs[0.3].h <= runs[0.9].h + 2 * dx)
        assert np.all(runs[0.3].g >= runs[0.9].g - 2 * dx)


class TestFailureModes:
    def test_validation_of_initial_data(self):
        p = ModelParams(a=1.0, b=3.0, c=0.5, D=1.0, mu=1.0, h0=0.5)
        cfg = NumericsConfig(dt=1e-3, n_y=32, t_max=1.0, L=10.0, n_x=201).resolve(p)
        sg, lg = cfg.grids()
        good_u = np.cos(0.5 * np.pi * sg.y_nodes)
        good_v = np.full(lg.n_x, 1.0)
        bad_u = good_u + 0.1  # endpoints not pinned
        with pytest.raises(ValidationError, match="vanish"):
            simulate(p, bad_u, good_v, cfg)
        with pytest.raises(ValidationError, match="positive"):
            simulate(p, good_u, 0.0 * good_v, cfg)
        with pytest.raises(ValidationError, match="nodes"):
            simulate(p, good_u[:-1], good_v, cfg)

    def test_front_breach_raises_with_advice(self):
        p = ModelParams(a=1.0, b=3.0, c=0.5, D=1.0, mu=2.0, h0=0.8)
        cfg = NumericsConfig(dt=2e-3, n_y=48, t_max=50.0, L=2.0, n_x=161).resolve(p)
        u0, v0 = cosine_ic(cfg, p, 3.0)
        with pytest.raises(FrontBreachError, match="rerun with L"):
            simulate(p, u0, v0, cfg, stop=StopRules(enabled=False))

    def test_violent_transient_handled_by_substep_ladder(self):
        p = ModelParams(a=1.0, b=3.0, c=0.5, D=1.0, mu=60.0, h0=0.3)
        cfg = NumericsConfig(dt=1e-3, n_y=64, t_max=0.2, L=20.0).resolve(p)
        u0, v0 = cosine_ic(cfg, p, 3.0)
        res = simulate(p, u0, v0, cfg, stop=StopRules(enabled=False))
        assert res.diagnostics["max_substeps"] > 1
        assert res.diagnostics["retries"] >= 1
        assert np.min(res.final.w) >= 0.0

    def test_hopeless_step_aborts_after_ladder(self):
        p = ModelParams(a=1.0, b=3.0, c=0.5, D=1.0, mu=1.0, h0=0.5)
        cfg = NumericsConfig(dt=50.0, n_y=32, t_max=50.0, L=10.0, n_x=201).resolve(p)
        u0, v0 = cosine_ic(cfg, p, 3.0)
        with pytest.raises(SolverError, match="halvings"):
            simulate(p, u0, v0, cfg, stop=StopRules(enabled=False))


class TestMethodOfLinesOracle:
    def test_short_horizon_matches_independent_time_integrator(self):
        # Same spatial discretization, independent time integration: the
        # coupled system (w interior, z, g, h) as a stiff ODE solved by an
        # adaptive high-order integrator.  The production splitting is
        # first order in dt, so agreement at O(dt) validates the Stefan
        # update ordering, the coupling interpolations, and both solves.
        from scipy.integrate import solve_ivp

        from stefanpp.grids import interp_pred_to_line, interp_prey_to_straight, transform_coefficients

        p = ModelParams(a=1.0, b=3.0, c=0.5, D=1.0, mu=0.8, h0=0.6)

        def run_at(dt):
            cfg = NumericsConfig(dt=dt, n_y=48, n_x=401, L=10.0, t_max=0.5).resolve(p)
            sgrid, lgrid = cfg.grids()
            u0 = np.cos(0.5 * np.pi * sgrid.y_nodes)
            v0 = np.full(lgrid.n_x, 3.0)
            return simulate(p, u0, v0, cfg, stop=StopRules(enabled=False)), cfg

        res, cfg = run_at(5e-4)
        res_half, _ = run_at(2.5e-4)
        sgrid, lgrid = cfg.grids()
        u0 = np.cos(0.5 * np.pi * sgrid.y_nodes)
        v0 = np.full(lgrid.n_x, 3.0)

        n_int = cfg.n_y
        dy = sgrid.dy
        dx = lgrid.dx

        def rhs(t, y):
            w = np.zeros(n_int + 2)
            w[1:-1] = y[:n_int]
            z = y[n_int:-2]
            g, h = y[-2], y[-1]
            front = FrontState(g, h)
            ux_l = boundary_flux(w, front, "left", sgrid, cfg.front_stencil_order)
            ux_r = boundary_flux(w, front, "right", sgrid, cfg.front_stencil_order)
            g_dot = min(-p.mu * ux_l, 0.0)
            h_dot = max(-p.mu * ux_r, 0.0)
            moving = FrontState(g, h, g_dot, h_dot)
            phi, psi = transform_coefficients(moving)
            z_on_w = interp_prey_to_straight(z, moving, sgrid, lgrid)[1:-1]
            w_int = w[1:-1]
            lap_w = (w[:-2] - 2 * w[1:-1] + w[2:]) / dy**2
            adv_w = psi(sgrid.y_nodes[1:-1]) * (w[2:] - w[:-2]) / (2 * dy)
            dw = phi * lap_w + adv_w + w_int * (1 - w_int + p.a * z_on_w)
            u_on_z = interp_pred_to_line(w, moving, sgrid, lgrid)
            lap_z = np.empty_like(z)
            lap_z[1:-1] = (z[:-2] - 2 * z[1:-1] + z[2:]) / dx**2
            lap_z[0] = 2 * (z[1] - z[0]) / dx**2
            lap_z[-1] = 2 * (z[-2] - z[-1]) / dx**2
            dz = p.D * lap_z + z * (p.b - z - p.c * u_on_z)
            return np.concatenate([dw, dz, [g_dot, h_dot]])

        y0 = np.concatenate([u0[1:-1], v0, [-p.h0, p.h0]])
        sol = solve_ivp(rhs, (0.0, 0.5), y0, method="LSODA", rtol=1e-9, atol=1e-11)
        assert sol.success
        g_ref, h_ref = sol.y[-2, -1], sol.y[-1, -1]
        w_ref = sol.y[:n_int, -1]
        z_ref = sol.y[n_int:-2, -1]
        assert res.h[-1] == pytest.approx(h_ref, abs=1.5e-3)
        assert res.g[-1] == pytest.approx(g_ref, abs=1.5e-3)
        assert np.max(np.abs(res.final.w[1:-1] - w_ref)) < 4e-3
        assert np.max(np.abs(res.final.z - z_ref)) < 1e-3
        # Halving dt halves the defect against the reference: clean first
        # order in time for the splitting.
        ratio = abs(res.h[-1] - h_ref) / abs(res_half.h[-1] - h_ref)
        assert ratio == pytest.approx(2.0, rel=0.2)


class TestGridConvergence:
    def test_front_position_converges(self):
        p = ModelParams(a=1.0, b=3.0, c=0.5, D=1.0, mu=0.4, h0=0.6)
        h_end = []
        for lvl in range(3):
            cfg = NumericsConfig(
                dt=4e-3 / 2**lvl,
                n_y=(48 + 1) * 2**lvl - 1,
                n_x=800 * 2**lvl + 1,
                L=10.0,
                t_max=3.0,
            ).resolve(p)
            u0, v0 = cosine_ic(cfg, p, 3.0)
            res = simulate(p, u0, v0, cfg, stop=StopRules(enabled=False))
            h_end.append(res.h[-1])
        d01 = abs(h_end[0] - h_end[1])
        d12 = abs(h_end[1] - h_end[2])
        assert d01 / d12 >= 1.8


class TestNumericsConfig:
    def test_resolution_defaults(self):
        p = ModelParams(a=1.0, b=3.0, c=0.5, D=1.0, mu=1.0, h0=0.5)
        cfg = NumericsConfig().resolve(p)
        assert cfg.L == 20.0  # max(10 h0, 4 Lambda, 20)
        assert cfg.n_x % 2 == 1
        sg, lg = cfg.grids()
        assert lg.dx <= 0.025 + 1e-12

    def test_cfl_guard_formula(self):
        p = ModelParams(a=1.0, b=3.0, c=0.5, D=1.0, mu=1.0, h0=0.8)
        cfg = NumericsConfig(n_y=128)
        dy = 2.0 / 129.0
        assert cfg.cfl_guard(p) == pytest.approx(dy**2 * (2 * 0.8) ** 2 / 8.0, rel=1e-14)

    def test_unresolved_grids_rejected(self):
        with pytest.raises(ValidationError, match="resolve"):
            NumericsConfig().grids()

    def test_basic_validation(self):
        with pytest.raises(ValidationError):
            NumericsConfig(dt=-1.0)
        with pytest.raises(ValidationError):
            NumericsConfig(front_stencil_order=4)
        with pytest.raises(ValidationError):
            NumericsConfig(n_y=16)
