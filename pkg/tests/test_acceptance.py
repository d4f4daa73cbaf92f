"""Acceptance suite: every criterion at its stated tolerance.

Each test prints one PASS/FAIL line (bypassing capture so the lines are
visible in a plain ``pytest -v`` log) and then asserts.  The four named
presets are shared across criteria through module-scoped fixtures.
"""

import hashlib
import math
import sys
from dataclasses import replace

import numpy as np
import pytest

from stefanpp import (
    LogisticBVP,
    ModelParams,
    NumericsConfig,
    StopRules,
    build_supersolution,
    check_domination,
    classify,
    estimate_mu_star,
    existence_threshold,
    lambda_threshold,
    limit_iteration,
    mu_upper_bound,
    run,
    simulate,
    solve_bvp,
    spreading_limits,
)
from stefanpp.presets import preset_config
from stefanpp.profiles import sample_u0, sample_v0


def announce(criterion: str, ok: bool, detail: str) -> None:
    line = f"ACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'} ({detail})"
    print(line)
    if sys.stdout is not sys.__stdout__:  # also reach the live terminal under capture
        print(line, file=sys.__stdout__)
    assert ok, line


def run_preset(name: str):
    cfg = preset_config(name)
    p = cfg.model
    num = cfg.numerics.resolve(p)
    sgrid, lgrid = num.grids()
    u0 = sample_u0(cfg.u0, p, sgrid)
    v0 = sample_v0(cfg.v0, lgrid)
    result = simulate(p, u0, v0, num, stop=cfg.stop)
    return cfg, u0, v0, result


@pytest.fixture(scope="module")
def preset3():
    return run_preset("spreading-weak")


@pytest.fixture(scope="module")
def preset4():
    return run_preset("vanishing")


@pytest.fixture(scope="module")
def preset5():
    return run_preset("spreading-by-mu")


@pytest.fixture(scope="module")
def preset6():
    return run_preset("strong-hunting")


def center_values(result):
    snap = result.snapshots[-1]
    mid = result.lgrid.n_x // 2
    return float(snap.u[mid]), float(snap.v[mid])


def test_criterion_01_threshold_constants():
    rng = np.random.default_rng(2026)
    worst = 0.0
    for _ in range(100):
        a, b = rng.uniform(0.1, 5.0, size=2)
        d, beta = rng.uniform(0.1, 5.0, size=2)
        h0 = rng.uniform(0.05, 2.0)
        mu = rng.uniform(0.05, 5.0)
        p = ModelParams(a=a, b=b, c=0.5 * min(b, 1.0 / a) * rng.uniform(0.1, 0.9), D=d, mu=mu, h0=h0)
        lam = lambda_threshold(p)
        worst = max(worst, abs(lam - math.pi / math.sqrt(1.0 + a * b)) / lam)
        lc = existence_threshold(d, beta)
        worst = max(worst, abs(lc - 0.5 * math.pi * math.sqrt(d / beta)) / lc)
        # sign change of the principal eigenvalue at the threshold length
        worst = max(worst, abs(beta - d * (0.5 * math.pi / lc) ** 2) / beta)
        u_star, v_star = spreading_limits(p)
        worst = max(worst, abs(u_star - (1 + p.a * p.b) / (1 + p.a * p.c)) / u_star)
        worst = max(worst, abs(v_star - (p.b - p.c) / (1 + p.a * p.c)) / max(v_star, 1e-30))
        it = limit_iteration(p)
        worst = max(worst, abs(it.over_v[-1] - v_star) / max(v_star, 1.0))
        worst = max(worst, abs(it.under_u[-1] - u_star) / u_star)
    announce("01 threshold-constants", worst <= 1e-12, f"worst rel err {worst:.2e}")


def test_criterion_02_limit_iteration_contraction():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(10):
        b = rng.uniform(1.0, 4.0)
        c = rng.uniform(0.2, 0.8) * b
        a = rng.uniform(0.2, 0.9) / c
        p = ModelParams(a=a, b=b, c=c, D=1.0, mu=1.0, h0=0.5)
        q2 = (a * c) ** 2
        _, v_star = spreading_limits(p)
        it = limit_iteration(p, n_rounds=12, gap_tol=0.0)
        for seq in (it.over_v, it.under_v):
            err = np.abs(seq - v_star)
            usable = err > 1e-9  # above float noise
            ratios = err[1:][usable[1:] & usable[:-1]] / err[:-1][usable[1:] & usable[:-1]]
            worst = max(worst, float(np.max(np.abs(ratios / q2 - 1.0))))
    announce("02 limit-iteration-contraction", worst <= 0.05, f"worst ratio dev {worst:.2e}")


def test_criterion_03_guaranteed_spreading(preset3):
    cfg, _, _, res = preset3
    verdict = classify(res, trail_window=cfg.stop.trail_window)
    u_star, v_star = spreading_limits(cfg.model)
    assert (u_star, v_star) == (8.0 / 3.0, 5.0 / 3.0)
    u_c, v_c = center_values(res)
    ok = (
        verdict.kind == "Spreading"
        and abs(u_c - u_star) <= 0.02 * u_star
        and abs(v_c - v_star) <= 0.02 * v_star
    )
    announce(
        "03 guaranteed-spreading",
        ok,
        f"verdict {verdict.kind}, center u dev {abs(u_c - u_star) / u_star:.2e}, "
        f"v dev {abs(v_c - v_star) / v_star:.2e}",
    )


def test_criterion_04_guaranteed_vanishing(preset4):
    cfg, u0, v0, res = preset4
    p = cfg.model
    verdict = classify(res, trail_window=cfg.stop.trail_window)
    lam = lambda_threshold(p)
    dx = res.lgrid.dx
    sup = build_supersolution(p, p.h0 * res.sgrid.y_nodes, u0, v0)
    assert p.mu == pytest.approx(0.5 * sup.mu0, rel=1e-12)
    dom = check_domination(res, sup)
    snap = res.snapshots[-1]
    window = np.abs(res.lgrid.x_nodes) <= 1.0
    prey_dev = float(np.max(np.abs(snap.v[window] - p.b))) / p.b
    ok = (
        verdict.kind == "Vanishing"
        and float(res.span[-1]) <= lam + 2 * dx
        and float(res.sup_u[-1]) <= 1e-4
        and prey_dev <= 0.01
        and dom.ok
        and dom.worst_front_margin >= 0.0
        and dom.worst_u_margin >= 0.0
    )
    announce(
        "04 guaranteed-vanishing",
        ok,
        f"verdict {verdict.kind}, span {res.span[-1]:.4f} <= {lam + 2 * dx:.4f}, "
        f"sup_u {res.sup_u[-1]:.2e}, prey dev {prey_dev:.2e}, "
        f"margins ({dom.worst_front_margin:.3e}, {dom.worst_u_margin:.3e})",
    )


def test_criterion_05_spreading_by_large_mu(preset5):
    cfg, _, _, res = preset5
    p = cfg.model
    verdict = classify(res, trail_window=cfg.stop.trail_window)
    # For the unit cosine bump the weighted-mass integral is 4 h0^2 / pi,
    # so the criterion evaluates to pi (pi^2 - 4 h0^2) / (8 h0^2).
    analytic = math.pi * (math.pi**2 - 4 * p.h0**2) / (8.0 * p.h0**2)
    ok = verdict.kind == "Spreading" and p.mu == pytest.approx(1.5 * analytic, rel=1e-6)
    announce(
        "05 spreading-by-large-mu",
        ok,
        f"verdict {verdict.kind}, mu {p.mu:.4f} vs 1.5 * {analytic:.4f}",
    )


def test_criterion_06_strong_hunting(preset6):
    cfg, _, _, res = preset6
    verdict = classify(res, trail_window=cfg.stop.trail_window)
    assert spreading_limits(cfg.model) == (1.0, 0.0)
    snap = res.snapshots[-1]
    window = np.abs(res.lgrid.x_nodes) <= 1.0
    u_dev = float(np.max(np.abs(snap.u[window] - 1.0)))
    v_max = float(np.max(snap.v[window]))
    ok = verdict.kind == "Spreading" and u_dev <= 0.02 and v_max <= 0.02
    announce(
        "06 strong-hunting",
        ok,
        f"verdict {verdict.kind}, |u-1| {u_dev:.2e}, v {v_max:.2e}",
    )


def test_criterion_07a_mu_monotone_fronts():
    rng = np.random.default_rng(41)
    worst = -math.inf
    for _ in range(5):
        b = rng.uniform(1.5, 4.0)
        c = rng.uniform(0.2, 0.8) * b
        a = rng.uniform(0.2, 0.9) / c
        h0 = rng.uniform(0.3, 0.9)
        mu1 = rng.uniform(0.1, 0.6)
        mu2 = mu1 + rng.uniform(0.1, 0.6)
        base = ModelParams(a=a, b=b, c=c, D=1.0, mu=mu1, h0=h0)
        cfg = NumericsConfig(dt=2e-3, n_y=64, t_max=8.0, L=40.0).resolve(base)
        sgrid, lgrid = cfg.grids()
        u0 = np.cos(0.5 * np.pi * sgrid.y_nodes)
        v0 = np.full(lgrid.n_x, b)
        res1 = simulate(base, u0, v0, cfg, stop=StopRules(enabled=False))
        res2 = simulate(replace(base, mu=mu2), u0, v0, cfg, stop=StopRules(enabled=False))
        slack = 2.0 * lgrid.dx
        worst = max(worst, float(np.max(res1.h - res2.h)), float(np.max(res2.g - res1.g)))
        assert np.all(res1.h <= res2.h + slack)
        assert np.all(res1.g >= res2.g - slack)
    announce("07a mu-monotonicity", True, f"worst ordering excess {worst:.2e} (slack 2 dx)")


def test_criterion_07b_threshold_bracket():
    p = ModelParams(a=1.0, b=3.0, c=0.5, D=1.0, mu=1.0, h0=0.3)
    cfg = NumericsConfig(dt=1e-3, n_y=128, t_max=40.0).resolve(p)
    sgrid, lgrid = cfg.grids()
    u0 = np.cos(0.5 * np.pi * sgrid.y_nodes)
    v0 = np.full(lgrid.n_x, 3.0)
    sup = build_supersolution(p, p.h0 * sgrid.y_nodes, u0, v0)
    mu_up = mu_upper_bound(p, p.h0 * sgrid.y_nodes, u0)
    bracket = estimate_mu_star(p, u0, v0, (sup.mu0, mu_up), n_bisect=8, cfg=cfg)
    width_bound = (mu_up - sup.mu0) / 2**8
    vanished = [pr.mu for pr in bracket.probes if pr.kind == "Vanishing"]
    spread = [pr.mu for pr in bracket.probes if pr.kind == "Spreading"]
    consistent = max(vanished) < min(spread) if vanished and spread else False
    ok = bracket.width <= width_bound * (1 + 1e-12) and consistent
    announce(
        "07b threshold-bracket",
        ok,
        f"bracket [{bracket.lo:.4f}, {bracket.hi:.4f}], width {bracket.width:.4f} "
        f"<= {width_bound:.4f}, probes ordered {consistent}, "
        f"near-threshold {len(bracket.near_threshold)}",
    )


def test_criterion_08_steady_state_oracle():
    sub = solve_bvp(LogisticBVP(d=1.0, beta=1.0, theta=1.0, l=1.4), n=257)
    sup = solve_bvp(LogisticBVP(d=1.0, beta=1.0, theta=1.0, l=1.6), n=257)
    wide = solve_bvp(LogisticBVP(d=1.0, beta=1.0, theta=1.0, l=20.0), n=1025)
    const = solve_bvp(LogisticBVP(d=1.0, beta=1.0, theta=1.0, l=3.0, k=1.0), n=257)
    center = wide.values[wide.values.size // 2]
    const_dev = float(np.max(np.abs(const.values - 1.0)))
    ok = (
        sub.subcritical
        and not sup.subcritical
        and float(np.max(sup.values)) > 0.0
        and abs(center - 1.0) <= 0.01
        and const.residual_norm < 1e-12
        and const_dev < 1e-12
    )
    announce(
        "08 steady-state-oracle",
        ok,
        f"l=1.4 subcritical {sub.subcritical}, l=1.6 max {np.max(sup.values):.3f}, "
        f"l=20 center dev {abs(center - 1.0):.2e}, constant residual {const.residual_norm:.2e}",
    )


def test_criterion_09_symmetry_and_bounds(preset3, preset4, preset5, preset6):
    worst_sym = 0.0
    worst_over = 0.0
    for cfg, _, _, res in (preset3, preset4, preset5, preset6):
        worst_sym = max(worst_sym, float(np.max(np.abs(res.g + res.h) / res.h)))
        worst_over = max(
            worst_over, res.diagnostics["overshoot_w"], res.diagnostics["overshoot_z"]
        )
        assert np.max(res.sup_u) <= res.bound_u + res.cfg.tol_bounds
    tol_bounds = preset3[3].cfg.tol_bounds
    ok = worst_sym < 1e-6 and worst_over <= tol_bounds
    announce(
        "09 symmetry-and-bounds",
        ok,
        f"worst |g+h|/h {worst_sym:.2e}, worst box overshoot {worst_over:.2e}",
    )


def test_criterion_10_grid_convergence():
    p = preset_config("spreading-weak").model
    h_end = []
    for lvl in range(3):
        cfg = NumericsConfig(
            dt=2.5e-3 / 2**lvl,
            n_y=(128 + 1) * 2**lvl - 1,
            n_x=1600 * 2**lvl + 1,
            L=20.0,
            t_max=20.0,
        ).resolve(p)
        sgrid, lgrid = cfg.grids()
        u0 = np.cos(0.5 * np.pi * sgrid.y_nodes)
        v0 = np.full(lgrid.n_x, 3.0)
        res = simulate(p, u0, v0, cfg, stop=StopRules(enabled=False))
        h_end.append(float(res.h[-1]))
    d01 = abs(h_end[0] - h_end[1])
    d12 = abs(h_end[1] - h_end[2])
    ratio = d01 / d12
    announce(
        "10 grid-convergence",
        ratio >= 1.8,
        f"h(20) = {h_end}, increment ratio {ratio:.2f} >= 1.8",
    )


def test_criterion_11_determinism(tmp_path):
    cfg = preset_config("vanishing")
    cfg = replace(cfg, numerics=replace(cfg.numerics, t_max=6.0))

    def hashes(out):
        return {
            str(f.relative_to(out)): hashlib.sha256(f.read_bytes()).hexdigest()
            for f in sorted(out.rglob("*"))
            if f.is_file()
        }

    h1 = hashes(run(cfg, out_dir=tmp_path / "a"))
    h2 = hashes(run(cfg, out_dir=tmp_path / "b"))
    kinds = {f.rsplit(".", 1)[-1] for f in h1}
    ok = h1 == h2 and {"csv", "json", "svg"} <= kinds
    announce("11 determinism", ok, f"{len(h1)} artifacts byte-identical ({sorted(kinds)})")
