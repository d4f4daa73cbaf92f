"""Mode orchestration and artifact persistence.

Every artifact is written atomically (temp file in the target directory,
then rename), numeric CSV cells carry 17 significant digits, and JSON is
emitted with sorted keys, so a killed run leaves no truncated file and
repeated runs of the same config produce byte-identical output.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import analysis, plots
from .config import RunConfig, SweepSpec
from .errors import OracleError, StefanPPError, ValidationError
from .model import lambda_threshold, limit_iteration, mu_upper_bound, spreading_limits
from .profiles import sample_u0, sample_v0
from .solver import simulate
from .steady import LogisticBVP, existence_threshold, solve_bvp

FRONTS_HEADER = "t,g,h,g_dot,h_dot,sup_u,probe_v"


def _atomic_write_text(path: Path, text: str) -> None:
    tmp = path.with_name(f".{path.name}.tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _atomic_savetxt(path: Path, rows: np.ndarray, header: str) -> None:
    tmp = path.with_name(f".{path.name}.tmp")
    np.savetxt(tmp, rows, delimiter=",", fmt="%.17g", header=header, comments="")
    os.replace(tmp, path)


def _write_json(path: Path, payload: dict) -> None:
    _atomic_write_text(path, json.dumps(_plain(payload), indent=2, sort_keys=True) + "\n")


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    return obj


def write_error_json(out_dir: Path, exc: BaseException) -> None:
    """Machine-readable failure record next to whatever was produced."""
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        _write_json(out_dir / "error.json", {"error": type(exc).__name__, "message": str(exc)})
    except OSError:
        pass


def resolve_out_dir(config: RunConfig, out_dir: str | Path | None, seedless: bool = False) -> Path:
    if seedless and config.outputs.timestamp_dir:
        raise ValidationError("--seedless forbids outputs.timestamp_dir (nondeterministic paths)")
    base = Path(out_dir) if out_dir is not None else Path(config.outputs.directory or "artifacts")
    if config.outputs.timestamp_dir:
        base = base / time.strftime("%Y%m%dT%H%M%S")
    return base


def _thresholds(config: RunConfig) -> dict:
    """Lambda always; the two mu criteria exactly when the habitat is subcritical."""
    p = config.model
    out: dict = {"lambda": lambda_threshold(p)}
    if 2.0 * p.h0 < out["lambda"]:
        cfg = config.numerics.resolve(p)
        sgrid, lgrid = cfg.grids()
        u0 = sample_u0(config.u0, p, sgrid)
        v0 = sample_v0(config.v0, lgrid)
        out["mu_upper"] = mu_upper_bound(p, p.h0 * sgrid.y_nodes, u0)
        sup = analysis.build_supersolution(p, p.h0 * sgrid.y_nodes, u0, v0)
        out["mu0"] = sup.mu0
    return out


def _params_dict(p) -> dict:
    return {k: getattr(p, k) for k in ("a", "b", "c", "D", "mu", "h0")}


def _write_fronts(out_dir: Path, result, stride: int) -> None:
    n = result.t.size
    idx = np.arange(0, n, stride)
    if idx[-1] != n - 1:
        idx = np.append(idx, n - 1)
    rows = np.column_stack(
        [arr[idx] for arr in (result.t, result.g, result.h, result.g_dot, result.h_dot, result.sup_u, result.probe_v)]
    )
    _atomic_savetxt(out_dir / "fronts.csv", rows, FRONTS_HEADER)


def _write_snapshots(out_dir: Path, result) -> None:
    snap_dir = out_dir / "snapshots"
    snap_dir.mkdir(parents=True, exist_ok=True)
    manifest = []
    for i, snap in enumerate(result.snapshots):
        rows = np.column_stack([result.lgrid.x_nodes, snap.u, snap.v])
        _atomic_savetxt(snap_dir / f"{i:04d}.csv", rows, "x,u,v")
        manifest.append((float(i), snap.t))
    _atomic_savetxt(snap_dir / "manifest.csv", np.asarray(manifest), "index,t")


def _run_simulate(config: RunConfig, out_dir: Path) -> dict:
    p = config.model
    cfg = config.numerics.resolve(p)
    sgrid, lgrid = cfg.grids()
    u0 = sample_u0(config.u0, p, sgrid)
    v0 = sample_v0(config.v0, lgrid)
    thresholds = {"lambda": lambda_threshold(p)}
    sup = None
    if 2.0 * p.h0 < thresholds["lambda"]:
        thresholds["mu_upper"] = mu_upper_bound(p, p.h0 * sgrid.y_nodes, u0)
        sup = analysis.build_supersolution(p, p.h0 * sgrid.y_nodes, u0, v0)
        thresholds["mu0"] = sup.mu0

    result = simulate(p, u0, v0, cfg, stop=config.stop)
    verdict = analysis.classify(result, trail_window=config.stop.trail_window)

    summary: dict = {
        "mode": "simulate",
        "params": _params_dict(p),
        "thresholds": thresholds,
        "verdict": {"kind": verdict.kind, "evidence": verdict.evidence, "t_decided": verdict.t_decided},
        "diagnostics": result.diagnostics,
        "t_end": result.t_end,
        "final_span": float(result.span[-1]),
    }
    if verdict.kind != analysis.UNDECIDED:
        report = analysis.verify_limits(result, verdict, tol=config.outputs.limit_tol)
        summary["limit_report"] = {
            "ok": report.ok,
            "regime": report.regime,
            "note": report.note,
            "checks": [
                {"name": c.name, "value": c.value, "target": c.target, "tol": c.tol, "ok": c.ok}
                for c in report.checks
            ],
        }

    domination_failed = None
    if config.outputs.check_domination:
        if sup is None:
            raise ValidationError(
                "outputs.check_domination requires a subcritical habitat (2 h0 < Lambda)"
            )
        dom = analysis.check_domination(result, sup)
        summary["domination"] = {
            "ok": dom.ok,
            "precondition_ok": dom.precondition_ok,
            "worst_front_margin": dom.worst_front_margin,
            "worst_u_margin": dom.worst_u_margin,
            "eps_grid": dom.eps_grid,
        }
        if not dom.ok:
            domination_failed = dom

    _write_fronts(out_dir, result, config.outputs.front_stride)
    _write_snapshots(out_dir, result)
    _write_json(out_dir / "summary.json", summary)
    if config.outputs.plots:
        plots.emit_plots(out_dir)
    if domination_failed is not None:
        raise OracleError(
            "barrier domination violated: worst front margin "
            f"{domination_failed.worst_front_margin:.3e}, worst field margin "
            f"{domination_failed.worst_u_margin:.3e} (eps_grid {domination_failed.eps_grid:.3e})"
        )
    return summary


def _run_bisect(config: RunConfig, out_dir: Path) -> dict:
    p = config.model
    cfg = config.numerics.resolve(p)
    sgrid, lgrid = cfg.grids()
    u0 = sample_u0(config.u0, p, sgrid)
    v0 = sample_v0(config.v0, lgrid)
    thresholds = {"lambda": lambda_threshold(p)}
    mu_lo = config.bisect.mu_lo
    mu_hi = config.bisect.mu_hi
    if 2.0 * p.h0 < thresholds["lambda"]:
        thresholds["mu_upper"] = mu_upper_bound(p, p.h0 * sgrid.y_nodes, u0)
        sup = analysis.build_supersolution(p, p.h0 * sgrid.y_nodes, u0, v0)
        thresholds["mu0"] = sup.mu0
        if mu_lo is None:
            mu_lo = sup.mu0
        if mu_hi is None:
            mu_hi = thresholds["mu_upper"]
    if mu_lo is None or mu_hi is None:
        raise ValidationError("bisect needs mu_lo and mu_hi (no defaults exist for 2 h0 >= Lambda)")

    bracket = analysis.estimate_mu_star(
        p, u0, v0, (mu_lo, mu_hi), config.bisect.n_bisect, cfg, stop=config.stop
    )
    rows = np.asarray(
        [
            (pr.mu, {"Vanishing": 0.0, "Undecided": 0.5, "Spreading": 1.0}[pr.kind], pr.t_end, float(pr.horizon_doubled))
            for pr in bracket.probes
        ]
    )
    _atomic_savetxt(out_dir / "probes.csv", rows, "mu,verdict_code,t_end,horizon_doubled")
    summary = {
        "mode": "bisect",
        "params": _params_dict(p),
        "thresholds": thresholds,
        "bracket": {
            "lo": bracket.lo,
            "hi": bracket.hi,
            "width": bracket.width,
            "n_bisect": config.bisect.n_bisect,
            "near_threshold": list(bracket.near_threshold),
        },
        "probes": [
            {"mu": pr.mu, "kind": pr.kind, "t_end": pr.t_end, "horizon_doubled": pr.horizon_doubled}
            for pr in bracket.probes
        ],
    }
    _write_json(out_dir / "summary.json", summary)
    return summary


def _apply_cell(config: RunConfig, values: dict) -> RunConfig:
    model = config.model
    u0 = dict(config.u0)
    v0 = dict(config.v0)
    model_over = {k: v for k, v in values.items() if k in ("a", "b", "c", "D", "mu", "h0")}
    if model_over:
        model = replace(model, **model_over)
    if "u0_amplitude" in values:
        if "file" in u0:
            raise ValidationError("cannot sweep u0_amplitude of a file-based profile")
        u0["amplitude"] = values["u0_amplitude"]
    if "v0_value" in values:
        if "file" in v0:
            raise ValidationError("cannot sweep v0_value of a file-based profile")
        v0["value"] = values["v0_value"]
    return replace(config, model=model, u0=u0, v0=v0)


def _sweep_cell(payload: tuple[RunConfig, int, dict]) -> tuple[int, dict]:
    config, idx, values = payload
    row: dict = dict(values)
    row["index"] = idx
    try:
        cell_cfg = _apply_cell(config, values)
        p = cell_cfg.model
        num = cell_cfg.numerics.resolve(p)
        sgrid, lgrid = num.grids()
        u0 = sample_u0(cell_cfg.u0, p, sgrid)
        v0 = sample_v0(cell_cfg.v0, lgrid)
        result = simulate(p, u0, v0, num, stop=cell_cfg.stop)
        verdict = analysis.classify(result, trail_window=cell_cfg.stop.trail_window)
        row.update(
            verdict=verdict.kind,
            t_end=result.t_end,
            final_span=float(result.span[-1]),
            sup_u_final=float(result.sup_u[-1]),
        )
    except StefanPPError as exc:
        row.update(verdict="Error", error=f"{type(exc).__name__}: {exc}", t_end=math.nan,
                   final_span=math.nan, sup_u_final=math.nan)
    return idx, row


def _run_sweep(config: RunConfig, out_dir: Path, workers: int | None, seedless: bool) -> dict:
    spec: SweepSpec = config.sweep  # validated non-None by RunConfig
    axes_values = [np.linspace(ax.min, ax.max, ax.count) for ax in spec.axes]
    cells: list[tuple[RunConfig, int, dict]] = []
    if len(spec.axes) == 1:
        for i, val in enumerate(axes_values[0]):
            cells.append((config, i, {spec.axes[0].param: float(val)}))
        shape = (spec.axes[0].count,)
    else:
        ncols = spec.axes[1].count
        for i, v0 in enumerate(axes_values[0]):
            for j, v1 in enumerate(axes_values[1]):
                cells.append(
                    (config, i * ncols + j, {spec.axes[0].param: float(v0), spec.axes[1].param: float(v1)})
                )
        shape = (spec.axes[0].count, spec.axes[1].count)

    n_workers = workers if workers is not None else spec.workers
    if n_workers == 0:
        if seedless:
            raise ValidationError("--seedless forbids workers = 0 (machine-dependent auto)")
        n_workers = os.cpu_count() or 1

    if n_workers <= 1:
        results = [_sweep_cell(c) for c in cells]
    else:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            results = list(pool.map(_sweep_cell, cells, chunksize=1))
    rows = [row for _, row in sorted(results, key=lambda item: item[0])]

    param_names = [ax.param for ax in spec.axes]
    verdict_code = {"Vanishing": 0.0, "Undecided": 0.5, "Spreading": 1.0, "Error": -1.0}
    table = np.asarray(
        [
            [row["index"]]
            + [row[name] for name in param_names]
            + [verdict_code[row["verdict"]], row["t_end"], row["final_span"], row["sup_u_final"]]
            for row in rows
        ]
    )
    header = ",".join(["index"] + param_names + ["verdict_code", "t_end", "final_span", "sup_u_final"])
    _atomic_savetxt(out_dir / "phase_diagram.csv", table, header)
    summary = {
        "mode": "sweep",
        "params": _params_dict(config.model),
        "thresholds": _thresholds(config),
        "axes": [{"param": ax.param, "min": ax.min, "max": ax.max, "count": ax.count} for ax in spec.axes],
        "shape": list(shape),
        "verdicts": {row["verdict"]: sum(1 for r in rows if r["verdict"] == row["verdict"]) for row in rows},
        "cells": rows,
    }
    _write_json(out_dir / "summary.json", summary)
    if config.outputs.plots and len(spec.axes) == 2:
        plots.emit_plots(out_dir)
    return summary


def _run_steady(config: RunConfig, out_dir: Path) -> dict:
    sc = config.steady
    profile = solve_bvp(LogisticBVP(d=sc.d, beta=sc.beta, theta=sc.theta, l=sc.l, k=sc.k), n=sc.n, tol=sc.tol)
    _atomic_savetxt(
        out_dir / "profile.csv", np.column_stack([profile.x_nodes, profile.values]), "x,w"
    )
    summary = {
        "mode": "steady",
        "problem": {"d": sc.d, "beta": sc.beta, "theta": sc.theta, "l": sc.l, "k": sc.k},
        "thresholds": {"critical_half_length": existence_threshold(sc.d, sc.beta)},
        "residual_norm": profile.residual_norm,
        "subcritical": profile.subcritical,
        "max_value": float(np.max(profile.values)),
        "center_value": float(profile.values[profile.values.size // 2]),
    }
    _write_json(out_dir / "summary.json", summary)
    return summary


def _run_limits(config: RunConfig, out_dir: Path) -> dict:
    p = config.model
    summary: dict = {
        "mode": "limits",
        "params": _params_dict(p),
        "thresholds": _thresholds(config),
        "regime": p.regime,
    }
    lines = [f"regime: {p.regime}"]
    if p.regime == "weak":
        iterates = limit_iteration(p)
        u_star, v_star = spreading_limits(p)
        rows = np.column_stack(
            [
                np.arange(1, iterates.rounds + 1, dtype=float),
                iterates.under_u,
                iterates.over_v,
                iterates.over_u,
                iterates.under_v,
            ]
        )
        _atomic_savetxt(out_dir / "limits.csv", rows, "i,under_u,over_v,over_u,under_v")
        summary["limits"] = {"u_star": u_star, "v_star": v_star, "rounds": iterates.rounds,
                             "final_gap": iterates.final_gap()}
        lines.append(f"closed-form limits: u* = {u_star:.12g}, v* = {v_star:.12g}")
        lines.append(f"{'i':>4} {'under_u':>18} {'over_v':>18} {'over_u':>18} {'under_v':>18}")
        show = list(range(min(8, iterates.rounds))) + (
            [iterates.rounds - 1] if iterates.rounds > 8 else []
        )
        for i in show:
            lines.append(
                f"{i + 1:>4} {iterates.under_u[i]:>18.12g} {iterates.over_v[i]:>18.12g} "
                f"{iterates.over_u[i]:>18.12g} {iterates.under_v[i]:>18.12g}"
            )
    elif p.regime == "strong":
        u_star, v_star = spreading_limits(p)
        summary["limits"] = {"u_star": u_star, "v_star": v_star}
        lines.append(f"closed-form limits: u* = {u_star:.12g}, v* = {v_star:.12g}")
    else:
        summary["limits"] = None
        lines.append("no long-time limits are established in this regime (b > c, a*c >= 1)")
    _write_json(out_dir / "summary.json", summary)
    print("\n".join(lines))
    return summary


def run(
    config: RunConfig,
    out_dir: str | Path | None = None,
    workers: int | None = None,
    seedless: bool = False,
) -> Path:
    """Execute one configured job and persist its artifacts.

    Returns the output directory.  All errors propagate as package
    exceptions; the CLI maps them onto exit codes and a machine-readable
    ``error.json``.
    """
    target = resolve_out_dir(config, out_dir, seedless)
    target.mkdir(parents=True, exist_ok=True)
    if config.mode == "simulate":
        _run_simulate(config, target)
    elif config.mode == "bisect":
        _run_bisect(config, target)
    elif config.mode == "sweep":
        _run_sweep(config, target, workers, seedless)
    elif config.mode == "steady":
        _run_steady(config, target)
    else:
        _run_limits(config, target)
    return target
