"""Deterministic SVG plots generated from on-disk artifacts.

Figures are rebuilt from the CSV/JSON files, never from in-memory state, so
plotting can be rerun on any artifact directory.  Output is byte-stable:
fixed viewport, fixed hash salt, no embedded dates.
"""

from __future__ import annotations

import json
import math
import os
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)
import numpy as np  # noqa: E402

from .errors import ValidationError  # noqa: E402

plt.rcParams["svg.hashsalt"] = "stefanpp"

_FIGSIZE = (7.0, 4.5)


def _save(fig, path: Path) -> None:
    tmp = path.with_name(f".{path.name}.tmp")
    fig.savefig(tmp, format="svg", metadata={"Date": None})
    plt.close(fig)
    os.replace(tmp, path)


def _load_rows(path: Path, expect_cols: int) -> np.ndarray:
    with open(path) as fh:
        header = fh.readline()
        first = fh.readline()
    if not header or not first.strip():
        raise ValidationError(f"{path} is empty; regenerate the run artifacts")
    rows = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if rows.size == 0 or rows.shape[1] != expect_cols:
        raise ValidationError(f"{path} is empty or malformed; regenerate the run artifacts")
    return rows


def _front_fan(out: Path, fronts: np.ndarray, lam: float) -> None:
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    t, g, h = fronts[:, 0], fronts[:, 1], fronts[:, 2]
    ax.plot(t, h, color="tab:red", label="h(t)")
    ax.plot(t, g, color="tab:blue", label="g(t)")
    ax.axhline(0.5 * lam, color="gray", linestyle="--", linewidth=1, label="critical half-span")
    ax.axhline(-0.5 * lam, color="gray", linestyle="--", linewidth=1)
    ax.set_xlabel("t")
    ax.set_ylabel("front position")
    ax.legend(loc="upper left")
    ax.set_title("habitat fronts")
    _save(fig, out / "fronts.svg")


def _final_profiles(out: Path, snap: np.ndarray, summary: dict) -> None:
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    x, u, v = snap[:, 0], snap[:, 1], snap[:, 2]
    ax.plot(x, u, color="tab:red", label="predator u")
    ax.plot(x, v, color="tab:blue", label="prey v")
    verdict = summary.get("verdict", {}).get("kind")
    params = summary.get("params", {})
    targets: list[tuple[float, str]] = []
    if verdict == "Vanishing":
        targets = [(params["b"], "b")]
    elif verdict == "Spreading":
        a, b, c = params["a"], params["b"], params["c"]
        if b > c and a * c < 1.0:
            denom = 1.0 + a * c
            targets = [((1.0 + a * b) / denom, "u*"), ((b - c) / denom, "v*")]
        elif b <= c:
            targets = [(1.0, "u*"), (0.0, "v*")]
    for value, label in targets:
        ax.axhline(value, color="gray", linestyle=":", linewidth=1)
        ax.annotate(label, xy=(x[0], value), fontsize=8, color="gray")
    ax.set_xlabel("x")
    ax.set_ylabel("density")
    ax.legend(loc="upper right")
    ax.set_title("final profiles")
    _save(fig, out / "profiles.svg")


def _sweep_heatmap(out: Path, table: np.ndarray, summary: dict) -> None:
    axes = summary["axes"]
    if len(axes) != 2:
        return
    shape = tuple(summary["shape"])
    codes = table[:, 3].reshape(shape)
    ax0 = np.linspace(axes[0]["min"], axes[0]["max"], axes[0]["count"])
    ax1 = np.linspace(axes[1]["min"], axes[1]["max"], axes[1]["count"])
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    mesh = ax.pcolormesh(
        ax1, ax0, codes, cmap="coolwarm", vmin=-1.0, vmax=1.0, shading="nearest"
    )
    fig.colorbar(mesh, ax=ax, label="verdict (0 vanish, 1 spread)")
    params = dict(summary["params"])
    names = [axes[0]["param"], axes[1]["param"]]
    if "h0" in names:
        # Critical-habitat curve 2 h0 = Lambda(a, b) in sweep coordinates.
        h_axis = names.index("h0")
        other = 1 - h_axis
        other_vals = ax1 if other == 1 else ax0
        local = dict(params)
        crit = []
        for val in np.atleast_1d(other_vals):
            local[names[other]] = float(val)
            crit.append(0.5 * math.pi * math.sqrt(1.0 / (1.0 + local["a"] * local["b"])))
        crit = np.asarray(crit)
        if h_axis == 0:
            ax.plot(other_vals, crit, color="black", linewidth=1.5, label="2 h0 = critical span")
        else:
            ax.plot(crit, other_vals, color="black", linewidth=1.5, label="2 h0 = critical span")
        ax.legend(loc="upper right")
    ax.set_xlabel(names[1])
    ax.set_ylabel(names[0])
    ax.set_title("spreading-vanishing phase diagram")
    _save(fig, out / "phase_diagram.svg")


def emit_plots(artifacts_dir: str | Path) -> list[Path]:
    """Render the figures matching whatever artifacts exist in a directory.

    Simulate runs (fronts.csv + snapshots/) yield a front fan chart and a
    final-profile overlay; sweep runs (phase_diagram.csv) yield the verdict
    heat map with the critical-habitat curve.

    Raises:
        ValidationError: no plottable CSV present, or an input CSV is empty.
    """
    src = Path(artifacts_dir)
    plot_dir = src / "plots"
    summary_path = src / "summary.json"
    if not summary_path.exists():
        raise ValidationError(f"missing {summary_path}; expected summary.json next to the CSVs")
    summary = json.loads(summary_path.read_text())
    produced: list[Path] = []

    fronts_path = src / "fronts.csv"
    phase_path = src / "phase_diagram.csv"
    if not fronts_path.exists() and not phase_path.exists():
        raise ValidationError(
            f"nothing to plot in {src}: expected fronts.csv (simulate) or phase_diagram.csv (sweep)"
        )
    plot_dir.mkdir(parents=True, exist_ok=True)

    if fronts_path.exists():
        fronts = _load_rows(fronts_path, 7)
        lam = summary["thresholds"]["lambda"]
        _front_fan(plot_dir, fronts, lam)
        produced.append(plot_dir / "fronts.svg")
        manifest_path = src / "snapshots" / "manifest.csv"
        if manifest_path.exists():
            manifest = _load_rows(manifest_path, 2)
            last = int(manifest[-1, 0])
            snap = _load_rows(src / "snapshots" / f"{last:04d}.csv", 3)
            _final_profiles(plot_dir, snap, summary)
            produced.append(plot_dir / "profiles.svg")

    if phase_path.exists() and len(summary.get("axes", [])) == 2:
        table = _load_rows(phase_path, 7)
        _sweep_heatmap(plot_dir, table, summary)
        produced.append(plot_dir / "phase_diagram.svg")
    return produced
