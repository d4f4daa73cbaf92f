"""Run configuration: a single YAML document with nested sections.

Sections: ``model`` (the six constants), ``initial`` (u0/v0 family or file),
``numerics``, ``outputs``, and per-mode sections ``bisect`` / ``sweep`` /
``steady`` / ``stop``.  Unknown keys anywhere are rejected, every model
precondition is checked eagerly at load time, and a loaded config serializes
back to an identical document.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from pathlib import Path

import yaml

from .errors import ValidationError
from .model import ModelParams
from .profiles import validate_u0_spec, validate_v0_spec
from .solver import NumericsConfig, StopRules

MODES = ("simulate", "bisect", "sweep", "steady", "limits")

#: Parameters a sweep axis may scan.
SWEEPABLE = ("a", "b", "c", "D", "mu", "h0", "u0_amplitude", "v0_value")


@dataclass(frozen=True)
class OutputsConfig:
    directory: str | None = None
    snapshot_dt: float = 10.0
    front_stride: int = 1
    plots: bool = True
    limit_tol: float = 0.05
    check_domination: bool = False
    timestamp_dir: bool = False

    def __post_init__(self) -> None:
        if self.snapshot_dt <= 0:
            raise ValidationError("outputs.snapshot_dt must be positive")
        if self.front_stride < 1:
            raise ValidationError("outputs.front_stride must be >= 1")
        if self.limit_tol <= 0:
            raise ValidationError("outputs.limit_tol must be positive")


@dataclass(frozen=True)
class BisectConfig:
    n_bisect: int = 8
    mu_lo: float | None = None
    mu_hi: float | None = None

    def __post_init__(self) -> None:
        if self.n_bisect < 1:
            raise ValidationError("bisect.n_bisect must be >= 1")
        if self.mu_lo is not None and self.mu_lo <= 0:
            raise ValidationError("bisect.mu_lo must be positive when given")
        if self.mu_hi is not None and self.mu_hi <= 0:
            raise ValidationError("bisect.mu_hi must be positive when given")


@dataclass(frozen=True)
class SweepAxis:
    param: str
    min: float
    max: float
    count: int

    def __post_init__(self) -> None:
        if self.param not in SWEEPABLE:
            raise ValidationError(f"sweep axis parameter must be one of {SWEEPABLE}, got {self.param!r}")
        if self.count < 2:
            raise ValidationError(f"sweep axis count must be >= 2, got {self.count}")
        if not self.min < self.max:
            raise ValidationError(f"sweep axis needs min < max, got [{self.min}, {self.max}]")


@dataclass(frozen=True)
class SweepSpec:
    axes: tuple[SweepAxis, ...]
    workers: int = 1
    budget: int = 4096

    def __post_init__(self) -> None:
        if not 1 <= len(self.axes) <= 2:
            raise ValidationError("sweep needs one or two axes")
        cells = 1
        for ax in self.axes:
            cells *= ax.count
        if cells > self.budget:
            raise ValidationError(f"sweep has {cells} cells, exceeding the budget {self.budget}")
        if self.workers < 0:
            raise ValidationError("sweep.workers must be >= 0 (0 = auto)")


@dataclass(frozen=True)
class SteadyConfig:
    d: float = 1.0
    beta: float = 1.0
    theta: float = 1.0
    l: float = 1.6
    k: float = 0.0
    n: int = 257
    tol: float = 1e-12

    def __post_init__(self) -> None:
        for name in ("d", "beta", "theta", "l"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"steady.{name} must be positive")
        if self.k < 0:
            raise ValidationError("steady.k must be >= 0")
        if self.n < 64:
            raise ValidationError("steady.n must be >= 64")
        if self.tol <= 0:
            raise ValidationError("steady.tol must be positive")


@dataclass(frozen=True)
class RunConfig:
    mode: str
    model: ModelParams
    u0: dict
    v0: dict
    numerics: NumericsConfig = field(default_factory=NumericsConfig)
    outputs: OutputsConfig = field(default_factory=OutputsConfig)
    stop: StopRules = field(default_factory=StopRules)
    bisect: BisectConfig = field(default_factory=BisectConfig)
    sweep: SweepSpec | None = None
    steady: SteadyConfig = field(default_factory=SteadyConfig)

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValidationError(f"mode must be one of {MODES}, got {self.mode!r}")
        validate_u0_spec(self.u0, self.model)
        validate_v0_spec(self.v0)
        if self.mode == "sweep" and self.sweep is None:
            raise ValidationError("sweep mode requires a sweep section")


_SECTION_KEYS = {
    "model": {"a", "b", "c", "D", "mu", "h0"},
    "initial": {"u0", "v0"},
    "u0": {"family", "amplitude", "file"},
    "v0": {"family", "value", "file"},
    "numerics": {
        "dt",
        "n_y",
        "n_x",
        "L",
        "t_max",
        "front_stencil_order",
        "tol_bounds",
        "probe_halfwidth",
    },
    "outputs": {
        "directory",
        "snapshot_dt",
        "front_stride",
        "plots",
        "limit_tol",
        "check_domination",
        "timestamp_dir",
    },
    "stop": {"enabled", "t_min", "trail_window", "check_every"},
    "bisect": {"n_bisect", "mu_lo", "mu_hi"},
    "sweep": {"axes", "workers", "budget"},
    "axis": {"param", "min", "max", "count"},
    "steady": {"d", "beta", "theta", "l", "k", "n", "tol"},
    "top": {"mode", "model", "initial", "numerics", "outputs", "stop", "bisect", "sweep", "steady"},
}


def _check_keys(section: str, mapping: dict, where: str) -> None:
    if not isinstance(mapping, dict):
        raise ValidationError(f"section {where!r} must be a mapping, got {type(mapping).__name__}")
    unknown = set(mapping) - _SECTION_KEYS[section]
    if unknown:
        raise ValidationError(f"unknown key(s) {sorted(unknown)} in section {where!r}")


def from_dict(doc: dict) -> RunConfig:
    """Build and validate a RunConfig from a parsed document."""
    _check_keys("top", doc, "top level")
    for required in ("model", "initial"):
        if required not in doc:
            raise ValidationError(f"missing required section {required!r}")
    _check_keys("model", doc["model"], "model")
    try:
        model = ModelParams(**{k: float(v) for k, v in doc["model"].items()})
    except TypeError as exc:
        raise ValidationError(f"model section incomplete: {exc}") from exc

    _check_keys("initial", doc["initial"], "initial")
    u0 = doc["initial"].get("u0", {"family": "cosine", "amplitude": 1.0})
    v0 = doc["initial"].get("v0", {"family": "constant", "value": model.b})
    _check_keys("u0", u0, "initial.u0")
    _check_keys("v0", v0, "initial.v0")

    num_doc = dict(doc.get("numerics", {}))
    _check_keys("numerics", num_doc, "numerics")
    out_doc = dict(doc.get("outputs", {}))
    _check_keys("outputs", out_doc, "outputs")
    outputs = OutputsConfig(**out_doc)
    numerics = NumericsConfig(snapshot_dt=outputs.snapshot_dt, **num_doc)

    stop_doc = dict(doc.get("stop", {}))
    _check_keys("stop", stop_doc, "stop")
    stop = StopRules(**stop_doc)

    bis_doc = dict(doc.get("bisect", {}))
    _check_keys("bisect", bis_doc, "bisect")
    bisect = BisectConfig(**bis_doc)

    sweep = None
    if "sweep" in doc:
        sweep_doc = dict(doc["sweep"])
        _check_keys("sweep", sweep_doc, "sweep")
        axes_doc = sweep_doc.pop("axes", None)
        if not axes_doc:
            raise ValidationError("sweep section requires a nonempty axes list")
        axes = []
        for i, ax in enumerate(axes_doc):
            _check_keys("axis", ax, f"sweep.axes[{i}]")
            axes.append(SweepAxis(**ax))
        sweep = SweepSpec(axes=tuple(axes), **sweep_doc)

    steady_doc = dict(doc.get("steady", {}))
    _check_keys("steady", steady_doc, "steady")
    steady = SteadyConfig(**steady_doc)

    mode = doc.get("mode", "simulate")
    return RunConfig(
        mode=mode,
        model=model,
        u0=dict(u0),
        v0=dict(v0),
        numerics=numerics,
        outputs=outputs,
        stop=stop,
        bisect=bisect,
        sweep=sweep,
        steady=steady,
    )


def to_dict(cfg: RunConfig) -> dict:
    """Serialize a RunConfig to the document shape accepted by from_dict."""
    doc: dict = {
        "mode": cfg.mode,
        "model": {k: getattr(cfg.model, k) for k in ("a", "b", "c", "D", "mu", "h0")},
        "initial": {"u0": dict(cfg.u0), "v0": dict(cfg.v0)},
        "numerics": {
            k: v
            for k, v in asdict(cfg.numerics).items()
            if k != "snapshot_dt" and v is not None
        },
        "outputs": asdict(cfg.outputs),
        "stop": asdict(cfg.stop),
        "bisect": asdict(cfg.bisect),
        "steady": asdict(cfg.steady),
    }
    if cfg.sweep is not None:
        doc["sweep"] = {
            "axes": [asdict(ax) for ax in cfg.sweep.axes],
            "workers": cfg.sweep.workers,
            "budget": cfg.sweep.budget,
        }
    return doc


def load_config(path: str | Path) -> RunConfig:
    """Parse and validate a YAML run configuration.

    Raises:
        ValidationError: missing file, malformed YAML, unknown keys, or any
            violated model precondition; the message names the offender.
    """
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"config file not found: {path}")
    try:
        doc = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ValidationError(f"cannot parse {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ValidationError(f"config {path} must be a mapping at top level")
    return from_dict(doc)


def save_config(cfg: RunConfig, path: str | Path) -> None:
    """Write a config document that loads back field-for-field identical."""
    Path(path).write_text(yaml.safe_dump(to_dict(cfg), sort_keys=True, default_flow_style=False))
