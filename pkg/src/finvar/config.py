"""Run configuration: JSON config files, CLI overrides, and point sampling."""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError
from .metrics import ProjectivePair, TangentPoint, catalog_metric

SCHEMA_VERSION = 1
DEFAULT_SEED = 12345
MAX_REJECTIONS = 100_000

_TOP_LEVEL_KEYS = {"schema_version", "pair", "samples", "integrator",
                   "tolerance", "seed", "format", "out", "points"}
_SAMPLE_KEYS = {"count", "trajectories", "box", "velocity_scale"}
_INTEGRATOR_KEYS = {"method", "rtol", "atol", "step", "t_end"}


@dataclass(frozen=True)
class SampleSettings:
    """Random sampling: uniform box for base points (rejection-sampled
    against the pair's domain), unit-sphere velocities times a scale."""

    count: int = 100
    trajectories: int = 20
    box: tuple[float, float] = (-0.35, 0.35)
    velocity_scale: float | None = None

    def __post_init__(self):
        if self.count < 1 or self.trajectories < 1:
            raise ConfigError("sample counts must be >= 1")
        if not self.box[0] < self.box[1]:
            raise ConfigError(f"box {self.box} is empty")


@dataclass(frozen=True)
class IntegratorSettings:
    method: str = "rkf45"
    rtol: float = 1e-10
    atol: float = 1e-10
    step: float = 1e-3
    t_end: float = 1.0


@dataclass(frozen=True)
class RunConfig:
    """Everything one CLI command needs; defaults give deterministic runs."""

    base: dict
    comparison: dict
    samples: SampleSettings = SampleSettings()
    integrator: IntegratorSettings = IntegratorSettings()
    tolerance: float | None = None
    seed: int = DEFAULT_SEED
    fmt: str = "json"
    out: str | None = None
    points: tuple = ()

    def build_pair(self) -> ProjectivePair:
        return ProjectivePair(base=catalog_metric(self.base),
                              comparison=catalog_metric(self.comparison))

    def explicit_points(self) -> list[TangentPoint]:
        return [TangentPoint(np.asarray(pt["x"], dtype=float),
                             np.asarray(pt["y"], dtype=float))
                for pt in self.points]


def _check_keys(mapping: dict, allowed: set, where: str) -> None:
    unknown = set(mapping) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)} in {where}; "
                          f"expected a subset of {sorted(allowed)}")


def load_config(path: str) -> RunConfig:
    """Parse a JSON config file into a :class:`RunConfig`."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: line "
                          f"{exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path} must be a JSON object")
    _check_keys(raw, _TOP_LEVEL_KEYS, "config")
    if raw.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError(
            f"config field 'schema_version' must be {SCHEMA_VERSION}, "
            f"got {raw.get('schema_version')!r}")
    pair = raw.get("pair")
    if not isinstance(pair, dict) or "base" not in pair or "comparison" not in pair:
        raise ConfigError("config field 'pair' needs 'base' and 'comparison' "
                          "metric descriptors")
    sample_kwargs = dict(raw.get("samples", {}))
    _check_keys(sample_kwargs, _SAMPLE_KEYS, "config field 'samples'")
    if "box" in sample_kwargs:
        box = sample_kwargs["box"]
        if not (isinstance(box, (list, tuple)) and len(box) == 2):
            raise ConfigError(f"samples.box must be [lo, hi], got {box!r}")
        sample_kwargs["box"] = (float(box[0]), float(box[1]))
    integ_kwargs = dict(raw.get("integrator", {}))
    _check_keys(integ_kwargs, _INTEGRATOR_KEYS, "config field 'integrator'")
    points = raw.get("points", [])
    for i, pt in enumerate(points):
        if not isinstance(pt, dict) or "x" not in pt or "y" not in pt:
            raise ConfigError(f"points[{i}] must be an object with 'x' and 'y'")
    fmt = raw.get("format", "json")
    if fmt not in ("json", "csv"):
        raise ConfigError(f"format must be 'json' or 'csv', got {fmt!r}")
    return RunConfig(
        base=pair["base"],
        comparison=pair["comparison"],
        samples=SampleSettings(**sample_kwargs),
        integrator=IntegratorSettings(**integ_kwargs),
        tolerance=raw.get("tolerance"),
        seed=int(raw.get("seed", DEFAULT_SEED)),
        fmt=fmt,
        out=raw.get("out"),
        points=tuple(points),
    )


def apply_overrides(cfg: RunConfig, *, seed=None, fmt=None, tolerance=None,
                    out=None) -> RunConfig:
    """CLI flags take precedence over file values."""
    updates = {}
    if seed is not None:
        updates["seed"] = int(seed)
    if fmt is not None:
        updates["fmt"] = fmt
    if tolerance is not None:
        updates["tolerance"] = float(tolerance)
    if out is not None:
        updates["out"] = out
    return replace(cfg, **updates) if updates else cfg


def sample_tangent_points(pair: ProjectivePair, count: int,
                          rng: np.random.Generator,
                          box: tuple[float, float] = (-0.35, 0.35),
                          velocity_scale: float = 1.0) -> list[TangentPoint]:
    """Seeded in-domain samples: box-uniform base points, sphere velocities."""
    n = pair.dim
    points = []
    tries = 0
    while len(points) < count:
        tries += 1
        if tries > MAX_REJECTIONS:
            raise ConfigError(
                f"could not draw {count} in-domain points from box {box}; "
                f"box may not intersect the domain")
        x = rng.uniform(box[0], box[1], size=n)
        if not pair.in_domain(x):
            continue
        y = rng.normal(size=n)
        norm = np.linalg.norm(y)
        if norm < 1e-12:
            continue
        points.append(TangentPoint(x, velocity_scale * y / norm))
    return points
