"""Benchmark run configuration (YAML) with validation up front.

Example::

    datasets:
      - path: data/two_gaussians.csv
        label_column: label        # optional, defaults to the last column
    oversamplers: [none, smote, gsmote]      # ids use the default grids
    classifiers:
      gbc: {max_depth: [5, 8], n_estimators: [50, 100]}
    folds: 5
    repeats: 5
    seed: 0
    output: results/
    workers: 1

``oversamplers`` and ``classifiers`` may be lists of ids (default grids) or
mappings from id to a ``{parameter: [values]}`` grid. Relative paths are
resolved against the config file's directory.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .classifiers import CLASSIFIERS, ClassifierError, validate_classifier_params
from .evaluation import MethodGrid, expand_grid
from .oversampling import OVERSAMPLERS, OversamplingError, validate_params

DEFAULT_OVERSAMPLER_GRIDS = {
    "none": {},
    "smote": {"k": [3, 4]},
    "borderline1": {"k": [3, 4]},
    "borderline2": {"k": [3, 4]},
    "adasyn": {"k": [3]},
    "gsmote": {
        "a_sel": ["minority", "majority", "combined"],
        "k": [3, 4],
        "a_trunc": [-1.0, 0.0, 0.5, 1.0],
        "a_def": [0.0, 0.5, 1.0],
    },
    "random": {},
}
DEFAULT_OVERSAMPLERS = ("none", "smote", "borderline1", "borderline2", "adasyn", "gsmote")

DEFAULT_CLASSIFIER_GRIDS = {
    "lr": {},
    "gbc": {"max_depth": [5, 8], "n_estimators": [50, 100]},
}
DEFAULT_CLASSIFIERS = ("lr", "gbc")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class DatasetSpec:
    path: Path
    label_column: str | None = None
    name: str | None = None

    @property
    def display_name(self) -> str:
        return self.name or self.path.stem


@dataclass(frozen=True)
class RunConfig:
    datasets: tuple
    oversamplers: tuple = field(default_factory=lambda: _grids(
        {m: None for m in DEFAULT_OVERSAMPLERS}, DEFAULT_OVERSAMPLER_GRIDS))
    classifiers: tuple = field(default_factory=lambda: _grids(
        {m: None for m in DEFAULT_CLASSIFIERS}, DEFAULT_CLASSIFIER_GRIDS))
    folds: int = 5
    repeats: int = 5
    seed: int = 0
    output: Path = Path("results")
    workers: int = 1

    def __post_init__(self):
        validate(self)

    def to_dict(self) -> dict:
        return {
            "datasets": [{"path": str(d.path), "label_column": d.label_column,
                          "name": d.display_name} for d in self.datasets],
            "oversamplers": {m.method: list(m.grid) for m in self.oversamplers},
            "classifiers": {c.method: list(c.grid) for c in self.classifiers},
            "folds": self.folds,
            "repeats": self.repeats,
            "seed": self.seed,
        }

    def fingerprint(self) -> str:
        """Hash of everything that affects results (not output dir or worker count)."""
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def _grids(entries, defaults) -> tuple:
    if isinstance(entries, (list, tuple)):
        entries = {m: None for m in entries}
    if not isinstance(entries, dict):
        raise ConfigError(f"expected a list of ids or a mapping, got {type(entries).__name__}")
    out = []
    for method, grid in entries.items():
        if grid is None:
            if method not in defaults:
                raise ConfigError(f"unknown method {method!r}; valid ids: {', '.join(defaults)}")
            grid = defaults[method]
        if not isinstance(grid, dict):
            raise ConfigError(f"{method}: grid must be a mapping of parameter -> values")
        out.append(MethodGrid(method, tuple(expand_grid(grid))))
    return tuple(out)


def validate(cfg: RunConfig) -> None:
    if not cfg.datasets:
        raise ConfigError("at least one dataset is required")
    names = [d.display_name for d in cfg.datasets]
    if len(set(names)) != len(names):
        raise ConfigError(f"dataset names must be unique, got {names}")
    if not cfg.oversamplers or not cfg.classifiers:
        raise ConfigError("oversamplers and classifiers must be non-empty")
    for o in cfg.oversamplers:
        if o.method not in OVERSAMPLERS:
            raise ConfigError(f"unknown oversampler {o.method!r}; valid ids: {', '.join(OVERSAMPLERS)}")
        for params in o.grid:
            try:
                validate_params(o.method, params)
            except OversamplingError as e:
                raise ConfigError(f"oversampler {o.method}: {e}") from None
    for c in cfg.classifiers:
        if c.method not in CLASSIFIERS:
            raise ConfigError(f"unknown classifier {c.method!r}; valid ids: {', '.join(CLASSIFIERS)}")
        for params in c.grid:
            try:
                validate_classifier_params(c.method, params)
            except (ClassifierError, TypeError) as e:
                raise ConfigError(f"classifier {c.method}: {e}") from None
    for key in ("oversamplers", "classifiers"):
        ids = [m.method for m in getattr(cfg, key)]
        if len(set(ids)) != len(ids):
            raise ConfigError(f"duplicate ids in {key}: {ids}")
    if int(cfg.folds) != cfg.folds or cfg.folds < 2:
        raise ConfigError(f"folds must be an integer >= 2, got {cfg.folds}")
    if int(cfg.repeats) != cfg.repeats or cfg.repeats < 1:
        raise ConfigError(f"repeats must be an integer >= 1, got {cfg.repeats}")
    if int(cfg.workers) != cfg.workers or cfg.workers < 1:
        raise ConfigError(f"workers must be an integer >= 1, got {cfg.workers}")


_KEYS = {"datasets", "oversamplers", "classifiers", "folds", "repeats", "seed", "output", "workers"}


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except (OSError, yaml.YAMLError) as e:
        raise ConfigError(f"cannot read config {path}: {e}") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    unknown = set(raw) - _KEYS
    if unknown:
        raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")
    base = path.parent

    def resolve(p: Path) -> Path:
        return p if p.is_absolute() else Path(os.path.normpath(base / p))

    datasets = []
    for entry in raw.get("datasets") or []:
        if isinstance(entry, str):
            entry = {"path": entry}
        if not isinstance(entry, dict) or "path" not in entry:
            raise ConfigError(f"{path}: each dataset needs a 'path'")
        extra = set(entry) - {"path", "label_column", "name"}
        if extra:
            raise ConfigError(f"{path}: unknown dataset keys {sorted(extra)}")
        datasets.append(DatasetSpec(resolve(Path(entry["path"])), entry.get("label_column"),
                                    entry.get("name")))

    kwargs = {"datasets": tuple(datasets)}
    if "oversamplers" in raw:
        kwargs["oversamplers"] = _grids(raw["oversamplers"], DEFAULT_OVERSAMPLER_GRIDS)
    if "classifiers" in raw:
        kwargs["classifiers"] = _grids(raw["classifiers"], DEFAULT_CLASSIFIER_GRIDS)
    for key in ("folds", "repeats", "seed", "workers"):
        if key in raw:
            kwargs[key] = raw[key]
    if "output" in raw:
        kwargs["output"] = resolve(Path(raw["output"]))
    return RunConfig(**kwargs)
