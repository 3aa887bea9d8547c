"""Run configuration for the command-line pipeline.

A run is described by one nested mapping, read from YAML or JSON and then
overridden key by key from the command line.  Every module seed is derived
from the single global ``seed`` as ``derive_seed(seed, name)`` (BLAKE2b of
the seed and the module name), with ``name`` one of :data:`SEED_NAMES`.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Mapping

import yaml

from ._seeds import derive_seed
from .collab import CollabConfig
from .dataset import (
    SYNTHETIC_PRESETS,
    Dataset,
    SplitSpec,
    SyntheticSpec,
    generate_blocks,
    generate_synthetic,
    load_csv,
)
from .ensemble import BoostConfig
from .interaction import DiscretizationConfig
from .learner import TrainConfig
from .views.community import MAX_EXHAUSTIVE, CommunityConfig

METHODS = ("whole_set", "interaction_gain", "collaboration", "exhaustive")
PRESETS = ("synthetic1", "synthetic2", "blocks")
SEED_NAMES = ("dataset", "split", "learner", "collab", "community", "boost", "exhaustive")

DEFAULTS: dict[str, Any] = {
    "dataset": {"preset": None, "csv": None, "label_column": "label", "synthetic": None, "n_samples": None},
    "split": {"test_fraction": 0.3, "stratified": True},
    "learner": {"loss": "hinge", "l2_lambda": 1e-3, "epochs": 200, "learning_rate": 1.0},
    "collab": {"k_folds": 5, "edge_threshold": 0.01},
    "interaction": {"n_bins": 8, "edge_threshold": 0.01},
    "community": {"backend": "greedy_modularity", "max_iters": 100},
    "boost": {"rounds": 10, "epsilon_cap": 1e-6, "mode": "boosted_pool"},
    "exhaustive": {"validation_fraction": 0.3},
    "methods": "auto",
    "output_dir": None,
    "seed": 0,
}


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration (a usage error)."""


def module_seeds(seed: int) -> dict[str, int]:
    return {name: derive_seed(seed, name) for name in SEED_NAMES}


def _merge(base: dict[str, Any], extra: Mapping[str, Any], where: str = "") -> dict[str, Any]:
    out = copy.deepcopy(base)
    for key, value in extra.items():
        path = f"{where}{key}"
        if key not in base:
            raise ConfigError(f"unknown config key {path!r}")
        if isinstance(base[key], dict):
            if not isinstance(value, Mapping):
                raise ConfigError(f"config key {path!r} must be a mapping")
            out[key] = _merge(base[key], value, path + ".")
        else:
            out[key] = copy.deepcopy(value)
    return out


def load_config_file(path: str | Path) -> dict[str, Any]:
    """Parse a YAML (``.yaml``/``.yml``) or JSON config file into a mapping."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"no such config file: {path}")
    text = path.read_text(encoding="utf-8")
    try:
        data = json.loads(text) if path.suffix.lower() == ".json" else yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ConfigError(f"{path}: cannot parse config: {exc}") from None
    if data is None:
        return {}
    if not isinstance(data, Mapping):
        raise ConfigError(f"{path}: top level must be a mapping")
    return dict(data)


def parse_override(item: str) -> tuple[list[str], Any]:
    """``section.key=value`` with ``value`` read as a YAML scalar or list."""
    if "=" not in item:
        raise ConfigError(f"override {item!r} must look like key=value")
    key, raw = item.split("=", 1)
    parts = [p for p in key.strip().split(".") if p]
    if not parts:
        raise ConfigError(f"override {item!r} has an empty key")
    try:
        value = yaml.safe_load(raw) if raw.strip() else None
    except yaml.YAMLError:
        value = raw
    return parts, value


def nest(parts: list[str], value: Any) -> dict[str, Any]:
    out: Any = value
    for p in reversed(parts):
        out = {p: out}
    return out


@dataclass(frozen=True)
class DatasetSource:
    preset: str | None = None
    csv: str | None = None
    label_column: str | int = "label"
    synthetic: SyntheticSpec | None = None
    n_samples: int | None = None

    def describe(self) -> str:
        if self.csv is not None:
            return Path(self.csv).stem
        if self.preset is not None:
            return self.preset
        return "synthetic"

    def load(self, seed: int) -> Dataset:
        if self.csv is not None:
            return load_csv(self.csv, self.label_column)
        if self.preset == "blocks":
            return generate_blocks(self.n_samples or 1500, seed=seed)
        spec = SYNTHETIC_PRESETS[self.preset] if self.preset else self.synthetic
        spec = replace(spec, seed=seed)
        if self.n_samples is not None:
            spec = replace(spec, n_samples=self.n_samples)
        spec.validate()
        return generate_synthetic(spec)


@dataclass(frozen=True)
class RunConfig:
    dataset: DatasetSource
    split: SplitSpec
    learner: TrainConfig
    collab: CollabConfig
    discretization: DiscretizationConfig
    ig_edge_threshold: float
    community: CommunityConfig
    boost: BoostConfig
    validation_fraction: float
    methods: tuple[str, ...] | None
    output_dir: str | None
    seed: int
    raw: Mapping[str, Any]

    def resolve_methods(self, n_features: int) -> tuple[str, ...]:
        """Requested methods; ``auto`` drops exhaustive above the feature limit."""
        if self.methods is None:
            if n_features > MAX_EXHAUSTIVE:
                return METHODS[:3]
            return METHODS
        if "exhaustive" in self.methods and n_features > MAX_EXHAUSTIVE:
            raise ConfigError(
                f"exhaustive search needs at most {MAX_EXHAUSTIVE} features, dataset has {n_features}"
            )
        return self.methods

    def echo(self) -> dict[str, Any]:
        """The merged configuration, with derived module seeds, for reports."""
        out = copy.deepcopy(dict(self.raw))
        # Where the files go is not part of the experiment.
        out.pop("output_dir", None)
        out["module_seeds"] = module_seeds(self.seed)
        return out


def _number(section: Mapping[str, Any], key: str, kind: type, where: str):
    value = section[key]
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{where}.{key} must be an integer, got {value!r}")
        return value
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(f"{where}.{key} must be a finite number, got {value!r}")
    return float(value)


def build_run_config(data: Mapping[str, Any]) -> RunConfig:
    """Validate a (partial) mapping merged over :data:`DEFAULTS`."""
    merged = _merge(DEFAULTS, data)
    seed = merged["seed"]
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise ConfigError(f"seed must be an integer in [0, 2**64), got {seed!r}")
    seeds = module_seeds(seed)

    d = merged["dataset"]
    chosen = [k for k in ("preset", "csv", "synthetic") if d.get(k) is not None]
    if len(chosen) != 1:
        raise ConfigError("dataset needs exactly one of preset, csv or synthetic")
    synthetic = None
    if d.get("synthetic") is not None:
        fields = dict(d["synthetic"])
        if "seed" in fields:
            raise ConfigError("dataset.synthetic.seed is derived from the global seed")
        try:
            synthetic = SyntheticSpec(**fields)
        except TypeError as exc:
            raise ConfigError(f"dataset.synthetic: {exc}") from None
        try:
            synthetic.validate()
        except ValueError as exc:
            raise ConfigError(f"dataset.synthetic: {exc}") from None
    if d.get("preset") is not None and d["preset"] not in PRESETS:
        raise ConfigError(f"dataset.preset must be one of {PRESETS}, got {d['preset']!r}")
    if d.get("n_samples") is not None and (not isinstance(d["n_samples"], int) or d["n_samples"] < 4):
        raise ConfigError("dataset.n_samples must be an integer of at least 4")
    source = DatasetSource(d.get("preset"), d.get("csv"), d.get("label_column", "label"), synthetic, d.get("n_samples"))

    s = merged["split"]
    frac = _number(s, "test_fraction", float, "split")
    if not 0.0 < frac < 1.0:
        raise ConfigError("split.test_fraction must lie in (0, 1)")
    split_spec = SplitSpec(frac, bool(s["stratified"]), seeds["split"])

    ln = merged["learner"]
    try:
        learner = TrainConfig(
            loss=ln["loss"],
            l2_lambda=_number(ln, "l2_lambda", float, "learner"),
            epochs=_number(ln, "epochs", int, "learner"),
            learning_rate=_number(ln, "learning_rate", float, "learner"),
            seed=seeds["learner"],
        )
        c = merged["collab"]
        collab = CollabConfig(
            k_folds=_number(c, "k_folds", int, "collab"),
            edge_threshold=_number(c, "edge_threshold", float, "collab"),
            base=learner,
            seed=seeds["collab"],
        )
        ig = merged["interaction"]
        disc = DiscretizationConfig(n_bins=_number(ig, "n_bins", int, "interaction"))
        ig_tau = _number(ig, "edge_threshold", float, "interaction")
        if ig_tau < 0:
            raise ConfigError("interaction.edge_threshold must be nonnegative")
        cm = merged["community"]
        community = CommunityConfig(cm["backend"], _number(cm, "max_iters", int, "community"), seeds["community"])
        b = merged["boost"]
        boost = BoostConfig(
            rounds=_number(b, "rounds", int, "boost"),
            epsilon_cap=_number(b, "epsilon_cap", float, "boost"),
            base=learner,
            seed=seeds["boost"],
            mode=b["mode"],
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    vfrac = _number(merged["exhaustive"], "validation_fraction", float, "exhaustive")
    if not 0.0 < vfrac < 1.0:
        raise ConfigError("exhaustive.validation_fraction must lie in (0, 1)")

    methods = merged["methods"]
    if methods == "auto":
        methods_t = None
    else:
        if isinstance(methods, str):
            methods = [m.strip() for m in methods.split(",") if m.strip()]
        if not methods or any(m not in METHODS for m in methods):
            raise ConfigError(f"methods must be 'auto' or a nonempty subset of {METHODS}, got {methods!r}")
        if len(set(methods)) != len(methods):
            raise ConfigError("methods are listed more than once")
        methods_t = tuple(m for m in METHODS if m in methods)
        merged["methods"] = list(methods_t)

    return RunConfig(
        dataset=source,
        split=split_spec,
        learner=learner,
        collab=collab,
        discretization=disc,
        ig_edge_threshold=ig_tau,
        community=community,
        boost=boost,
        validation_fraction=vfrac,
        methods=methods_t,
        output_dir=merged["output_dir"],
        seed=seed,
        raw=merged,
    )
