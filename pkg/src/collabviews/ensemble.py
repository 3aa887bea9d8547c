"""Multi-view ensemble: one linear base classifier per view, fused by AdaBoost.

Two fusion modes are available.

``boosted_pool``
    Discrete AdaBoost whose weak-learner pool is the set of views.  Every
    round retrains a classifier on each view under the current sample
    distribution and keeps the one with the lowest weighted error.
``static_fusion``
    One classifier per view trained once on uniform weights, each voting with
    ``alpha = 0.5 * ln((1 - e) / e)`` from its training error ``e``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from ._seeds import fingerprint
from .dataset import Dataset
from .learner import LinearModel, TrainConfig, train, uniform_weights
from .views.community import ViewPartition

MODES = ("boosted_pool", "static_fusion")


class EnsembleError(ValueError):
    pass


@dataclass(frozen=True)
class BoostConfig:
    rounds: int = 10
    epsilon_cap: float = 1e-6
    base: TrainConfig = field(default_factory=TrainConfig)
    seed: int = 0
    mode: str = "boosted_pool"

    def __post_init__(self) -> None:
        if self.rounds < 1:
            raise ValueError("rounds must be at least 1")
        if not 0 < self.epsilon_cap < 0.5:
            raise ValueError("epsilon_cap must lie in (0, 0.5)")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")

    def fingerprint(self) -> str:
        return fingerprint(asdict(self))


@dataclass(frozen=True, eq=False)
class Round:
    view: tuple[int, ...]
    model: LinearModel
    alpha: float
    error: float


@dataclass(frozen=True, eq=False)
class EnsembleModel:
    rounds: tuple[Round, ...]
    mode: str
    partition: ViewPartition
    config_fingerprint: str = ""
    # Sum of the sample distribution after each reweighting step.
    weight_sums: tuple[float, ...] = ()

    def to_dict(self) -> dict[str, Any]:
        return {
            "mode": self.mode,
            "partition": self.partition.to_json(),
            "config_fingerprint": self.config_fingerprint,
            "rounds": [
                {"view": list(r.view), "alpha": r.alpha, "error": r.error, "model": r.model.to_dict()}
                for r in self.rounds
            ],
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "EnsembleModel":
        rounds = tuple(
            Round(tuple(r["view"]), LinearModel.from_dict(r["model"]), float(r["alpha"]), float(r["error"]))
            for r in d["rounds"]
        )
        return cls(rounds, d["mode"], ViewPartition.from_json(d["partition"]), d.get("config_fingerprint", ""))


@dataclass(frozen=True)
class EvalReport:
    accuracy: float
    n_samples: int
    confusion: dict[str, int]
    rounds: list[dict[str, Any]]
    mode: str

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def _view_predictions(model: LinearModel, samples: np.ndarray, view: tuple[int, ...]) -> np.ndarray:
    return (model.decision_function(samples[:, list(view)]) >= 0).astype(np.int64)


def _fit_view(
    ds: Dataset, view: tuple[int, ...], weights: np.ndarray, cfg: TrainConfig
) -> tuple[LinearModel, np.ndarray]:
    sub = Dataset(ds.samples[:, list(view)], ds.labels, tuple(ds.feature_names[k] for k in view))
    model = train(sub, weights, cfg)
    return model, _view_predictions(model, ds.samples, view)


def _alpha(error: float, cap: float) -> float:
    e = min(max(error, cap), 1.0 - cap)
    return 0.5 * float(np.log((1.0 - e) / e))


def _check_partition(ds: Dataset, partition: ViewPartition) -> None:
    if not partition.views:
        raise EnsembleError("partition has no views")
    if partition.n_features != ds.n_features:
        raise EnsembleError(
            f"partition covers {partition.n_features} features, dataset has {ds.n_features}"
        )
    n0, n1 = ds.class_counts()
    if n0 == 0 or n1 == 0:
        raise EnsembleError("training data must contain both classes")


def _static_fusion(ds: Dataset, partition: ViewPartition, cfg: BoostConfig, pool) -> EnsembleModel:
    s = uniform_weights(ds.n_samples)
    fits = pool(lambda v: _fit_view(ds, v, s, cfg.base), partition.views)
    rounds = []
    for view, (model, pred) in zip(partition.views, fits):
        err = float(s[pred != ds.labels].sum())
        rounds.append(Round(view, model, _alpha(err, cfg.epsilon_cap), err))
    return EnsembleModel(tuple(rounds), "static_fusion", partition, cfg.fingerprint())


def train_ensemble(
    train_ds: Dataset,
    partition: ViewPartition,
    cfg: BoostConfig = BoostConfig(),
    threads: int = 1,
    cache: dict | None = None,
) -> EnsembleModel:
    """Fit the multi-view ensemble.

    ``cache`` may be a dict shared across calls on the *same* training set
    and base config; it memoises the first-round (uniform-weight) fit of each
    view.
    """
    _check_partition(train_ds, partition)

    if threads > 1:
        executor = ThreadPoolExecutor(max_workers=threads)
        pool = lambda fn, items: list(executor.map(fn, items))  # noqa: E731
    else:
        executor = None
        pool = lambda fn, items: [fn(x) for x in items]  # noqa: E731
    try:
        if cfg.mode == "static_fusion":
            return _static_fusion(train_ds, partition, cfg, pool)

        y = train_ds.labels
        signs = 2.0 * y - 1.0
        s = uniform_weights(train_ds.n_samples)
        rounds: list[Round] = []
        sums: list[float] = []
        for t in range(cfg.rounds):
            if t == 0 and cache is not None:
                missing = [v for v in partition.views if v not in cache]
                for v, fit in zip(missing, pool(lambda v: _fit_view(train_ds, v, s, cfg.base), missing)):
                    cache[v] = fit
                fits = [cache[v] for v in partition.views]
            else:
                fits = pool(lambda v: _fit_view(train_ds, v, s, cfg.base), partition.views)
            errors = [float(s[pred != y].sum()) for _, pred in fits]
            best = int(np.argmin(errors))
            err = errors[best]
            if err >= 0.5:
                break
            alpha = _alpha(err, cfg.epsilon_cap)
            model, pred = fits[best]
            rounds.append(Round(partition.views[best], model, alpha, err))
            if err == 0.0:
                break
            s = s * np.exp(-alpha * signs * (2.0 * pred - 1.0))
            s = s / s.sum()
            sums.append(float(s.sum()))
        if not rounds:
            return _static_fusion(train_ds, partition, cfg, pool)
        return EnsembleModel(tuple(rounds), "boosted_pool", partition, cfg.fingerprint(), tuple(sums))
    finally:
        if executor is not None:
            executor.shutdown()


def decision_function(m: EnsembleModel, ds: Dataset) -> np.ndarray:
    needed = max(max(r.view) for r in m.rounds) + 1
    if ds.n_features < needed:
        raise EnsembleError(f"ensemble uses feature {needed - 1}, dataset has {ds.n_features} features")
    score = np.zeros(ds.n_samples)
    for r in m.rounds:
        score += r.alpha * (2.0 * _view_predictions(r.model, ds.samples, r.view) - 1.0)
    return score


def predict_ensemble(m: EnsembleModel, ds: Dataset) -> np.ndarray:
    """Weighted vote; a zero vote total maps to class 1."""
    return (decision_function(m, ds) >= 0).astype(np.int64)


def evaluate(m: EnsembleModel, test: Dataset) -> EvalReport:
    if test.n_samples == 0:
        raise EnsembleError("empty test set")
    pred = predict_ensemble(m, test)
    y = test.labels
    confusion = {
        "tp": int(np.sum((pred == 1) & (y == 1))),
        "fp": int(np.sum((pred == 1) & (y == 0))),
        "tn": int(np.sum((pred == 0) & (y == 0))),
        "fn": int(np.sum((pred == 0) & (y == 1))),
    }
    return EvalReport(
        accuracy=float(np.mean(pred == y)),
        n_samples=test.n_samples,
        confusion=confusion,
        rounds=[{"view": list(r.view), "error": r.error, "alpha": r.alpha} for r in m.rounds],
        mode=m.mode,
    )


def training_error_bound(m: EnsembleModel) -> float:
    """Product of ``2 sqrt(e_t (1 - e_t))`` over boosting rounds."""
    bound = 1.0
    for r in m.rounds:
        bound *= 2.0 * np.sqrt(r.error * (1.0 - r.error))
    return float(bound)
