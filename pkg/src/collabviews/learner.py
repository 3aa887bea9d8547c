"""Linear-margin base classifier with sample-weight support.

Training minimises a weighted empirical loss plus an L2 penalty by
full-batch subgradient descent from the zero vector, so a model is a pure
function of its inputs.  Features are standardised internally with the
weighted mean and standard deviation of the training rows.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Any

import numpy as np

from ._seeds import fingerprint
from .dataset import Dataset, rng_from_seed

LOSSES = ("hinge", "logistic")


class LearnerError(ValueError):
    """Training data or weights violate the learner's preconditions."""


@dataclass(frozen=True)
class TrainConfig:
    loss: str = "hinge"
    l2_lambda: float = 1e-3
    epochs: int = 200
    learning_rate: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.loss not in LOSSES:
            raise ValueError(f"loss must be one of {LOSSES}, got {self.loss!r}")
        if self.l2_lambda < 0:
            raise ValueError("l2_lambda must be nonnegative")
        if self.epochs < 1:
            raise ValueError("epochs must be positive")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")

    def fingerprint(self) -> str:
        return fingerprint(asdict(self))


@dataclass(frozen=True, eq=False)
class LinearModel:
    weights: np.ndarray
    bias: float
    means: np.ndarray
    scales: np.ndarray
    config_fingerprint: str = ""

    @property
    def n_features(self) -> int:
        return self.weights.shape[0]

    def decision_function(self, samples: np.ndarray) -> np.ndarray:
        samples = np.asarray(samples, dtype=np.float64)
        if samples.ndim != 2 or samples.shape[1] != self.n_features:
            raise LearnerError(
                f"model expects {self.n_features} features, got shape {samples.shape}"
            )
        return ((samples - self.means) / self.scales) @ self.weights + self.bias

    def to_dict(self) -> dict[str, Any]:
        return {
            "weights": self.weights.tolist(),
            "bias": self.bias,
            "means": self.means.tolist(),
            "scales": self.scales.tolist(),
            "config_fingerprint": self.config_fingerprint,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "LinearModel":
        return cls(
            weights=np.asarray(d["weights"], dtype=np.float64),
            bias=float(d["bias"]),
            means=np.asarray(d["means"], dtype=np.float64),
            scales=np.asarray(d["scales"], dtype=np.float64),
            config_fingerprint=d.get("config_fingerprint", ""),
        )


def uniform_weights(n: int) -> np.ndarray:
    return np.full(n, 1.0 / n)


def check_weights(weights: np.ndarray, n: int) -> np.ndarray:
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (n,):
        raise LearnerError(f"expected {n} sample weights, got shape {w.shape}")
    if not np.all(np.isfinite(w)) or np.any(w < 0):
        raise LearnerError("sample weights must be finite and nonnegative")
    if abs(w.sum() - 1.0) > 1e-9:
        raise LearnerError(f"sample weights sum to {w.sum()!r}, expected 1")
    return w


def train(ds: Dataset, weights: np.ndarray | None = None, cfg: TrainConfig = TrainConfig()) -> LinearModel:
    """Fit a linear classifier under the sample distribution ``weights``.

    Step size at epoch ``t`` is ``learning_rate / (1 + t)``.  The bias is not
    penalised.  ``cfg.seed`` does not influence full-batch training; it is
    carried for the fingerprint.
    """
    X = ds.samples
    n = ds.n_samples
    s = uniform_weights(n) if weights is None else check_weights(weights, n)
    if not np.all(np.isfinite(X)):
        raise LearnerError("non-finite feature values")
    y = ds.labels
    w1 = s[y == 1].sum()
    if w1 <= 0 or s[y == 0].sum() <= 0:
        raise LearnerError("both classes need positive total weight")

    means = s @ X
    scales = np.sqrt(s @ (X - means) ** 2)
    scales[scales == 0] = 1.0
    Z = (X - means) / scales
    signs = 2.0 * y - 1.0
    sy = s * signs

    w = np.zeros(X.shape[1])
    b = 0.0
    lam = cfg.l2_lambda
    hinge = cfg.loss == "hinge"
    for t in range(cfg.epochs):
        margins = signs * (Z @ w + b)
        if hinge:
            coef = sy * (margins < 1.0)
        else:
            # d/dm log(1 + e^-m) = -1 / (1 + e^m)
            coef = sy / (1.0 + np.exp(np.clip(margins, -500.0, 500.0)))
        step = cfg.learning_rate / (1.0 + t)
        w = w - step * (lam * w - coef @ Z)
        b = b + step * coef.sum()

    if not (np.all(np.isfinite(w)) and np.isfinite(b)):
        raise LearnerError("training diverged to non-finite parameters")
    return LinearModel(w, float(b), means, scales, cfg.fingerprint())


def predict(model: LinearModel, ds: Dataset) -> np.ndarray:
    """Hard labels; a decision value of exactly zero maps to class 1."""
    return (model.decision_function(ds.samples) >= 0).astype(np.int64)


def weighted_error(model: LinearModel, ds: Dataset, weights: np.ndarray) -> float:
    w = check_weights(weights, ds.n_samples)
    return float(w[predict(model, ds) != ds.labels].sum())


def stratified_folds(labels: np.ndarray, k_folds: int, seed: int) -> np.ndarray:
    """Fold id per row: each class is shuffled and dealt round-robin."""
    labels = np.asarray(labels)
    folds = np.empty(labels.shape[0], dtype=np.int64)
    rng = rng_from_seed(seed)
    for c in (0, 1):
        members = rng.permutation(np.flatnonzero(labels == c))
        folds[members] = np.arange(members.shape[0]) % k_folds
    return folds


def cv_error(ds: Dataset, cfg: TrainConfig = TrainConfig(), k_folds: int = 5, seed: int = 0) -> float:
    """Mean out-of-fold misclassification rate over stratified folds."""
    if k_folds < 2:
        raise LearnerError("k_folds must be at least 2")
    smallest = min(ds.class_counts())
    if smallest < k_folds:
        raise LearnerError(
            f"smallest class has {smallest} rows; stratified {k_folds}-fold CV needs at least {k_folds}"
        )
    folds = stratified_folds(ds.labels, k_folds, seed)
    rates = []
    for k in range(k_folds):
        held = folds == k
        fit_part = Dataset(ds.samples[~held], ds.labels[~held], ds.feature_names)
        model = train(fit_part, None, cfg)
        pred = (model.decision_function(ds.samples[held]) >= 0).astype(np.int64)
        rates.append(float(np.mean(pred != ds.labels[held])))
    total = 0.0
    for r in rates:
        total += r
    return total / k_folds


__all__ = [
    "LearnerError",
    "LinearModel",
    "TrainConfig",
    "check_weights",
    "cv_error",
    "predict",
    "stratified_folds",
    "train",
    "uniform_weights",
    "weighted_error",
]
