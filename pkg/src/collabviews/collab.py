"""Pairwise feature collaboration.

For features ``i`` and ``j`` the cross-validated errors of the base learner on
``{i}``, ``{j}`` and ``{i, j}`` are estimated with one shared fold
assignment.  The pair error is clamped to ``min(e_i, e_j)`` and the
collaboration value is ``min(e_i, e_j) - e_ij``, which therefore lies in
``[0, min(e_i, e_j)]``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from itertools import combinations

import numpy as np

from ._seeds import fingerprint, pair_seed
from .dataset import Dataset, project
from .learner import TrainConfig, cv_error
from .matrices import FeatureMatrix


@dataclass(frozen=True)
class PairErrors:
    e1: float
    e2: float
    e12_raw: float
    e12: float

    @classmethod
    def from_raw(cls, e1: float, e2: float, e12_raw: float) -> "PairErrors":
        return cls(e1, e2, e12_raw, min(e12_raw, min(e1, e2)))


@dataclass(frozen=True)
class CollabConfig:
    k_folds: int = 5
    edge_threshold: float = 0.01
    base: TrainConfig = field(default_factory=TrainConfig)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.k_folds < 2:
            raise ValueError("k_folds must be at least 2")
        if not 0.0 <= self.edge_threshold < 1.0:
            raise ValueError("edge_threshold must lie in [0, 1)")

    def fingerprint(self) -> str:
        return fingerprint(asdict(self))


def pair_errors(ds: Dataset, i: int, j: int, cfg: CollabConfig = CollabConfig()) -> PairErrors:
    if i == j:
        raise ValueError("a feature has no collaboration with itself")
    for k in (i, j):
        if not 0 <= k < ds.n_features:
            raise ValueError(f"feature index {k} out of range")
    lo, hi = min(i, j), max(i, j)
    fold_seed = pair_seed(cfg.seed, lo, hi)
    e_lo = cv_error(project(ds, [lo]), cfg.base, cfg.k_folds, fold_seed)
    e_hi = cv_error(project(ds, [hi]), cfg.base, cfg.k_folds, fold_seed)
    e_pair = cv_error(project(ds, [lo, hi]), cfg.base, cfg.k_folds, fold_seed)
    e1, e2 = (e_lo, e_hi) if i < j else (e_hi, e_lo)
    return PairErrors.from_raw(e1, e2, e_pair)


def collab_value(pe: PairErrors) -> float:
    return min(pe.e1, pe.e2) - pe.e12


def collab_matrix(ds: Dataset, cfg: CollabConfig = CollabConfig(), threads: int = 1) -> FeatureMatrix:
    """Collaboration value of every feature pair.

    Each pair is computed once (upper triangle) and mirrored.  Pair results
    depend only on ``pair_seed(cfg.seed, i, j)``, so any ``threads`` value
    gives the same matrix.
    """
    f = ds.n_features
    if f < 2:
        raise ValueError("collaboration needs at least two features")
    pairs = list(combinations(range(f), 2))

    def job(pair: tuple[int, int]) -> PairErrors:
        return pair_errors(ds, pair[0], pair[1], cfg)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(job, pairs))
    else:
        results = [job(p) for p in pairs]

    values = np.zeros((f, f))
    details = {}
    for (i, j), pe in zip(pairs, results):
        v = collab_value(pe)
        values[i, j] = v
        values[j, i] = v
        details[f"{i},{j}"] = asdict(pe)
    return FeatureMatrix(
        values,
        ds.feature_names,
        kind="collaboration",
        config_fingerprint=fingerprint({"config": cfg.fingerprint(), "data": ds.fingerprint()}),
        details={"pair_errors": details, "k_folds": cfg.k_folds, "seed": cfg.seed},
    )


def pair_errors_of(matrix: FeatureMatrix, i: int, j: int) -> PairErrors:
    """Recorded errors of pair ``(i, j)`` from a collaboration matrix."""
    lo, hi = min(i, j), max(i, j)
    d = matrix.details["pair_errors"][f"{lo},{hi}"]
    return PairErrors(**d)
