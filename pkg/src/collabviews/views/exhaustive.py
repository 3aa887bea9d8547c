"""Exhaustive search over every view partition of a small feature set."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..dataset import Dataset, SplitSpec, split
from .community import MAX_EXHAUSTIVE, ViewPartition, enumerate_partitions


@dataclass(frozen=True)
class ExhaustiveResult:
    partition: ViewPartition
    accuracy: float
    validation_accuracy: float
    candidates: tuple[tuple[ViewPartition, float], ...]


def exhaustive_view_search(
    train: Dataset,
    test: Dataset | None = None,
    cfg=None,
    *,
    validation_fraction: float = 0.3,
    seed: int = 0,
    max_features: int = MAX_EXHAUSTIVE,
    threads: int = 1,
) -> ExhaustiveResult:
    """Pick the partition whose ensemble scores best on a validation split.

    ``train`` is split (stratified, ``validation_fraction``) into a fitting
    part and a validation part.  Every set partition is trained on the
    fitting part and scored on the validation part; the highest score wins,
    ties going to the earliest partition in canonical order.  The winner is
    then retrained on all of ``train`` and scored on ``test``; without a
    test set, ``accuracy`` is the validation accuracy.
    """
    from ..ensemble import BoostConfig, evaluate, train_ensemble

    cfg = cfg if cfg is not None else BoostConfig()
    if train.n_features > max_features:
        raise ValueError(f"exhaustive search is limited to {max_features} features, got {train.n_features}")
    fit_part, val_part = split(train, SplitSpec(validation_fraction, True, seed))
    partitions = list(enumerate_partitions(train.n_features, max_features))
    cache: dict = {}

    def score(p: ViewPartition) -> float:
        return evaluate(train_ensemble(fit_part, p, cfg, cache=cache), val_part).accuracy

    if threads > 1:
        # Cached round-one fits are deterministic, so racing writers store
        # identical values.
        with ThreadPoolExecutor(max_workers=threads) as pool:
            scores = list(pool.map(score, partitions))
    else:
        scores = [score(p) for p in partitions]

    best = int(np.argmax(scores))
    winner = partitions[best]
    if test is not None:
        accuracy = evaluate(train_ensemble(train, winner, cfg), test).accuracy
    else:
        accuracy = scores[best]
    return ExhaustiveResult(winner, accuracy, scores[best], tuple(zip(partitions, scores)))
