"""Interaction gain: three-way mutual information normalised by entropies.

All quantities are plug-in estimates over discretised columns, in bits.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from functools import cached_property
from itertools import combinations

import numpy as np

from ._seeds import fingerprint
from .dataset import Dataset
from .matrices import FeatureMatrix


@dataclass(frozen=True)
class DiscretizationConfig:
    n_bins: int = 8
    strategy: str = "equal_frequency"

    def __post_init__(self) -> None:
        if self.n_bins < 2:
            raise ValueError("n_bins must be at least 2")
        if self.strategy != "equal_frequency":
            raise ValueError(f"unsupported strategy {self.strategy!r}")


def discretize(column: np.ndarray, cfg: DiscretizationConfig = DiscretizationConfig()) -> np.ndarray:
    """Equal-frequency bin index per value.

    Columns with at most ``n_bins`` distinct values are already discrete and
    are mapped to the rank of each value.  Otherwise the edges are the
    ``k / n_bins`` quantiles and a value equal to an edge falls in the lower
    bin; repeated values can collapse bins.
    """
    x = np.asarray(column, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("column must be one-dimensional")
    if x.shape[0] < cfg.n_bins:
        raise ValueError(f"column has {x.shape[0]} values, fewer than {cfg.n_bins} bins")
    if not np.all(np.isfinite(x)):
        raise ValueError("column contains non-finite values")
    distinct, ranks = np.unique(x, return_inverse=True)
    if distinct.shape[0] <= cfg.n_bins:
        return ranks.astype(np.int64)
    edges = np.quantile(x, np.arange(1, cfg.n_bins) / cfg.n_bins)
    return np.searchsorted(edges, x, side="left").astype(np.int64)


@dataclass(frozen=True, eq=False)
class DiscreteJointDistribution:
    """Empirical joint law of (x_i bin, x_j bin, label) as a dense table.

    ``table[a, b, c]`` is the probability of the triple; axis values are the
    sorted distinct codes listed in ``codes``.
    """

    table: np.ndarray
    codes: tuple[np.ndarray, np.ndarray, np.ndarray]

    @property
    def support(self) -> list[tuple[int, int, int]]:
        idx = np.argwhere(self.table > 0)
        return [(int(self.codes[0][a]), int(self.codes[1][b]), int(self.codes[2][c])) for a, b, c in idx]

    @property
    def probabilities(self) -> np.ndarray:
        return self.table[self.table > 0]

    @cached_property
    def p_i(self) -> np.ndarray:
        return self.table.sum(axis=(1, 2))

    @cached_property
    def p_j(self) -> np.ndarray:
        return self.table.sum(axis=(0, 2))

    @cached_property
    def p_y(self) -> np.ndarray:
        return self.table.sum(axis=(0, 1))

    @cached_property
    def p_ij(self) -> np.ndarray:
        return self.table.sum(axis=2)

    @cached_property
    def p_iy(self) -> np.ndarray:
        return self.table.sum(axis=1)

    @cached_property
    def p_jy(self) -> np.ndarray:
        return self.table.sum(axis=0)


def joint_distribution(xi_bins, xj_bins, labels) -> DiscreteJointDistribution:
    a = np.asarray(xi_bins)
    b = np.asarray(xj_bins)
    c = np.asarray(labels)
    if not a.shape == b.shape == c.shape or a.ndim != 1:
        raise ValueError("inputs must be equal-length vectors")
    if a.shape[0] == 0:
        raise ValueError("inputs are empty")
    ca, ia = np.unique(a, return_inverse=True)
    cb, ib = np.unique(b, return_inverse=True)
    cc, ic = np.unique(c, return_inverse=True)
    counts = np.zeros((ca.shape[0], cb.shape[0], cc.shape[0]))
    np.add.at(counts, (ia, ib, ic), 1.0)
    return DiscreteJointDistribution(counts / a.shape[0], (ca, cb, cc))


def three_way_mi(d: DiscreteJointDistribution) -> float:
    """Signed interaction information, in bits.

    Sum over the joint support of
    ``p(i,j,y) * log2(p(i,j,y) p(i) p(j) p(y) / (p(i,j) p(i,y) p(j,y)))``.
    """
    a, b, c = np.nonzero(d.table)
    p = d.table[a, b, c]
    num = p * d.p_i[a] * d.p_j[b] * d.p_y[c]
    den = d.p_ij[a, b] * d.p_iy[a, c] * d.p_jy[b, c]
    return float(np.sum(p * np.log2(num / den)))


def entropy(marginal: np.ndarray) -> float:
    p = np.asarray(marginal, dtype=np.float64)
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def interaction_gain(d: DiscreteJointDistribution) -> float:
    denom = entropy(d.p_i) + entropy(d.p_j)
    if denom == 0.0:
        return 0.0
    return three_way_mi(d) / denom


def interaction_gain_matrix(
    ds: Dataset, cfg: DiscretizationConfig = DiscretizationConfig(), threads: int = 1
) -> FeatureMatrix:
    """Pairwise interaction gain; signed values are kept in the matrix.

    Graph construction floors negative entries at zero
    (:meth:`FeatureMatrix.edge_weights`).
    """
    f = ds.n_features
    if f < 2:
        raise ValueError("interaction gain needs at least two features")
    bins = [discretize(ds.samples[:, k], cfg) for k in range(f)]
    pairs = list(combinations(range(f), 2))

    def job(pair: tuple[int, int]) -> float:
        i, j = pair
        return interaction_gain(joint_distribution(bins[i], bins[j], ds.labels))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            gains = list(pool.map(job, pairs))
    else:
        gains = [job(p) for p in pairs]

    values = np.zeros((f, f))
    for (i, j), g in zip(pairs, gains):
        values[i, j] = values[j, i] = g
    return FeatureMatrix(
        values,
        ds.feature_names,
        kind="interaction_gain",
        config_fingerprint=fingerprint({"config": asdict(cfg), "data": ds.fingerprint()}),
        details={
            "n_bins": cfg.n_bins,
            "negative_entries_floored_for_edges": int(np.sum(values < 0) // 2),
        },
    )
