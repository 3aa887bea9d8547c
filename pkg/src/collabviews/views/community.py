"""Disjoint community detection on feature graphs, and set partitions.

Partitions are kept canonical: members ascending, views ordered by their
smallest member.  Set partitions of ``{0..n-1}`` are enumerated as
restricted growth strings in lexicographic order, which is also the
tie-breaking order wherever a "smallest" partition is required.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from ..dataset import rng_from_seed
from .graph import FeatureGraph

BACKENDS = ("label_propagation", "greedy_modularity", "exhaustive_modularity")
MAX_EXHAUSTIVE = 12


@dataclass(frozen=True)
class ViewPartition:
    views: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        views = tuple(sorted((tuple(sorted(int(k) for k in v)) for v in self.views), key=lambda v: v[:1]))
        seen: set[int] = set()
        for v in views:
            if not v:
                raise ValueError("views must be nonempty")
            if seen.intersection(v) or len(set(v)) != len(v):
                raise ValueError("views must be disjoint")
            seen.update(v)
        if seen and seen != set(range(len(seen))):
            raise ValueError(f"views must cover 0..{len(seen) - 1} exactly")
        object.__setattr__(self, "views", views)

    @property
    def n_features(self) -> int:
        return sum(len(v) for v in self.views)

    @classmethod
    def from_labels(cls, labels: Sequence[int]) -> "ViewPartition":
        groups: dict[int, list[int]] = {}
        for node, lab in enumerate(labels):
            groups.setdefault(int(lab), []).append(node)
        return cls(tuple(tuple(g) for g in groups.values()))

    def labels(self) -> list[int]:
        out = [0] * self.n_features
        for c, v in enumerate(self.views):
            for k in v:
                out[k] = c
        return out

    def relabel(self, perm: Sequence[int]) -> "ViewPartition":
        """Partition obtained by mapping node ``k`` to ``perm[k]``."""
        return ViewPartition(tuple(tuple(perm[k] for k in v) for v in self.views))

    def to_json(self) -> list[list[int]]:
        return [list(v) for v in self.views]

    @classmethod
    def from_json(cls, data: Sequence[Sequence[int]]) -> "ViewPartition":
        return cls(tuple(tuple(int(k) for k in v) for v in data))

    def one_based(self) -> str:
        return " | ".join("{" + ", ".join(str(k + 1) for k in v) + "}" for v in self.views)


@dataclass(frozen=True)
class CommunityConfig:
    backend: str = "greedy_modularity"
    max_iters: int = 100
    seed: int = 0

    def __post_init__(self) -> None:
        if self.backend not in BACKENDS:
            raise ValueError(f"backend must be one of {BACKENDS}, got {self.backend!r}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be positive")


def bell_number(n: int) -> int:
    """Bell number by the Bell triangle."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for v in row:
            nxt.append(nxt[-1] + v)
        row = nxt
    return row[0]


def restricted_growth_strings(n: int) -> Iterator[tuple[int, ...]]:
    """All RGS of length ``n`` (``a[0] = 0``, ``a[i] <= max(a[:i]) + 1``), lexicographically."""
    if n < 1:
        raise ValueError("n must be positive")
    a = [0] * n
    while True:
        yield tuple(a)
        prefix_max = [0] * n
        cur = 0
        for k in range(n):
            prefix_max[k] = cur
            cur = max(cur, a[k])
        for i in range(n - 1, 0, -1):
            if a[i] <= prefix_max[i]:
                a[i] += 1
                for k in range(i + 1, n):
                    a[k] = 0
                break
        else:
            return


def enumerate_partitions(f: int, limit: int = MAX_EXHAUSTIVE) -> Iterator[ViewPartition]:
    if f > limit:
        raise ValueError(f"{f} features have Bell({f}) = {bell_number(f)} partitions; limit is {limit} features")
    for rgs in restricted_growth_strings(f):
        yield ViewPartition.from_labels(rgs)


def modularity(g: FeatureGraph, partition: ViewPartition | Sequence[int]) -> float:
    """Weighted modularity ``sum_c (e_c / m - (d_c / 2m)^2)``; zero for an edgeless graph."""
    labels = partition.labels() if isinstance(partition, ViewPartition) else list(partition)
    return _modularity_from_labels(g.edges, g.total_weight(), _degrees(g), labels)


def _degrees(g: FeatureGraph) -> list[float]:
    d = [0.0] * g.n_nodes
    for i, j, w in g.edges:
        d[i] += w
        d[j] += w
    return d


def _modularity_from_labels(edges, m: float, degrees: Sequence[float], labels: Sequence[int]) -> float:
    if m == 0:
        return 0.0
    k = max(labels) + 1
    inside = [0.0] * k
    deg = [0.0] * k
    for i, j, w in edges:
        if labels[i] == labels[j]:
            inside[labels[i]] += w
    for node, lab in enumerate(labels):
        deg[lab] += degrees[node]
    q = 0.0
    for c in range(k):
        q += inside[c] / m - (deg[c] / (2.0 * m)) ** 2
    return q


def _label_propagation(g: FeatureGraph, cfg: CommunityConfig) -> ViewPartition:
    n = g.n_nodes
    neighbours: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    for i, j, w in g.edges:
        neighbours[i].append((j, w))
        neighbours[j].append((i, w))
    labels = list(range(n))
    rng = rng_from_seed(cfg.seed)
    for _ in range(cfg.max_iters):
        changed = False
        for node in rng.permutation(n):
            if not neighbours[node]:
                continue
            score: dict[int, float] = {}
            for other, w in neighbours[node]:
                score[labels[other]] = score.get(labels[other], 0.0) + w
            best = min(score, key=lambda lab: (-score[lab], lab))
            if best != labels[node]:
                labels[node] = best
                changed = True
        if not changed:
            break
    return ViewPartition.from_labels(labels)


def _greedy_modularity(g: FeatureGraph) -> ViewPartition:
    m = g.total_weight()
    communities = [[k] for k in range(g.n_nodes)]
    if m == 0:
        return ViewPartition(tuple(tuple(c) for c in communities))
    adj = g.adjacency()
    degrees = adj.sum(axis=1)
    while len(communities) > 1:
        best = None
        for a in range(len(communities)):
            for b in range(a + 1, len(communities)):
                between = float(adj[np.ix_(communities[a], communities[b])].sum())
                if between == 0.0:
                    continue
                da = float(degrees[communities[a]].sum())
                db = float(degrees[communities[b]].sum())
                gain = between / m - 2.0 * da * db / (2.0 * m) ** 2
                if best is None or gain > best[0]:
                    best = (gain, a, b)
        if best is None or not best[0] > 0:
            break
        _, a, b = best
        communities[a] = sorted(communities[a] + communities[b])
        del communities[b]
        communities.sort(key=lambda c: c[0])
    return ViewPartition(tuple(tuple(c) for c in communities))


def _exhaustive_modularity(g: FeatureGraph) -> ViewPartition:
    if g.n_nodes > MAX_EXHAUSTIVE:
        raise ValueError(
            f"exhaustive_modularity supports at most {MAX_EXHAUSTIVE} nodes, got {g.n_nodes}"
        )
    m = g.total_weight()
    degrees = _degrees(g)
    # Zero-degree nodes do not move the score; they stay singletons, as in the
    # other backends, and the search runs over the connected nodes only.
    active = [k for k in range(g.n_nodes) if degrees[k] > 0]
    isolated = [(k,) for k in range(g.n_nodes) if degrees[k] == 0]
    if not active:
        return ViewPartition(tuple(isolated))
    pos = {node: k for k, node in enumerate(active)}
    edges = tuple((pos[i], pos[j], w) for i, j, w in g.edges)
    sub_degrees = [degrees[k] for k in active]
    best_q, best_labels = None, None
    for labels in restricted_growth_strings(len(active)):
        q = _modularity_from_labels(edges, m, sub_degrees, labels)
        if best_q is None or q > best_q:
            best_q, best_labels = q, labels
    groups: dict[int, list[int]] = {}
    for node, lab in zip(active, best_labels):
        groups.setdefault(lab, []).append(node)
    return ViewPartition(tuple(tuple(v) for v in groups.values()) + tuple(isolated))


def detect_views(g: FeatureGraph, cfg: CommunityConfig = CommunityConfig()) -> ViewPartition:
    """Disjoint covering partition of the graph's nodes into views."""
    if g.n_nodes < 1:
        raise ValueError("graph has no nodes")
    if cfg.backend == "label_propagation":
        return _label_propagation(g, cfg)
    if cfg.backend == "greedy_modularity":
        return _greedy_modularity(g)
    return _exhaustive_modularity(g)
