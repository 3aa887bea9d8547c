"""Weighted undirected feature graph built from a pairwise score matrix."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from ..matrices import FeatureMatrix


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class FeatureGraph:
    n_nodes: int
    edges: tuple[tuple[int, int, float], ...]

    def __post_init__(self) -> None:
        seen = set()
        for i, j, w in self.edges:
            if not 0 <= i < j < self.n_nodes:
                raise GraphError(f"edge ({i}, {j}) must satisfy 0 <= i < j < {self.n_nodes}")
            if not w > 0:
                raise GraphError(f"edge ({i}, {j}) has non-positive weight {w}")
            if (i, j) in seen:
                raise GraphError(f"duplicate edge ({i}, {j})")
            seen.add((i, j))

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n_nodes, self.n_nodes))
        for i, j, w in self.edges:
            a[i, j] = a[j, i] = w
        return a

    def total_weight(self) -> float:
        return float(sum(w for _, _, w in self.edges))

    def to_csv_text(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["i", "j", "weight"])
        for i, j, w in self.edges:
            writer.writerow([i, j, repr(w)])
        return buf.getvalue()

    @classmethod
    def from_csv_text(cls, text: str, n_nodes: int) -> "FeatureGraph":
        rows = list(csv.reader(io.StringIO(text)))
        return cls(n_nodes, tuple((int(i), int(j), float(w)) for i, j, w in rows[1:] if (i, j, w)))


def build_graph(matrix: np.ndarray | FeatureMatrix, tau: float = 0.0) -> FeatureGraph:
    """Edge ``(i, j, m[i, j])`` for every ``i < j`` with ``m[i, j] > tau``."""
    m = matrix.values if isinstance(matrix, FeatureMatrix) else np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise GraphError(f"matrix must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise GraphError("matrix has non-finite entries")
    if np.max(np.abs(m - m.T), initial=0.0) > 1e-12:
        raise GraphError("matrix is not symmetric")
    if np.any(np.diag(m) != 0):
        raise GraphError("matrix diagonal must be zero")
    if np.any(m < 0):
        raise GraphError("matrix has negative entries; floor them before building a graph")
    if tau < 0:
        raise GraphError("tau must be nonnegative")
    n = m.shape[0]
    edges = tuple(
        (i, j, float(m[i, j])) for i in range(n) for j in range(i + 1, n) if m[i, j] > tau
    )
    return FeatureGraph(n, edges)
