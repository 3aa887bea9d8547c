"""Symmetric feature-by-feature score matrices and their file formats.

Both pairwise criteria (collaboration values and interaction gain) produce a
:class:`FeatureMatrix`, so either can feed view discovery.

CSV layout: a header ``feature,<name_1>,...,<name_f>`` followed by one row per
feature, ``<name_i>,<v_i1>,...,<v_if>``; numbers use the shortest decimal
form that round-trips.  JSON carries the same grid plus metadata.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np


@dataclass(frozen=True, eq=False)
class FeatureMatrix:
    values: np.ndarray
    feature_names: tuple[str, ...]
    kind: str = "collaboration"
    config_fingerprint: str = ""
    details: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.float64, copy=True)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ValueError(f"matrix must be square, got shape {values.shape}")
        if len(self.feature_names) != values.shape[0]:
            raise ValueError("one feature name per row is required")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "feature_names", tuple(str(n) for n in self.feature_names))

    @property
    def n_features(self) -> int:
        return self.values.shape[0]

    def edge_weights(self) -> np.ndarray:
        """Values floored at zero, as used for graph edges."""
        return np.maximum(self.values, 0.0)

    def to_csv_text(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["feature", *self.feature_names])
        for name, row in zip(self.feature_names, self.values.tolist()):
            writer.writerow([name, *(repr(v) for v in row)])
        return buf.getvalue()

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "feature_names": list(self.feature_names),
            "values": self.values.tolist(),
            "config_fingerprint": self.config_fingerprint,
            "details": self.details,
        }

    @classmethod
    def from_json_dict(cls, d: dict[str, Any]) -> "FeatureMatrix":
        return cls(
            values=np.asarray(d["values"], dtype=np.float64),
            feature_names=tuple(d["feature_names"]),
            kind=d.get("kind", "collaboration"),
            config_fingerprint=d.get("config_fingerprint", ""),
            details=d.get("details", {}),
        )


def matrix_from_csv_text(text: str, kind: str = "collaboration") -> FeatureMatrix:
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    if not rows:
        raise ValueError("empty matrix file")
    names = [c.strip() for c in rows[0][1:]]
    body = rows[1:]
    if len(body) != len(names):
        raise ValueError(f"matrix has {len(body)} rows for {len(names)} columns")
    values = []
    for r_no, row in enumerate(body, start=2):
        if len(row) != len(names) + 1:
            raise ValueError(f"matrix row {r_no} has {len(row) - 1} values, expected {len(names)}")
        try:
            values.append([float(c) for c in row[1:]])
        except ValueError as exc:
            raise ValueError(f"matrix row {r_no}: {exc}") from None
    return FeatureMatrix(np.array(values, dtype=np.float64), tuple(names), kind=kind)


def read_matrix(path: str | Path) -> FeatureMatrix:
    """Load a matrix from ``.json`` or ``.csv`` (chosen by suffix)."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".json":
        return FeatureMatrix.from_json_dict(json.loads(text))
    return matrix_from_csv_text(text)
