"""Tabular binary-classification datasets: CSV I/O, synthetic generation,
train/test splitting and column projection."""

from __future__ import annotations

import csv
import hashlib
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np

_MASK = (1 << 64) - 1


class DatasetError(ValueError):
    """Raised for malformed inputs or violated dataset contracts."""


def rng_from_seed(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed & _MASK)


@dataclass(frozen=True, eq=False)
class Dataset:
    samples: np.ndarray
    labels: np.ndarray
    feature_names: tuple[str, ...]
    meta: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        samples = np.array(self.samples, dtype=np.float64, copy=True)
        labels = np.array(self.labels, copy=True)
        if samples.ndim != 2:
            raise DatasetError("samples must be a 2-D matrix")
        n, f = samples.shape
        if n < 1 or f < 1:
            raise DatasetError(f"dataset needs at least one row and one feature, got {n}x{f}")
        if labels.shape != (n,):
            raise DatasetError(f"labels length {labels.shape} does not match {n} rows")
        if not np.all((labels == 0) | (labels == 1)):
            bad = int(np.flatnonzero((labels != 0) & (labels != 1))[0])
            raise DatasetError(f"label at row {bad} is {labels[bad]!r}, expected 0 or 1")
        names = tuple(str(x) for x in self.feature_names)
        if len(names) != f:
            raise DatasetError(f"{len(names)} feature names for {f} columns")
        if len(set(names)) != f:
            raise DatasetError("feature names must be unique")
        labels = labels.astype(np.int64)
        samples.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "feature_names", names)
        object.__setattr__(self, "meta", dict(self.meta))

    @property
    def n_samples(self) -> int:
        return self.samples.shape[0]

    @property
    def n_features(self) -> int:
        return self.samples.shape[1]

    def class_counts(self) -> tuple[int, int]:
        n1 = int(self.labels.sum())
        return self.n_samples - n1, n1

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        h.update(np.ascontiguousarray(self.samples).tobytes())
        h.update(np.ascontiguousarray(self.labels).tobytes())
        h.update("\x1f".join(self.feature_names).encode("utf-8"))
        return h.hexdigest()[:16]

    def equals(self, other: "Dataset") -> bool:
        """Bit-exact equality of samples, labels and names (meta ignored)."""
        return (
            self.feature_names == other.feature_names
            and self.samples.shape == other.samples.shape
            and self.samples.tobytes() == other.samples.tobytes()
            and np.array_equal(self.labels, other.labels)
        )


@dataclass(frozen=True)
class SyntheticSpec:
    n_samples: int
    n_features: int
    n_informative: int = 2
    n_redundant: int = 0
    class_sep: float = 1.0
    flip_y: float = 0.0
    seed: int = 0

    def validate(self) -> None:
        if self.n_samples < 2:
            raise DatasetError("n_samples must be at least 2")
        if self.n_features < 1:
            raise DatasetError("n_features must be positive")
        if self.n_informative < 1:
            raise DatasetError("n_informative must be at least 1")
        if self.n_redundant < 0:
            raise DatasetError("n_redundant must be nonnegative")
        if self.n_informative + self.n_redundant > self.n_features:
            raise DatasetError(
                f"n_informative + n_redundant = {self.n_informative + self.n_redundant}"
                f" exceeds n_features = {self.n_features}"
            )
        if not self.class_sep > 0:
            raise DatasetError("class_sep must be positive")
        if not 0.0 <= self.flip_y < 0.5:
            raise DatasetError("flip_y must lie in [0, 0.5)")


@dataclass(frozen=True)
class SplitSpec:
    test_fraction: float = 0.3
    stratified: bool = True
    seed: int = 0


# Named generator settings used by the CLI presets and the benchmarks.
SYNTHETIC_PRESETS: dict[str, SyntheticSpec] = {
    "synthetic1": SyntheticSpec(1000, 20, n_informative=2, n_redundant=2, class_sep=1.0, flip_y=0.01),
    "synthetic2": SyntheticSpec(10000, 10, n_informative=2, n_redundant=2, class_sep=1.0, flip_y=0.01),
}


def _parse_label(cell: str, row: int) -> int:
    try:
        value = float(cell)
    except ValueError:
        raise DatasetError(f"row {row}: label {cell!r} is not numeric") from None
    if value not in (0.0, 1.0):
        raise DatasetError(f"row {row}: label {cell!r} is outside {{0, 1}}")
    return int(value)


def load_csv(path: str | Path, label_column: str | int = "label") -> Dataset:
    """Read a headed CSV file; ``label_column`` is a header name or column index.

    Row numbers in error messages count the header as row 1.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such dataset file: {path}")
    with path.open("r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DatasetError(f"{path}: empty file") from None
        seen: set[str] = set()
        for name in header:
            if name in seen:
                raise DatasetError(f"{path}: duplicate column name {name!r}")
            seen.add(name)

        if isinstance(label_column, int):
            if not -len(header) <= label_column < len(header):
                raise DatasetError(f"{path}: label column index {label_column} out of range")
            label_idx = label_column % len(header)
        elif label_column in header:
            label_idx = header.index(label_column)
        else:
            raise DatasetError(f"{path}: no label column {label_column!r} in header")

        feature_idx = [k for k in range(len(header)) if k != label_idx]
        rows: list[list[float]] = []
        labels: list[int] = []
        for row_no, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise DatasetError(f"{path}: row {row_no} has {len(row)} cells, expected {len(header)}")
            values = []
            for k in feature_idx:
                cell = row[k].strip()
                try:
                    v = float(cell)
                except ValueError:
                    raise DatasetError(
                        f"{path}: row {row_no}, column {header[k]!r}: cannot parse {cell!r}"
                    ) from None
                if not math.isfinite(v):
                    raise DatasetError(f"{path}: row {row_no}, column {header[k]!r}: non-finite value")
                values.append(v)
            rows.append(values)
            labels.append(_parse_label(row[label_idx].strip(), row_no))
    if not rows:
        raise DatasetError(f"{path}: no data rows")
    return Dataset(
        samples=np.array(rows, dtype=np.float64).reshape(len(rows), len(feature_idx)),
        labels=np.array(labels, dtype=np.int64),
        feature_names=tuple(header[k] for k in feature_idx),
        meta={"source": str(path)},
    )


def to_csv_text(ds: Dataset, label_column: str = "label") -> str:
    """Canonical CSV text: shortest round-trip decimals, label column last."""
    if label_column in ds.feature_names:
        raise DatasetError(f"feature name {label_column!r} collides with the label column")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([*ds.feature_names, label_column])
    for row, y in zip(ds.samples.tolist(), ds.labels.tolist()):
        writer.writerow([repr(v) for v in row] + [str(y)])
    return buf.getvalue()


def write_csv(ds: Dataset, path: str | Path, label_column: str = "label") -> None:
    Path(path).write_text(to_csv_text(ds, label_column), encoding="utf-8")


def generate_synthetic(spec: SyntheticSpec) -> Dataset:
    """Two Gaussian clusters at opposite hypercube vertices.

    Informative columns are unit-variance noise around ``+/- class_sep * v``
    for a random sign vector ``v``; redundant columns are fixed random linear
    combinations of the informative ones; the rest are standard normal.
    Rows and columns are shuffled and the column roles recorded in ``meta``.
    """
    spec.validate()
    rng = rng_from_seed(spec.seed)
    n, f, k, r = spec.n_samples, spec.n_features, spec.n_informative, spec.n_redundant

    n1 = n // 2
    labels = np.concatenate([np.zeros(n - n1, dtype=np.int64), np.ones(n1, dtype=np.int64)])
    vertex = rng.choice(np.array([-1.0, 1.0]), size=k)
    signs = (2.0 * labels - 1.0)[:, None]
    informative = rng.standard_normal((n, k)) + signs * (spec.class_sep * vertex)
    mixing = rng.uniform(-1.0, 1.0, size=(k, r))
    redundant = informative @ mixing
    noise = rng.standard_normal((n, f - k - r))
    samples = np.hstack([informative, redundant, noise])

    n_flip = int(math.floor(spec.flip_y * n))
    if n_flip:
        flipped = rng.choice(n, size=n_flip, replace=False)
        labels[flipped] = 1 - labels[flipped]

    rows = rng.permutation(n)
    cols = rng.permutation(f)
    samples = samples[rows][:, cols]
    labels = labels[rows]
    meta = {
        "generator": "hypercube",
        "seed": spec.seed,
        "informative": [int(j) for j in np.flatnonzero(cols < k)],
        "redundant": [int(j) for j in np.flatnonzero((cols >= k) & (cols < k + r))],
        "noise": [int(j) for j in np.flatnonzero(cols >= k + r)],
    }
    return Dataset(samples, labels, tuple(f"f{j}" for j in range(f)), meta)


def generate_blocks(n_samples: int = 1500, seed: int = 0, flip_y: float = 0.0, nuisance: float = 1.0) -> Dataset:
    """Six features in two planted blocks, ``{0, 1, 2, 3}`` and ``{4, 5}``.

    Each block carries its own label component as a within-block contrast,
    ``u = (x0 + x1 - x2 - x3) / 2`` and ``v = (x4 - x5) / sqrt(2)`` over
    independent standard normals.  A shared per-block offset with standard
    deviation ``nuisance`` is then added to every column of the block, so a
    single column says little about the label while the right pair inside a
    block cancels the offset.  The label is ``[u > t] OR [v > t]`` with ``t``
    the standard normal 75th percentile, so each component fires for a
    quarter of the rows.
    """
    if n_samples < 4:
        raise DatasetError("n_samples must be at least 4")
    if not 0.0 <= flip_y < 0.5:
        raise DatasetError("flip_y must lie in [0, 0.5)")
    if nuisance < 0:
        raise DatasetError("nuisance must be nonnegative")
    rng = rng_from_seed(seed)
    x = rng.standard_normal((n_samples, 6))
    u = (x[:, 0] + x[:, 1] - x[:, 2] - x[:, 3]) / 2.0
    v = (x[:, 4] - x[:, 5]) / math.sqrt(2.0)
    offsets = nuisance * rng.standard_normal((n_samples, 2))
    x[:, :4] += offsets[:, :1]
    x[:, 4:] += offsets[:, 1:]
    t = 0.6744897501960817
    labels = ((u > t) | (v > t)).astype(np.int64)
    n_flip = int(math.floor(flip_y * n_samples))
    if n_flip:
        flipped = rng.choice(n_samples, size=n_flip, replace=False)
        labels[flipped] = 1 - labels[flipped]
    meta = {"generator": "blocks", "seed": seed, "nuisance": nuisance, "blocks": [[0, 1, 2, 3], [4, 5]]}
    return Dataset(x, labels, tuple(f"f{j}" for j in range(6)), meta)


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def split_indices(ds: Dataset, spec: SplitSpec) -> tuple[np.ndarray, np.ndarray]:
    """Row indices (ascending) of the train and test parts.

    The test size is ``floor(n * test_fraction + 0.5)``.  In stratified mode
    it is apportioned across classes by largest remainder (ties to class 0)
    and each class keeps at least one row on both sides.
    """
    if not 0.0 < spec.test_fraction < 1.0:
        raise DatasetError("test_fraction must lie in (0, 1)")
    n = ds.n_samples
    n_test = _round_half_up(n * spec.test_fraction)
    if n_test < 1 or n - n_test < 1:
        raise DatasetError(f"split of {n} rows at {spec.test_fraction} leaves an empty part")
    rng = rng_from_seed(spec.seed)
    if not spec.stratified:
        perm = rng.permutation(n)
        return np.sort(perm[n_test:]), np.sort(perm[:n_test])

    members = [np.flatnonzero(ds.labels == c) for c in (0, 1)]
    for c, m in enumerate(members):
        if len(m) < 2:
            raise DatasetError(f"class {c} has {len(m)} rows; stratified split needs at least 2")
    quotas = [len(m) * n_test / n for m in members]
    counts = [int(math.floor(q)) for q in quotas]
    leftover = n_test - sum(counts)
    order = sorted(range(2), key=lambda c: (-(quotas[c] - counts[c]), c))
    for c in order[:leftover]:
        counts[c] += 1
    counts = [min(max(cnt, 1), len(m) - 1) for cnt, m in zip(counts, members)]

    test_parts, train_parts = [], []
    for cnt, m in zip(counts, members):
        perm = rng.permutation(m)
        test_parts.append(perm[:cnt])
        train_parts.append(perm[cnt:])
    return np.sort(np.concatenate(train_parts)), np.sort(np.concatenate(test_parts))


def take_rows(ds: Dataset, rows: np.ndarray) -> Dataset:
    return Dataset(ds.samples[rows], ds.labels[rows], ds.feature_names, ds.meta)


def split(ds: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset]:
    train_rows, test_rows = split_indices(ds, spec)
    return take_rows(ds, train_rows), take_rows(ds, test_rows)


def project(ds: Dataset, feature_indices: Sequence[int]) -> Dataset:
    idx = [int(i) for i in feature_indices]
    if not idx:
        raise DatasetError("projection needs at least one feature")
    if len(set(idx)) != len(idx):
        raise DatasetError(f"duplicate feature index in {idx}")
    bad = [i for i in idx if not 0 <= i < ds.n_features]
    if bad:
        raise DatasetError(f"feature index {bad[0]} out of range for {ds.n_features} features")
    return Dataset(ds.samples[:, idx], ds.labels, tuple(ds.feature_names[i] for i in idx), ds.meta)
