from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

from collabviews import Dataset

TESTS = Path(__file__).resolve().parent
FIXTURES = TESTS / "fixtures"
sys.path.insert(0, str(TESTS))  # makes ``oracles`` importable


def make_dataset(x, y, names=None) -> Dataset:
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    names = names or tuple(f"x{k}" for k in range(x.shape[1]))
    return Dataset(x, np.asarray(y), names)


def blobs(n=1000, gap=2.0, seed=0) -> Dataset:
    """Two Gaussian blobs separated by ``gap`` along the first of two axes."""
    rng = np.random.default_rng(seed)
    y = np.arange(n) % 2
    x = rng.standard_normal((n, 2))
    x[:, 0] += gap * (2 * y - 1)
    return make_dataset(x, y)


def rotated_threshold(n=4000, seed=0, flip=0.0) -> Dataset:
    """y = [x0 + x1 > 0]: each coordinate alone has Bayes error 0.25."""
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, 2))
    y = (x[:, 0] + x[:, 1] > 0).astype(int)
    if flip:
        k = int(flip * n)
        idx = rng.choice(n, size=k, replace=False)
        y[idx] = 1 - y[idx]
    return make_dataset(x, y)


def xor_bits(n=5000, seed=0) -> Dataset:
    rng = np.random.default_rng(seed)
    a = rng.integers(0, 2, n)
    b = rng.integers(0, 2, n)
    noise = rng.integers(0, 2, n)
    return make_dataset(np.column_stack([a, b, noise]), a ^ b, ("a", "b", "noise"))


@pytest.fixture
def fig2_matrix_path() -> Path:
    return FIXTURES / "fig2_matrix.csv"


@pytest.fixture
def fig4_partition_path() -> Path:
    return FIXTURES / "fig4_partition.json"


# Acceptance verdicts, echoed in the terminal summary so they survive capture.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
