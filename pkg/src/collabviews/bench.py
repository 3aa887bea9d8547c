"""Four-way accuracy benchmark: whole feature set, interaction-gain views,
collaboration views and exhaustive view search, all on one train/test split.

Outputs, in the run directory:

``bench_report.json``
    Versioned report, validated against :data:`REPORT_SCHEMA`.  It holds only
    quantities fixed by the config and seed, so it is byte-identical across
    reruns and thread counts.
``bench_table.txt``
    One aligned row per dataset, one column per method.
``timings.json``
    Wall-clock seconds per stage (kept out of the report on purpose).
matrix and partition files
    ``collab_matrix.{csv,json}``, ``ig_matrix.{csv,json}`` and
    ``views_<method>.json``; their SHA-256 digests are listed in the report.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import time
from pathlib import Path
from typing import Any, Callable

import jsonschema
import numpy as np

from ._seeds import derive_seed
from .collab import collab_matrix
from .config import RunConfig
from .dataset import Dataset, split_indices, take_rows
from .ensemble import evaluate, train_ensemble
from .interaction import interaction_gain_matrix
from .learner import predict, train
from .matrices import FeatureMatrix
from .views import ViewPartition, build_graph, detect_views, exhaustive_view_search
from .views.community import modularity

SCHEMA_VERSION = 1

COLUMN_TITLES = {
    "whole_set": "Whole feature set",
    "interaction_gain": "Interaction gain",
    "collaboration": "Collaboration",
    "exhaustive": "Exhaustive search",
}

_METHOD_SCHEMA = {
    "type": "object",
    "required": ["status", "accuracy", "views", "split_hash"],
    "properties": {
        "status": {"enum": ["ok", "failed", "pending"]},
        "accuracy": {"type": ["number", "null"], "minimum": 0, "maximum": 1},
        "views": {
            "type": ["array", "null"],
            "items": {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 1},
        },
        "split_hash": {"type": "string"},
        "error": {"type": "string"},
        "files": {"type": "object", "additionalProperties": {"type": "string"}},
        "details": {"type": "object"},
    },
}

REPORT_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema_version", "dataset", "split", "config", "methods", "artifacts"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "dataset": {
            "type": "object",
            "required": ["name", "n_samples", "n_features", "fingerprint"],
            "properties": {
                "name": {"type": "string"},
                "n_samples": {"type": "integer", "minimum": 1},
                "n_features": {"type": "integer", "minimum": 1},
                "fingerprint": {"type": "string"},
            },
        },
        "split": {
            "type": "object",
            "required": ["n_train", "n_test", "hash"],
            "properties": {
                "n_train": {"type": "integer", "minimum": 1},
                "n_test": {"type": "integer", "minimum": 1},
                "hash": {"type": "string"},
            },
        },
        "config": {"type": "object"},
        "methods": {"type": "object", "additionalProperties": _METHOD_SCHEMA},
        "artifacts": {"type": "object", "additionalProperties": {"type": "string", "pattern": "^[0-9a-f]{64}$"}},
    },
}


def validate_report(report: dict[str, Any]) -> None:
    jsonschema.validate(report, REPORT_SCHEMA)


def atomic_write(path: str | Path, data: str | bytes) -> None:
    """Write via a temporary file in the same directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = data.encode("utf-8") if isinstance(data, str) else data
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dump_json(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def split_hash(train_idx: np.ndarray, test_idx: np.ndarray) -> str:
    h = hashlib.sha256()
    h.update(np.asarray(train_idx, dtype="<i8").tobytes())
    h.update(b"|")
    h.update(np.asarray(test_idx, dtype="<i8").tobytes())
    return h.hexdigest()[:16]


def write_matrix(out_dir: Path, stem: str, m: FeatureMatrix) -> dict[str, str]:
    files = {"csv": f"{stem}.csv", "json": f"{stem}.json"}
    atomic_write(out_dir / files["csv"], m.to_csv_text())
    atomic_write(out_dir / files["json"], dump_json(m.to_json_dict()))
    return files


def format_table(name: str, methods: dict[str, dict[str, Any]]) -> str:
    """Aligned text table: one row for the dataset, one column per method."""
    header = ["Dataset"] + [COLUMN_TITLES[m] for m in methods]
    cells = [name]
    for entry in methods.values():
        acc = entry.get("accuracy")
        cells.append("failed" if entry["status"] == "failed" else ("-" if acc is None else f"{100 * acc:.2f}%"))
    widths = [max(len(h), len(c)) for h, c in zip(header, cells)]
    line = lambda row: "  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip()  # noqa: E731
    return "\n".join([line(header), line(["-" * w for w in widths]), line(cells)]) + "\n"


def _views_method(
    cfg: RunConfig,
    train_ds: Dataset,
    test_ds: Dataset,
    matrix: FeatureMatrix,
    tau: float,
    threads: int,
) -> tuple[ViewPartition, float, dict[str, Any]]:
    graph = build_graph(matrix.edge_weights(), tau)
    partition = detect_views(graph, cfg.community)
    model = train_ensemble(train_ds, partition, cfg.boost, threads=threads)
    acc = evaluate(model, test_ds).accuracy
    details = {
        "tau": tau,
        "n_edges": len(graph.edges),
        "modularity": modularity(graph, partition),
        "backend": cfg.community.backend,
        "rounds": len(model.rounds),
    }
    return partition, acc, details


def run_bench(cfg: RunConfig, out_dir: str | Path, threads: int = 1, log: Callable[[str], None] = print) -> dict:
    """Run every requested method and write the report files.

    The report is rewritten after each method, so an interrupted or failing
    run leaves finished methods on disk and marks the rest as ``pending`` or
    ``failed``.  Exceptions from a method are recorded and the run continues;
    the caller decides the exit status from the returned report.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    timings: dict[str, float] = {}

    t0 = time.perf_counter()
    ds = cfg.dataset.load(derive_seed(cfg.seed, "dataset"))
    timings["load"] = time.perf_counter() - t0
    methods = cfg.resolve_methods(ds.n_features)

    train_idx, test_idx = split_indices(ds, cfg.split)
    train_ds, test_ds = take_rows(ds, train_idx), take_rows(ds, test_idx)
    s_hash = split_hash(train_idx, test_idx)

    report: dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "dataset": {
            "name": cfg.dataset.describe(),
            "n_samples": ds.n_samples,
            "n_features": ds.n_features,
            "fingerprint": ds.fingerprint(),
        },
        "split": {"n_train": train_ds.n_samples, "n_test": test_ds.n_samples, "hash": s_hash},
        "config": cfg.echo(),
        "methods": {m: {"status": "pending", "accuracy": None, "views": None, "split_hash": s_hash} for m in methods},
        "artifacts": {},
    }

    def flush() -> None:
        validate_report(report)
        atomic_write(out_dir / "bench_report.json", dump_json(report))
        atomic_write(out_dir / "bench_table.txt", format_table(report["dataset"]["name"], report["methods"]))
        atomic_write(out_dir / "timings.json", dump_json({k: round(v, 6) for k, v in timings.items()}))

    def record_files(files: dict[str, str]) -> None:
        for name in files.values():
            report["artifacts"][name] = hashlib.sha256((out_dir / name).read_bytes()).hexdigest()

    flush()
    for method in methods:
        entry = report["methods"][method]
        t0 = time.perf_counter()
        try:
            if method == "whole_set":
                model = train(train_ds, None, cfg.learner)
                entry["accuracy"] = float(np.mean(predict(model, test_ds) == test_ds.labels))
                entry["views"] = [list(range(ds.n_features))]
            elif method in ("interaction_gain", "collaboration"):
                if method == "collaboration":
                    matrix = collab_matrix(train_ds, cfg.collab, threads=threads)
                    tau, stem = cfg.collab.edge_threshold, "collab_matrix"
                else:
                    matrix = interaction_gain_matrix(train_ds, cfg.discretization, threads=threads)
                    tau, stem = cfg.ig_edge_threshold, "ig_matrix"
                timings[f"{method}.matrix"] = time.perf_counter() - t0
                files = write_matrix(out_dir, stem, matrix)
                partition, acc, details = _views_method(cfg, train_ds, test_ds, matrix, tau, threads)
                files["views"] = f"views_{method}.json"
                atomic_write(out_dir / files["views"], dump_json(partition.to_json()))
                record_files(files)
                entry.update(accuracy=acc, views=partition.to_json(), files=files, details=details)
            else:
                result = exhaustive_view_search(
                    train_ds,
                    test_ds,
                    cfg.boost,
                    validation_fraction=cfg.validation_fraction,
                    seed=derive_seed(cfg.seed, "exhaustive"),
                    threads=threads,
                )
                files = {"views": "views_exhaustive.json"}
                atomic_write(out_dir / files["views"], dump_json(result.partition.to_json()))
                record_files(files)
                entry.update(
                    accuracy=result.accuracy,
                    views=result.partition.to_json(),
                    files=files,
                    details={
                        "validation_accuracy": result.validation_accuracy,
                        "n_candidates": len(result.candidates),
                        "protocol": "select on a validation split of train, score the winner on test",
                    },
                )
            entry["status"] = "ok"
        except Exception as exc:  # recorded, then the run goes on
            entry["status"] = "failed"
            entry["error"] = f"{type(exc).__name__}: {exc}"
        timings[method] = time.perf_counter() - t0
        log(f"{method}: {entry['status']}" + (f" accuracy={entry['accuracy']:.4f}" if entry["accuracy"] is not None else ""))
        flush()
    return report
