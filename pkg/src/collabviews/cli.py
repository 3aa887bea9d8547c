"""Command-line interface: ``collabviews <command> [options]``.

Exit codes: 0 success, 1 usage or configuration error, 2 data error,
3 internal error.  Output files default to ``$COLLABVIEWS_OUTPUT_DIR`` (or
``./collabviews-out``) and are written atomically.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .bench import atomic_write, dump_json, format_table, run_bench, write_matrix
from .collab import CollabConfig, collab_matrix
from .config import (
    PRESETS,
    ConfigError,
    build_run_config,
    load_config_file,
    nest,
    parse_override,
)
from .dataset import (
    SYNTHETIC_PRESETS,
    Dataset,
    DatasetError,
    SyntheticSpec,
    generate_blocks,
    generate_synthetic,
    load_csv,
    to_csv_text,
)
from .ensemble import BoostConfig, EnsembleModel, evaluate, train_ensemble
from .interaction import DiscretizationConfig, interaction_gain_matrix
from .learner import TrainConfig
from .matrices import read_matrix
from .views import CommunityConfig, ViewPartition, build_graph, detect_views
from .views.community import BACKENDS, modularity

ENV_OUTPUT_DIR = "COLLABVIEWS_OUTPUT_DIR"
EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit with 2
        raise UsageError(f"{self.prog}: {message}")


def default_output_dir() -> Path:
    return Path(os.environ.get(ENV_OUTPUT_DIR) or "collabviews-out")


def _out_dir(args) -> Path:
    return Path(args.out_dir) if args.out_dir else default_output_dir()


def _load_data(args) -> Dataset:
    label: str | int = args.label_column
    if isinstance(label, str) and label.lstrip("-").isdigit():
        label = int(label)
    return load_csv(args.data, label)


def _train_config(args) -> TrainConfig:
    return TrainConfig(
        loss=args.loss, l2_lambda=args.l2_lambda, epochs=args.epochs, learning_rate=args.learning_rate
    )


def _read_partition(path: str) -> ViewPartition:
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"no such partition file: {p}")
    data = json.loads(p.read_text(encoding="utf-8"))
    if isinstance(data, dict):
        data = data.get("views")
    if not isinstance(data, list):
        raise DatasetError(f"{p}: expected a list of views")
    return ViewPartition.from_json(data)


# -- commands ---------------------------------------------------------------


def cmd_synth(args) -> int:
    if args.preset == "blocks":
        ds = generate_blocks(args.n_samples or 1500, seed=args.seed)
    else:
        if args.preset:
            spec = SYNTHETIC_PRESETS[args.preset]
            overrides = {
                k: v
                for k, v in {
                    "n_samples": args.n_samples,
                    "n_features": args.n_features,
                    "n_informative": args.n_informative,
                    "n_redundant": args.n_redundant,
                    "class_sep": args.class_sep,
                    "flip_y": args.flip_y,
                }.items()
                if v is not None
            }
            spec = SyntheticSpec(**{**spec.__dict__, **overrides, "seed": args.seed})
        else:
            if args.n_samples is None or args.n_features is None:
                raise UsageError("synth needs --preset or both --n-samples and --n-features")
            spec = SyntheticSpec(
                args.n_samples,
                args.n_features,
                n_informative=args.n_informative if args.n_informative is not None else 2,
                n_redundant=args.n_redundant if args.n_redundant is not None else 0,
                class_sep=args.class_sep if args.class_sep is not None else 1.0,
                flip_y=args.flip_y if args.flip_y is not None else 0.0,
                seed=args.seed,
            )
        try:
            spec.validate()
        except DatasetError as exc:
            raise UsageError(f"invalid synthetic spec: {exc}") from None
        ds = generate_synthetic(spec)
    out = Path(args.out) if args.out else default_output_dir() / f"{args.preset or 'synthetic'}_seed{args.seed}.csv"
    atomic_write(out, to_csv_text(ds))
    print(out)
    print(json.dumps(ds.meta, sort_keys=True))
    return EXIT_OK


def _matrix_command(args, kind: str) -> int:
    ds = _load_data(args)
    out_dir = _out_dir(args)
    if kind == "collab":
        cfg = CollabConfig(k_folds=args.k_folds, edge_threshold=args.tau, base=_train_config(args), seed=args.seed)
        matrix = collab_matrix(ds, cfg, threads=args.threads)
        echo = {"tau": args.tau, "k_folds": args.k_folds, "seed": args.seed}
        stem = "collab_matrix"
    else:
        matrix = interaction_gain_matrix(ds, DiscretizationConfig(n_bins=args.n_bins), threads=args.threads)
        echo = {"tau": args.tau, "n_bins": args.n_bins}
        stem = "ig_matrix"
    files = write_matrix(out_dir, stem, matrix)
    for name in files.values():
        print(out_dir / name)
    print(json.dumps(echo, sort_keys=True))
    return EXIT_OK


def cmd_collab(args) -> int:
    return _matrix_command(args, "collab")


def cmd_ig(args) -> int:
    return _matrix_command(args, "ig")


def cmd_views(args) -> int:
    path = Path(args.matrix)
    if not path.is_file():
        raise FileNotFoundError(f"no such matrix file: {path}")
    matrix = read_matrix(path)
    graph = build_graph(matrix.edge_weights(), args.tau)
    cfg = CommunityConfig(args.backend, args.max_iters, args.seed)
    partition = detect_views(graph, cfg)
    payload = {
        "views": partition.to_json(),
        "feature_names": [[matrix.feature_names[k] for k in v] for v in partition.views],
        "backend": args.backend,
        "tau": args.tau,
        "n_edges": len(graph.edges),
        "modularity": modularity(graph, partition),
    }
    out = Path(args.out) if args.out else default_output_dir() / "views.json"
    atomic_write(out, dump_json(payload))
    if args.edges_out:
        atomic_write(args.edges_out, graph.to_csv_text())
    print(out)
    print(partition.one_based())
    return EXIT_OK


def cmd_train(args) -> int:
    ds = _load_data(args)
    if args.views:
        partition = _read_partition(args.views)
    else:
        partition = ViewPartition((tuple(range(ds.n_features)),))
    cfg = BoostConfig(rounds=args.rounds, epsilon_cap=args.epsilon_cap, base=_train_config(args), seed=args.seed, mode=args.mode)
    model = train_ensemble(ds, partition, cfg, threads=args.threads)
    payload = {"schema_version": 1, "feature_names": list(ds.feature_names), "ensemble": model.to_dict()}
    out = Path(args.out) if args.out else default_output_dir() / "model.json"
    atomic_write(out, dump_json(payload))
    train_acc = evaluate(model, ds).accuracy
    print(out)
    print(f"rounds={len(model.rounds)} training_accuracy={train_acc:.4f}")
    return EXIT_OK


def cmd_eval(args) -> int:
    path = Path(args.model)
    if not path.is_file():
        raise FileNotFoundError(f"no such model file: {path}")
    payload = json.loads(path.read_text(encoding="utf-8"))
    try:
        model = EnsembleModel.from_dict(payload["ensemble"])
        names = payload["feature_names"]
    except (KeyError, TypeError) as exc:
        raise DatasetError(f"{path}: malformed model file ({exc})") from None
    ds = _load_data(args)
    if list(ds.feature_names) != list(names):
        raise DatasetError(f"feature columns {list(ds.feature_names)} do not match the model's {names}")
    report = evaluate(model, ds)
    out = Path(args.out) if args.out else default_output_dir() / "eval_report.json"
    atomic_write(out, dump_json(report.to_dict()))
    if args.csv_out:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["accuracy", "n_samples", "tp", "fp", "tn", "fn", "mode"])
        c = report.confusion
        writer.writerow([repr(report.accuracy), report.n_samples, c["tp"], c["fp"], c["tn"], c["fn"], report.mode])
        atomic_write(args.csv_out, buf.getvalue())
    print(out)
    print(f"accuracy={report.accuracy:.4f}")
    return EXIT_OK


def cmd_bench(args) -> int:
    data: dict[str, Any] = load_config_file(args.config) if args.config else {}
    flags: dict[str, Any] = {}
    if args.data or args.preset:
        # A source given on the command line replaces the file's source.
        ds_cfg = dict(data.get("dataset") or {})
        for key in ("preset", "csv", "synthetic"):
            ds_cfg.pop(key, None)
        if args.data:
            ds_cfg["csv"] = args.data
        else:
            ds_cfg["preset"] = args.preset
        data["dataset"] = ds_cfg
    if args.label_column is not None:
        flags = _merge_flags(flags, ["dataset", "label_column"], args.label_column)
    if args.n_samples is not None:
        flags = _merge_flags(flags, ["dataset", "n_samples"], args.n_samples)
    if args.seed is not None:
        flags["seed"] = args.seed
    if args.methods is not None:
        flags["methods"] = args.methods
    for item in args.set or []:
        parts, value = parse_override(item)
        flags = _merge_flags(flags, parts, value)
    merged = _deep_update(data, flags)
    cfg = build_run_config(merged)
    out_dir = Path(args.out_dir) if args.out_dir else Path(cfg.output_dir) if cfg.output_dir else default_output_dir()
    report = run_bench(cfg, out_dir, threads=args.threads, log=lambda s: print(s, file=sys.stderr))
    print(format_table(report["dataset"]["name"], report["methods"]), end="")
    print(out_dir / "bench_report.json")
    failed = [m for m, e in report["methods"].items() if e["status"] != "ok"]
    if failed:
        errors = "; ".join(f"{m}: {report['methods'][m].get('error', '')}" for m in failed)
        print(f"error: methods failed: {errors}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


def _merge_flags(flags: dict[str, Any], parts: list[str], value: Any) -> dict[str, Any]:
    return _deep_update(flags, nest(parts, value))


def _deep_update(base: dict[str, Any], extra: dict[str, Any]) -> dict[str, Any]:
    out = dict(base)
    for k, v in extra.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _deep_update(out[k], v)
        else:
            out[k] = v
    return out


# -- parser -----------------------------------------------------------------


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _seed(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer seed, got {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must lie in [0, 2**64)")
    return v


def _add_data(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data", required=True, help="dataset CSV with a header row")
    p.add_argument("--label-column", default="label", help="label column name or index (default: label)")


def _add_learner(p: argparse.ArgumentParser) -> None:
    d = TrainConfig()
    p.add_argument("--loss", choices=("hinge", "logistic"), default=d.loss)
    p.add_argument("--l2-lambda", type=float, default=d.l2_lambda)
    p.add_argument("--epochs", type=_positive_int, default=d.epochs)
    p.add_argument("--learning-rate", type=float, default=d.learning_rate)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="collabviews", description="Multi-view ensemble classification by feature collaboration.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("synth", help="write a synthetic dataset as CSV")
    p.add_argument("--preset", choices=PRESETS)
    p.add_argument("--n-samples", type=int)
    p.add_argument("--n-features", type=int)
    p.add_argument("--n-informative", type=int)
    p.add_argument("--n-redundant", type=int)
    p.add_argument("--class-sep", type=float)
    p.add_argument("--flip-y", type=float)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--out", help="output CSV path")
    p.set_defaults(func=cmd_synth)

    for name, func, help_text in (
        ("collab", cmd_collab, "pairwise collaboration matrix"),
        ("ig", cmd_ig, "pairwise interaction-gain matrix"),
    ):
        p = sub.add_parser(name, help=help_text)
        _add_data(p)
        p.add_argument("--tau", type=float, default=0.01, help="edge threshold echoed for the views step")
        p.add_argument("--threads", type=_positive_int, default=1)
        p.add_argument("--out-dir")
        if name == "collab":
            p.add_argument("--k-folds", type=_positive_int, default=CollabConfig().k_folds)
            p.add_argument("--seed", type=_seed, default=0)
            _add_learner(p)
        else:
            p.add_argument("--n-bins", type=_positive_int, default=DiscretizationConfig().n_bins)
        p.set_defaults(func=func)

    p = sub.add_parser("views", help="detect views in a matrix file")
    p.add_argument("--matrix", required=True, help="matrix .csv or .json")
    p.add_argument("--tau", type=float, default=0.0, help="keep edges with weight > tau")
    p.add_argument("--backend", choices=BACKENDS, default=CommunityConfig().backend)
    p.add_argument("--max-iters", type=_positive_int, default=CommunityConfig().max_iters)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--out", help="partition JSON path")
    p.add_argument("--edges-out", help="also write the graph as an edge-list CSV")
    p.set_defaults(func=cmd_views)

    p = sub.add_parser("train", help="train a multi-view ensemble")
    _add_data(p)
    p.add_argument("--views", help="partition JSON (default: one view of all features)")
    p.add_argument("--rounds", type=_positive_int, default=BoostConfig().rounds)
    p.add_argument("--epsilon-cap", type=float, default=BoostConfig().epsilon_cap)
    p.add_argument("--mode", choices=("boosted_pool", "static_fusion"), default="boosted_pool")
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--threads", type=_positive_int, default=1)
    p.add_argument("--out", help="model JSON path")
    _add_learner(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a trained ensemble")
    p.add_argument("--model", required=True)
    _add_data(p)
    p.add_argument("--out", help="report JSON path")
    p.add_argument("--csv-out", help="also write a one-row CSV summary")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="compare whole-set, interaction-gain, collaboration and exhaustive views")
    p.add_argument("--config", help="YAML or JSON run config")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--data", help="dataset CSV (replaces the config's source)")
    src.add_argument("--preset", choices=PRESETS, help="generated dataset (replaces the config's source)")
    p.add_argument("--label-column")
    p.add_argument("--n-samples", type=int)
    p.add_argument("--methods", help="comma-separated subset of whole_set,interaction_gain,collaboration,exhaustive")
    p.add_argument("--seed", type=_seed)
    p.add_argument("--threads", type=_positive_int, default=1)
    p.add_argument("--out-dir")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override any config key, e.g. boost.rounds=20")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # pragma: no cover - last resort
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
