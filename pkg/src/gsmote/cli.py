"""Command-line entry point: ``gsmote run | fixture | oversample``."""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

import numpy as np

from .config import ConfigError, load_config
from .dataset import DatasetError, apply_minmax, fit_minmax, load_csv, synthetic_count
from .fixtures import KINDS, write_fixture
from .oversampling import OVERSAMPLERS, OVERSAMPLER_PARAMS, OversamplingError, oversample
from .runner import BenchmarkError, run_benchmark

logger = logging.getLogger("gsmote")


def _cmd_run(args) -> int:
    try:
        cfg = load_config(args.config)
    except (ConfigError, DatasetError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    try:
        out = run_benchmark(cfg, workers=args.workers, resume=args.resume)
    except (BenchmarkError, DatasetError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    print(f"results written to {out}")
    return 0


def _cmd_fixture(args) -> int:
    try:
        d = write_fixture(args.out, args.kind, args.ir, args.n, args.seed, args.label_noise)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    print(f"{args.out}: {d.n_majority} majority / {d.n_minority} minority rows")
    return 0


def oversample_file(data, method: str, out, params: dict, seed: int = 0,
                    label_column: str | None = None) -> int:
    """Balance a CSV file and write original plus synthetic rows.

    Rows are min-max scaled for generation (as in the benchmark) and mapped
    back to the input units. A trailing ``synthetic`` column flags new rows.
    Returns the number of synthetic rows.
    """
    d = load_csv(data, label_column)
    scaler = fit_minmax(d)
    X = apply_minmax(scaler, d.features)
    n_new = synthetic_count(d)
    batch = oversample(method, X[d.y == 0], X[d.y == 1], n_new, np.random.default_rng(seed),
                       **params)
    span = scaler.maximum - scaler.minimum
    new_rows = scaler.minimum + batch.samples * span

    with open(data, newline="", encoding="utf-8") as f:
        header = next(csv.reader(f))
    label_name = label_column or header[-1]
    features = [h for h in header if h != label_name]
    with open(out, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow([*features, label_name, "synthetic"])
        for row, label in zip(d.features, d.labels):
            w.writerow([repr(float(v)) for v in row] + [label, 0])
        for row in new_rows:
            w.writerow([repr(float(v)) for v in row] + [d.minority_label, 1])
    return len(batch)


def _cmd_oversample(args) -> int:
    params = {}
    for name in OVERSAMPLER_PARAMS.get(args.method, ()):
        value = getattr(args, name)
        if value is not None:
            params[name] = value
    try:
        n_new = oversample_file(args.data, args.method, args.out, params, args.seed,
                                args.label_column)
    except (DatasetError, OversamplingError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    print(f"{args.out}: added {n_new} synthetic rows")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gsmote", description="G-SMOTE oversampling benchmark")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a benchmark from a YAML config")
    run.add_argument("--config", required=True, type=Path)
    run.add_argument("--workers", type=int, default=None, help="override the config's worker count")
    run.add_argument("--resume", action="store_true", help="skip cells already in the checkpoint")
    run.set_defaults(func=_cmd_run)

    fx = sub.add_parser("fixture", help="write a synthetic imbalanced dataset")
    fx.add_argument("--kind", required=True, choices=KINDS)
    fx.add_argument("--ir", required=True, type=float, help="imbalance ratio (majority/minority)")
    fx.add_argument("--n", required=True, type=int)
    fx.add_argument("--seed", type=int, default=0)
    fx.add_argument("--label-noise", type=float, default=0.0,
                    help="fraction of minority rows whose labels are swapped with majority rows")
    fx.add_argument("--out", required=True, type=Path)
    fx.set_defaults(func=_cmd_fixture)

    ov = sub.add_parser("oversample", help="balance a CSV with one oversampler")
    ov.add_argument("--data", required=True, type=Path)
    ov.add_argument("--method", required=True,
                    help=f"one of: {', '.join(OVERSAMPLERS)}")
    ov.add_argument("--label-column", default=None)
    ov.add_argument("--k", type=int, default=None)
    ov.add_argument("--a-trunc", dest="a_trunc", type=float, default=None)
    ov.add_argument("--a-def", dest="a_def", type=float, default=None)
    ov.add_argument("--a-sel", dest="a_sel", choices=("minority", "majority", "combined"),
                    default=None)
    ov.add_argument("--seed", type=int, default=0)
    ov.add_argument("--out", required=True, type=Path)
    ov.set_defaults(func=_cmd_oversample)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    if args.command == "oversample" and args.method not in OVERSAMPLERS:
        print(f"error: unknown oversampler {args.method!r}; valid ids: {', '.join(OVERSAMPLERS)}",
              file=sys.stderr)
        return 2
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
