"""Run the benchmark grid and write the result tables.

Work is split into units of (dataset, oversampler, repeat). Units run in a
process pool; the parent process is the only writer. Each finished unit is
appended to ``cells.jsonl`` right away, so an interrupted run can continue
with ``resume=True``. Final tables are built from the checkpoint in config
order, so they do not depend on the worker count or completion order.
"""

from __future__ import annotations

import json
import logging
import platform
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import asdict
from pathlib import Path

import numba
import numpy as np
import pandas as pd
import scipy

from .config import RunConfig
from .dataset import load_csv
from .evaluation import METRICS, CvCellResult, evaluate_repeat, rank_table, score_table

logger = logging.getLogger(__name__)

CHECKPOINT = "cells.jsonl"


class BenchmarkError(RuntimeError):
    pass


def _unit_key(dataset: str, oversampler: str, repeat: int) -> str:
    return f"{dataset}|{oversampler}|{repeat}"


def _run_unit(dataset, oversampler, classifiers, folds, repeat, seed):
    outcome = evaluate_repeat(dataset, oversampler, classifiers, folds, repeat, seed)
    return {
        "key": _unit_key(dataset.name, oversampler.method, repeat),
        "results": [asdict(r) for r in outcome.results],
        "fallbacks": outcome.fallbacks,
    }


def _read_checkpoint(path: Path, fingerprint: str) -> dict:
    done = {}
    with open(path, encoding="utf-8") as f:
        header = json.loads(f.readline() or "{}")
        if header.get("fingerprint") != fingerprint:
            raise BenchmarkError(
                f"{path} was written by a different configuration; rerun without --resume"
            )
        for line in f:
            if line.strip():
                record = json.loads(line)
                done[record["key"]] = record
    return done


def run_benchmark(cfg: RunConfig, workers: int | None = None, resume: bool = False,
                  output: Path | None = None) -> Path:
    """Execute every unit of ``cfg`` and write the result files; returns the output dir."""
    out = Path(output or cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    workers = workers or cfg.workers
    datasets = [load_csv(d.path, d.label_column, d.display_name) for d in cfg.datasets]
    fingerprint = cfg.fingerprint()

    ckpt = out / CHECKPOINT
    done = _read_checkpoint(ckpt, fingerprint) if resume and ckpt.exists() else {}
    if not done:
        ckpt.write_text(json.dumps({"fingerprint": fingerprint}) + "\n", encoding="utf-8")

    todo = [(d, o, r) for d in datasets for o in cfg.oversamplers for r in range(cfg.repeats)
            if _unit_key(d.name, o.method, r) not in done]
    logger.info("%d units to run (%d already done), %d worker(s)", len(todo), len(done), workers)

    failures = []

    def collect(record):
        done[record["key"]] = record
        with open(ckpt, "a", encoding="utf-8") as f:
            f.write(json.dumps(record) + "\n")
        logger.info("done %s (%d/%d)", record["key"], len(done),
                    len(datasets) * len(cfg.oversamplers) * cfg.repeats)

    args = [(d, o, cfg.classifiers, cfg.folds, r, cfg.seed) for d, o, r in todo]
    if workers == 1:
        for a in args:
            try:
                collect(_run_unit(*a))
            except Exception as e:  # keep going; report every failing cell at the end
                failures.append(f"{_unit_key(a[0].name, a[1].method, a[4])}: {e!r}")
                logger.error("cell %s failed: %r", failures[-1], e)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {pool.submit(_run_unit, *a): a for a in args}
            for fut in as_completed(futures):
                a = futures[fut]
                try:
                    collect(fut.result())
                except Exception as e:
                    failures.append(f"{_unit_key(a[0].name, a[1].method, a[4])}: {e!r}")
                    logger.error("cell %s failed", failures[-1])

    if failures:
        raise BenchmarkError(
            "failing cell(s): " + "; ".join(failures)
            + f". Completed cells are kept in {ckpt}; fix and rerun with --resume."
        )
    write_outputs(cfg, datasets, done, out)
    return out


def write_outputs(cfg: RunConfig, datasets, done: dict, out: Path) -> None:
    names = [d.name for d in datasets]
    methods = [o.method for o in cfg.oversamplers]
    classifiers = [c.method for c in cfg.classifiers]

    results = []
    fallbacks = []
    for d in names:
        for m in methods:
            for r in range(cfg.repeats):
                record = done[_unit_key(d, m, r)]
                results.extend(CvCellResult(**row) for row in record["results"])
                fallbacks.extend(record["fallbacks"])

    # long format: one row per (dataset, classifier, metric, oversampler, repeat)
    rank_of = {name: i for i, name in enumerate(names)}
    order = lambda r: (rank_of[r.dataset], classifiers.index(r.classifier),  # noqa: E731
                       METRICS.index(r.metric), methods.index(r.oversampler), r.repeat)
    long = pd.DataFrame([
        {"dataset": r.dataset, "classifier": r.classifier, "metric": r.metric,
         "oversampler": r.oversampler, "repeat": r.repeat, "score": r.score,
         "oversampler_params": json.dumps(r.oversampler_params, sort_keys=True),
         "classifier_params": json.dumps(r.classifier_params, sort_keys=True)}
        for r in sorted(results, key=order)
    ])
    long.to_csv(out / "cv_scores.csv", index=False, lineterminator="\n")

    table = score_table(results, names, classifiers, methods)
    table.to_csv(out / "cv_table.csv", index=False, lineterminator="\n")
    ranks = rank_table(table, methods)
    ranks.ranks.to_csv(out / "ranks.csv", index=False, lineterminator="\n")
    ranks.mean_ranks.to_csv(out / "mean_ranking.csv", index=False, lineterminator="\n")
    ranks.friedman.to_csv(out / "friedman.csv", index=False, lineterminator="\n")

    fallbacks.sort(key=lambda e: (rank_of[e["dataset"]], methods.index(e["oversampler"]),
                                  e["repeat"], e["fold"], json.dumps(e["params"], sort_keys=True)))
    manifest = {
        "config": cfg.to_dict(),
        "fingerprint": cfg.fingerprint(),
        "seed": cfg.seed,
        "seed_scheme": (
            "SeedSequence(entropy=seed, spawn_key=crc32 of each part); CV split keyed by "
            "(dataset, 'cv', repeat); oversampler stream keyed by "
            "(dataset, oversampler, fold, repeat) and restarted for every grid point"
        ),
        "versions": {"python": platform.python_version(), "numpy": np.__version__,
                     "scipy": scipy.__version__, "numba": numba.__version__,
                     "pandas": pd.__version__},
        "units": len(done),
        "fallbacks": fallbacks,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
