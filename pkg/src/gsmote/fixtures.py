"""Synthetic imbalanced 2-D datasets for exercising the benchmark.

Labels are "0" (majority) and "1" (minority). Class sizes are
``n_min = round(n / (ir + 1))`` and ``n_maj = n - n_min``.
"""

from __future__ import annotations

import numpy as np

from .dataset import Dataset, write_csv

KINDS = ("two_gaussians", "noisy_moons", "sparse_clusters")


def class_sizes(n: int, ir: float) -> tuple[int, int]:
    if ir < 1:
        raise ValueError(f"imbalance ratio must be >= 1, got {ir}")
    if n < 4:
        raise ValueError(f"n must be >= 4, got {n}")
    n_min = max(int(round(n / (ir + 1))), 2)
    return n - n_min, n_min


def _two_gaussians(rng, n_maj, n_min):
    maj = rng.normal(0.0, 1.0, size=(n_maj, 2))
    mino = rng.normal(1.5, 1.0, size=(n_min, 2))
    return maj, mino


def _noisy_moons(rng, n_maj, n_min, noise=0.25):
    t_maj = rng.uniform(0, np.pi, n_maj)
    t_min = rng.uniform(0, np.pi, n_min)
    maj = np.c_[np.cos(t_maj), np.sin(t_maj)]
    mino = np.c_[1 - np.cos(t_min), 0.5 - np.sin(t_min)]
    maj += rng.normal(0, noise, maj.shape)
    mino += rng.normal(0, noise, mino.shape)
    return maj, mino


def _sparse_clusters(rng, n_maj, n_min, n_clusters=5):
    maj = rng.normal(0.0, 2.0, size=(n_maj, 2))
    centers = rng.uniform(-4, 4, size=(n_clusters, 2))
    which = np.arange(n_min) % n_clusters
    mino = centers[which] + rng.normal(0.0, 0.4, size=(n_min, 2))
    return maj, mino


_GENERATORS = {
    "two_gaussians": _two_gaussians,
    "noisy_moons": _noisy_moons,
    "sparse_clusters": _sparse_clusters,
}


def make_fixture(kind: str, ir: float, n: int, seed: int, label_noise: float = 0.0,
                 name: str | None = None) -> Dataset:
    """Deterministic dataset of ``kind`` with the requested imbalance ratio.

    ``label_noise`` swaps the labels of ``round(label_noise * n_min)`` random
    minority rows with as many random majority rows, which corrupts labels
    without changing the class counts.
    """
    if kind not in _GENERATORS:
        raise ValueError(f"unknown fixture kind {kind!r}; choose from {', '.join(KINDS)}")
    if not 0 <= label_noise < 1:
        raise ValueError(f"label_noise must lie in [0, 1), got {label_noise}")
    n_maj, n_min = class_sizes(n, ir)
    rng = np.random.default_rng(seed)
    maj, mino = _GENERATORS[kind](rng, n_maj, n_min)
    X = np.vstack([maj, mino])
    y = np.r_[np.zeros(n_maj, dtype=int), np.ones(n_min, dtype=int)]
    n_swap = int(round(label_noise * n_min))
    if n_swap:
        flip_min = rng.choice(np.flatnonzero(y == 1), n_swap, replace=False)
        flip_maj = rng.choice(np.flatnonzero(y == 0), n_swap, replace=False)
        y[flip_min], y[flip_maj] = 0, 1
    order = rng.permutation(n)
    return Dataset.from_arrays(X[order], y[order].astype(str), name=name or kind)


def write_fixture(path, kind: str, ir: float, n: int, seed: int, label_noise: float = 0.0) -> Dataset:
    d = make_fixture(kind, ir, n, seed, label_noise)
    write_csv(d, path)
    return d
