"""Exact Euclidean nearest-neighbor search by brute force.

Ties in distance are always broken by the lower point index, which keeps every
downstream random draw reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class NeighborError(ValueError):
    pass


@dataclass(frozen=True)
class NeighborResult:
    indices: np.ndarray
    distances: np.ndarray


def _distances(query, points):
    diff = np.asarray(points, dtype=float) - np.asarray(query, dtype=float)
    return np.sqrt(np.einsum("...j,...j->...", diff, diff))


def knn(query, points, k: int, exclude: int | None = None) -> NeighborResult:
    points = np.asarray(points, dtype=float)
    query = np.asarray(query, dtype=float)
    if points.ndim != 2 or query.shape != (points.shape[1],):
        raise NeighborError(f"query shape {query.shape} does not match points {points.shape}")
    if k < 1:
        raise NeighborError(f"k must be positive, got {k}")
    available = len(points) - (exclude is not None)
    if k > available:
        raise NeighborError(f"need {k} neighbors but only {available} points are available")

    d = _distances(query, points)
    order = np.argsort(d, kind="stable")
    if exclude is not None:
        order = order[order != exclude]
    idx = order[:k]
    return NeighborResult(idx, d[idx])


def nearest(query, points) -> tuple[int, float]:
    points = np.asarray(points, dtype=float)
    if len(points) == 0:
        raise NeighborError("cannot search an empty point set")
    res = knn(query, points, 1)
    return int(res.indices[0]), float(res.distances[0])


def pairwise_distances(a, b) -> np.ndarray:
    """Euclidean distance matrix computed from explicit differences (no dot-product expansion)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    diff = a[:, None, :] - b[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def knn_table(points, k: int, reference=None, exclude_self: bool = True):
    """k nearest neighbors of every row of ``points`` within ``reference``.

    With ``reference`` omitted the search runs within ``points`` and each row
    skips itself. Returns ``(indices, distances)``, both of shape (n, k).
    """
    points = np.asarray(points, dtype=float)
    same = reference is None
    reference = points if same else np.asarray(reference, dtype=float)
    skip = same and exclude_self
    available = len(reference) - skip
    if k < 1:
        raise NeighborError(f"k must be positive, got {k}")
    if k > available:
        raise NeighborError(f"need {k} neighbors but only {available} points are available")

    d = pairwise_distances(points, reference)
    if skip:
        # +inf on the diagonal sorts self last; stable sort keeps index order among ties
        np.fill_diagonal(d, np.inf)
    order = np.argsort(d, axis=1, kind="stable")[:, :k]
    return order, np.take_along_axis(d, order, axis=1)
