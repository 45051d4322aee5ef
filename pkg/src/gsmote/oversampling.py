"""Minority oversamplers: G-SMOTE plus the comparators used in the benchmark.

Every generator takes the majority rows, the minority rows, the number of
synthetic rows ``n`` and a ``numpy.random.Generator``, and returns a
:class:`SyntheticBatch`. Random draws are consumed in a fixed order so that a
given seed reproduces a batch bit for bit:

* G-SMOTE: one permutation of the minority rows, then per sample the
  neighbor pick (minority/combined strategies only) followed by the unit-ball
  draw (p normals, one uniform).
* SMOTE and Borderline-SMOTE: one permutation of the candidate centers, then
  per sample the neighbor pick followed by the interpolation gap.
* ADASYN: no permutation; per sample the neighbor pick and the gap, with
  centers in index order.
* Random oversampling: ``n`` integer draws in one call.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import geometry
from .neighbors import NeighborError, knn, knn_table, nearest, pairwise_distances

logger = logging.getLogger(__name__)

STRATEGIES = ("minority", "majority", "combined")


class OversamplingError(ValueError):
    pass


@dataclass(frozen=True)
class GSmoteConfig:
    k: int = 3
    a_trunc: float = 1.0
    a_def: float = 0.0
    a_sel: str = "minority"
    seed: int = 0

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise OversamplingError(f"k must be a positive integer, got {self.k}")
        if not -1.0 <= self.a_trunc <= 1.0:
            raise OversamplingError(f"a_trunc must lie in [-1, 1], got {self.a_trunc}")
        if not 0.0 <= self.a_def <= 1.0:
            raise OversamplingError(f"a_def must lie in [0, 1], got {self.a_def}")
        if self.a_sel not in STRATEGIES:
            raise OversamplingError(f"a_sel must be one of {STRATEGIES}, got {self.a_sel!r}")


@dataclass(frozen=True)
class SurfaceSelection:
    surface: np.ndarray
    radius: float
    source: str


@dataclass(frozen=True)
class SyntheticBatch:
    """Generated rows plus, per row, the center index (into S_min), the
    surface point, the surface's class and the generation radius.

    ``fallback`` names a degraded path taken during generation, if any.
    """

    samples: np.ndarray
    centers: np.ndarray
    surfaces: np.ndarray
    sources: np.ndarray
    radii: np.ndarray
    label: object = 1
    fallback: str | None = None

    def __len__(self):
        return len(self.samples)


def _empty_batch(p, label=1, fallback=None):
    return SyntheticBatch(
        samples=np.empty((0, p)),
        centers=np.empty(0, dtype=np.int64),
        surfaces=np.empty((0, p)),
        sources=np.empty(0, dtype="<U8"),
        radii=np.empty(0),
        label=label,
        fallback=fallback,
    )


def _as_rows(a, p=None):
    a = np.asarray(a, dtype=float)
    if a.ndim == 1 and p is not None and a.size == 0:
        a = a.reshape(0, p)
    if a.ndim != 2:
        raise OversamplingError(f"expected a 2-D array of rows, got shape {a.shape}")
    return a


def _require_minority_neighbors(n_min, k):
    if n_min < k + 1:
        raise OversamplingError(
            f"need at least k + 1 = {k + 1} minority samples, got {n_min}"
        )


def select_surface(center_idx, S_min, S_maj, cfg: GSmoteConfig, rng) -> SurfaceSelection:
    """Surface point and radius for one center under ``cfg.a_sel``.

    ``minority`` picks uniformly among the center's k nearest minority
    neighbors; ``majority`` takes the nearest majority row; ``combined`` does
    both and keeps whichever is closer (minority wins exact ties).
    """
    S_min = _as_rows(S_min)
    center = S_min[center_idx]
    if cfg.a_sel in ("minority", "combined"):
        _require_minority_neighbors(len(S_min), cfg.k)
        nn = knn(center, S_min, cfg.k, exclude=center_idx)
        j = int(rng.integers(cfg.k))
        x_min, d_min = S_min[nn.indices[j]], float(nn.distances[j])
        if cfg.a_sel == "minority":
            return SurfaceSelection(x_min, d_min, "minority")
    S_maj = _as_rows(S_maj, S_min.shape[1])
    if len(S_maj) == 0:
        raise OversamplingError(f"strategy {cfg.a_sel!r} needs at least one majority sample")
    i_maj, d_maj = nearest(center, S_maj)
    if cfg.a_sel == "majority" or d_maj < d_min:
        return SurfaceSelection(S_maj[i_maj], d_maj, "majority")
    return SurfaceSelection(x_min, d_min, "minority")


def gsmote_generate(S_maj, S_min, n: int, cfg: GSmoteConfig, rng=None, label=1) -> SyntheticBatch:
    """Generate ``n`` synthetic minority rows with G-SMOTE.

    Centers are taken from one shuffled pass over S_min, cycled as often as
    needed. Neighbor tables are computed once up front; the per-center
    selection rules are the ones in :func:`select_surface`.
    """
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    S_min = _as_rows(S_min)
    n_min, p = S_min.shape
    S_maj = _as_rows(S_maj, p)
    if n < 0:
        raise OversamplingError(f"n must be non-negative, got {n}")
    if n_min == 0:
        raise OversamplingError("S_min is empty")
    use_min = cfg.a_sel in ("minority", "combined")
    use_maj = cfg.a_sel in ("majority", "combined")
    if use_min:
        _require_minority_neighbors(n_min, cfg.k)
    if use_maj and len(S_maj) == 0:
        raise OversamplingError(f"strategy {cfg.a_sel!r} needs at least one majority sample")
    if n == 0:
        return _empty_batch(p, label)

    if use_min:
        nn_idx, nn_dist = knn_table(S_min, cfg.k)
    if use_maj:
        d = pairwise_distances(S_min, S_maj)
        maj_idx = np.argmin(d, axis=1)  # first occurrence = lowest index on ties
        maj_dist = d[np.arange(n_min), maj_idx]

    order = rng.permutation(n_min)
    centers = order[np.arange(n) % n_min]
    picks = np.zeros(n, dtype=np.int64)
    ball = np.empty((n, p))
    for i in range(n):
        if use_min:
            picks[i] = rng.integers(cfg.k)
        ball[i] = geometry.sample_unit_ball(p, rng)

    if use_min:
        min_pick = nn_idx[centers, picks]
        surfaces = S_min[min_pick]
        radii = nn_dist[centers, picks]
        sources = np.full(n, "minority", dtype="<U8")
    if cfg.a_sel == "majority":
        surfaces = S_maj[maj_idx[centers]]
        radii = maj_dist[centers]
        sources = np.full(n, "majority", dtype="<U8")
    elif cfg.a_sel == "combined":
        closer = maj_dist[centers] < radii
        surfaces = np.where(closer[:, None], S_maj[maj_idx[centers]], surfaces)
        radii = np.where(closer, maj_dist[centers], radii)
        sources = np.where(closer, "majority", sources)

    samples = geometry.transform(ball, S_min[centers], surfaces, radii, cfg.a_trunc, cfg.a_def)
    return SyntheticBatch(samples, centers, surfaces, sources, radii, label)


def _interpolate(S_min, centers, neighbors, gaps, label, fallback=None):
    x = S_min[centers]
    x_nb = neighbors
    diff = x_nb - x
    return SyntheticBatch(
        samples=x + gaps[:, None] * diff,
        centers=centers,
        surfaces=x_nb,
        sources=np.full(len(centers), "minority", dtype="<U8"),
        radii=np.sqrt(np.einsum("ij,ij->i", diff, diff)),
        label=label,
        fallback=fallback,
    )


def smote_generate(S_min, n: int, k: int, rng, label=1, fallback=None) -> SyntheticBatch:
    """Classic SMOTE: ``x + gap * (x_nb - x)`` with ``gap ~ U(0, 1)`` and
    ``x_nb`` drawn from the k nearest minority neighbors of ``x``."""
    S_min = _as_rows(S_min)
    n_min, p = S_min.shape
    _require_minority_neighbors(n_min, k)
    if n == 0:
        return _empty_batch(p, label, fallback)
    nn_idx, _ = knn_table(S_min, k)
    order = rng.permutation(n_min)
    centers = order[np.arange(n) % n_min]
    picks = np.empty(n, dtype=np.int64)
    gaps = np.empty(n)
    for i in range(n):
        picks[i] = rng.integers(k)
        gaps[i] = rng.random()
    return _interpolate(S_min, centers, S_min[nn_idx[centers, picks]], gaps, label, fallback)


def danger_set(S_maj, S_min, m: int) -> np.ndarray:
    """Indices of minority rows whose m nearest neighbors (both classes) are
    at least half, but not entirely, majority."""
    S_min = _as_rows(S_min)
    S_maj = _as_rows(S_maj, S_min.shape[1])
    nn_idx, _ = _all_class_neighbors(S_maj, S_min, m)
    n_maj_nb = (nn_idx >= len(S_min)).sum(axis=1)
    return np.flatnonzero((2 * n_maj_nb >= m) & (n_maj_nb < m))


def _all_class_neighbors(S_maj, S_min, k):
    """k nearest neighbors of each minority row among ``vstack(S_min, S_maj)``.

    Indices >= len(S_min) refer to majority rows.
    """
    n_min = len(S_min)
    pool = np.vstack([S_min, S_maj])
    if k > len(pool) - 1:
        raise OversamplingError(f"need {k} neighbors but only {len(pool) - 1} points are available")
    d = pairwise_distances(S_min, pool)
    d[np.arange(n_min), np.arange(n_min)] = np.inf
    order = np.argsort(d, axis=1, kind="stable")[:, :k]
    return order, pool


def borderline_smote(S_maj, S_min, n: int, k: int, variant: int, rng, label=1) -> SyntheticBatch:
    """Borderline-SMOTE 1/2; the danger neighborhood size equals ``k``.

    Variant 1 interpolates toward the k nearest minority neighbors. Variant 2
    interpolates toward the k nearest neighbors of either class, with the gap
    drawn from U(0, 0.5) when that neighbor is a majority row. An empty danger
    set falls back to plain SMOTE and is recorded on the batch.
    """
    if variant not in (1, 2):
        raise OversamplingError(f"variant must be 1 or 2, got {variant}")
    S_min = _as_rows(S_min)
    n_min, p = S_min.shape
    S_maj = _as_rows(S_maj, p)
    _require_minority_neighbors(n_min, k)
    if n == 0:
        return _empty_batch(p, label)
    danger = danger_set(S_maj, S_min, k)
    if len(danger) == 0:
        logger.warning("borderline-smote%d: empty danger set, falling back to SMOTE", variant)
        return smote_generate(S_min, n, k, rng, label, fallback="empty_danger_set")

    if variant == 1:
        nn_idx, _ = knn_table(S_min, k)
        pool = S_min
    else:
        nn_idx, pool = _all_class_neighbors(S_maj, S_min, k)
    order = rng.permutation(danger)
    centers = order[np.arange(n) % len(danger)]
    picks = np.empty(n, dtype=np.int64)
    gaps = np.empty(n)
    for i in range(n):
        j = rng.integers(k)
        picks[i] = j
        toward_majority = variant == 2 and nn_idx[centers[i], j] >= n_min
        gaps[i] = 0.5 * rng.random() if toward_majority else rng.random()
    chosen = nn_idx[centers, picks]
    batch = _interpolate(S_min, centers, pool[chosen], gaps, label)
    if variant == 2:
        sources = np.where(chosen >= n_min, "majority", "minority")
        batch = SyntheticBatch(batch.samples, batch.centers, batch.surfaces, sources,
                               batch.radii, label)
    return batch


def largest_remainder(weights, n: int) -> np.ndarray:
    """Split ``n`` into integer counts proportional to ``weights``.

    Floors first, then hands the leftover units to the largest fractional
    parts (lowest index first among equal remainders).
    """
    w = np.asarray(weights, dtype=float)
    quotas = n * w / w.sum()
    counts = np.floor(quotas).astype(np.int64)
    rem = n - counts.sum()
    if rem > 0:
        frac = quotas - counts
        top = np.argsort(-frac, kind="stable")[:rem]
        counts[top] += 1
    return counts


def adasyn_weights(S_maj, S_min, k: int) -> np.ndarray:
    """Fraction of majority rows among each minority row's k all-class neighbors."""
    S_min = _as_rows(S_min)
    S_maj = _as_rows(S_maj, S_min.shape[1])
    nn_idx, _ = _all_class_neighbors(S_maj, S_min, k)
    return (nn_idx >= len(S_min)).sum(axis=1) / k


def adasyn_generate(S_maj, S_min, n: int, k: int, rng, label=1) -> SyntheticBatch:
    """ADASYN: more synthetic rows around minority points with more majority neighbors."""
    S_min = _as_rows(S_min)
    n_min, p = S_min.shape
    S_maj = _as_rows(S_maj, p)
    _require_minority_neighbors(n_min, k)
    if n == 0:
        return _empty_batch(p, label)
    r = adasyn_weights(S_maj, S_min, k)
    fallback = None
    if r.sum() == 0:
        logger.warning("adasyn: no minority sample has majority neighbors, allocating uniformly")
        r = np.ones(n_min)
        fallback = "zero_adasyn_weights"
    counts = largest_remainder(r, n)
    centers = np.repeat(np.arange(n_min), counts)
    nn_idx, _ = knn_table(S_min, k)
    picks = np.empty(n, dtype=np.int64)
    gaps = np.empty(n)
    for i in range(n):
        picks[i] = rng.integers(k)
        gaps[i] = rng.random()
    return _interpolate(S_min, centers, S_min[nn_idx[centers, picks]], gaps, label, fallback)


def random_oversample(S_min, n: int, rng, label=1) -> SyntheticBatch:
    """Duplicate ``n`` minority rows drawn uniformly with replacement."""
    S_min = _as_rows(S_min)
    n_min, p = S_min.shape
    if n_min == 0:
        raise OversamplingError("S_min is empty")
    if n == 0:
        return _empty_batch(p, label)
    centers = rng.integers(n_min, size=n)
    rows = S_min[centers].copy()
    return SyntheticBatch(rows, centers, rows.copy(), np.full(n, "minority", dtype="<U8"),
                          np.zeros(n), label)


# -- uniform registry used by the benchmark and the CLI ----------------------

def _gsmote(S_maj, S_min, n, rng, k=3, a_trunc=1.0, a_def=0.0, a_sel="minority"):
    return gsmote_generate(S_maj, S_min, n, GSmoteConfig(k, a_trunc, a_def, a_sel), rng)


def _none(S_maj, S_min, n, rng):
    return _empty_batch(np.asarray(S_min).shape[1])


OVERSAMPLERS = {
    "none": _none,
    "random": lambda S_maj, S_min, n, rng: random_oversample(S_min, n, rng),
    "smote": lambda S_maj, S_min, n, rng, k=5: smote_generate(S_min, n, k, rng),
    "borderline1": lambda S_maj, S_min, n, rng, k=5: borderline_smote(S_maj, S_min, n, k, 1, rng),
    "borderline2": lambda S_maj, S_min, n, rng, k=5: borderline_smote(S_maj, S_min, n, k, 2, rng),
    "adasyn": lambda S_maj, S_min, n, rng, k=5: adasyn_generate(S_maj, S_min, n, k, rng),
    "gsmote": _gsmote,
}

# Accepted parameter names per method; used for config validation.
OVERSAMPLER_PARAMS = {
    "none": (),
    "random": (),
    "smote": ("k",),
    "borderline1": ("k",),
    "borderline2": ("k",),
    "adasyn": ("k",),
    "gsmote": ("k", "a_trunc", "a_def", "a_sel"),
}


def validate_params(method: str, params: dict) -> None:
    if method not in OVERSAMPLERS:
        raise OversamplingError(
            f"unknown oversampler {method!r}; valid ids: {', '.join(OVERSAMPLERS)}"
        )
    extra = set(params) - set(OVERSAMPLER_PARAMS[method])
    if extra:
        raise OversamplingError(f"{method}: unknown parameter(s) {sorted(extra)}")
    if method == "gsmote":
        GSmoteConfig(**params)
    elif "k" in params and (int(params["k"]) != params["k"] or params["k"] < 1):
        raise OversamplingError(f"{method}: k must be a positive integer, got {params['k']}")


def oversample(method: str, S_maj, S_min, n: int, rng, **params) -> SyntheticBatch:
    validate_params(method, params)
    return OVERSAMPLERS[method](S_maj, S_min, n, rng, **params)


__all__ = [
    "GSmoteConfig", "SurfaceSelection", "SyntheticBatch", "OversamplingError",
    "NeighborError", "select_surface", "gsmote_generate", "smote_generate",
    "borderline_smote", "danger_set", "adasyn_generate", "adasyn_weights",
    "largest_remainder", "random_oversample", "oversample", "OVERSAMPLERS",
    "validate_params",
]
