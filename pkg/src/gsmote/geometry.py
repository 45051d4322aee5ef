"""Sampling kernel for G-SMOTE.

Points are drawn uniformly in the unit ball, optionally reflected across the
hyper-plane through the origin perpendicular to the center-surface axis
(truncation), squeezed toward that axis (deformation), and finally scaled by
the radius and moved onto the center.

``truncate``, ``deform`` and ``translate`` accept a single p-vector or an
(n, p) stack of points together with a matching direction (or stack of
directions), so the oversampler can apply them to a whole batch at once.
"""

from __future__ import annotations

import numpy as np

UNIT_TOL = 1e-9


class DegenerateDirection(ValueError):
    """The surface point coincides with the center; no axis is defined."""


def sample_unit_ball(p: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform draw from the closed unit p-ball.

    Consumes ``p`` standard normals (repeated on the measure-zero all-zero
    draw) followed by one uniform.
    """
    if p < 1:
        raise ValueError(f"dimension must be >= 1, got {p}")
    while True:
        v = rng.standard_normal(p)
        norm = np.sqrt(v @ v)
        if norm > 0:
            break
    r = rng.random()
    return r ** (1.0 / p) * (v / norm)


def make_direction(center, surface) -> np.ndarray:
    """Unit vector pointing from ``center`` to ``surface``."""
    diff = np.asarray(surface, dtype=float) - np.asarray(center, dtype=float)
    norm = np.sqrt(diff @ diff)
    if norm == 0:
        raise DegenerateDirection("surface point equals center")
    return diff / norm


def _parallel(x, e_par):
    return np.sum(x * e_par, axis=-1, keepdims=True)


def truncate(x, e_par, a_trunc: float) -> np.ndarray:
    """Reflect ``x`` through the origin-plane normal to ``e_par`` when |a_trunc - x.e| > 1."""
    x = np.asarray(x, dtype=float)
    x_par = _parallel(x, e_par)
    flip = np.abs(a_trunc - x_par) > 1
    return np.where(flip, x - 2.0 * x_par * e_par, x)


def deform(x, e_par, a_def: float) -> np.ndarray:
    """Shrink the component of ``x`` perpendicular to ``e_par`` by the factor (1 - a_def)."""
    x = np.asarray(x, dtype=float)
    x_perp = x - _parallel(x, e_par) * e_par
    return x - a_def * x_perp


def translate(x, center, radius) -> np.ndarray:
    """``center + radius * x``; ``radius`` may be a scalar or one value per row."""
    x = np.asarray(x, dtype=float)
    radius = np.asarray(radius, dtype=float)
    if radius.ndim == 1:
        radius = radius[:, None]
    return np.asarray(center, dtype=float) + radius * x


def transform(x, center, surface, radius, a_trunc: float, a_def: float) -> np.ndarray:
    """Truncate, deform and translate a batch of unit-ball points.

    Rows whose surface equals their center skip truncation and deformation,
    so with a zero radius they land exactly on the center.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    center = np.atleast_2d(np.asarray(center, dtype=float))
    surface = np.atleast_2d(np.asarray(surface, dtype=float))
    diff = surface - center
    norm = np.sqrt(np.einsum("ij,ij->i", diff, diff))[:, None]
    ok = (norm > 0)
    e_par = np.where(ok, diff / np.where(ok, norm, 1.0), 0.0)
    shaped = deform(truncate(x, e_par, a_trunc), e_par, a_def)
    shaped = np.where(ok, shaped, x)
    return translate(shaped, center, np.broadcast_to(np.asarray(radius, dtype=float), len(x)))
