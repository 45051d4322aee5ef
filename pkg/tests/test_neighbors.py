import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gsmote.neighbors import NeighborError, knn, knn_table, nearest


def naive_knn(query, points, k, exclude=None):
    """Full sort over (distance, index) pairs computed one point at a time."""
    pairs = []
    for i, pt in enumerate(points):
        if i == exclude:
            continue
        pairs.append((math.sqrt(sum((a - b) ** 2 for a, b in zip(pt, query))), i))
    pairs.sort()
    return [i for _, i in pairs[:k]], [d for d, _ in pairs[:k]]


def test_hand_example():
    res = knn([0.0, 0.0], [[1, 0], [0, 2], [3, 3]], k=2)
    assert res.indices.tolist() == [0, 1]
    assert res.distances.tolist() == [1.0, 2.0]


def test_exclusion_skips_the_query_point():
    pts = np.array([[0.0, 0.0], [5.0, 5.0], [1.0, 1.0]])
    res = knn(pts[0], pts, k=1, exclude=0)
    assert res.indices.tolist() == [2]


def test_k_equal_to_set_size_with_exclusion_fails():
    pts = np.zeros((3, 2))
    with pytest.raises(NeighborError, match="need 3 neighbors but only 2"):
        knn(pts[0], pts, k=3, exclude=0)


def test_nearest_examples():
    assert nearest([0.0, 0.0], [[0.0, 2.0]]) == (0, 2.0)
    assert nearest([0.0, 0.0], [[1.0, 0.0], [0.0, 1.0]])[0] == 0
    with pytest.raises(NeighborError):
        nearest([0.0, 0.0], np.empty((0, 2)))


def test_nearest_matches_linear_scan(rng):
    pts = rng.normal(size=(50, 3))
    for _ in range(20):
        q = rng.normal(size=3)
        best, best_d = 0, float("inf")
        for i, pt in enumerate(pts):
            d = math.dist(q, pt)
            if d < best_d:
                best, best_d = i, d
        idx, dist = nearest(q, pts)
        assert idx == best
        assert dist == pytest.approx(best_d, rel=1e-12)


@st.composite
def point_sets(draw):
    p = draw(st.sampled_from([1, 2, 5, 20]))
    n = draw(st.integers(2, 40))
    seed = draw(st.integers(0, 2**32 - 1))
    r = np.random.default_rng(seed)
    # rounding produces exact duplicates and distance ties
    pts = np.round(r.normal(size=(n, p)), draw(st.sampled_from([0, 1, 6])))
    k = draw(st.integers(1, n - 1))
    exclude = draw(st.one_of(st.none(), st.integers(0, n - 1)))
    return pts, k, exclude


@settings(max_examples=300, deadline=None)
@given(point_sets())
def test_knn_matches_full_sort_oracle(case):
    pts, k, exclude = case
    q = pts[exclude] if exclude is not None else pts.mean(axis=0)
    res = knn(q, pts, k, exclude)
    idx, dist = naive_knn(q, pts, k, exclude)
    np.testing.assert_allclose(res.distances, dist, rtol=1e-12, atol=1e-12)
    # indices agree except where float rounding may reorder exact-distance ties
    for i, (a, b) in enumerate(zip(res.indices, idx)):
        if a != b:
            assert math.isclose(res.distances[i], dist[i], rel_tol=1e-12, abs_tol=1e-12)
    assert len(set(res.indices.tolist())) == k
    assert np.all(np.diff(res.distances) >= 0)
    if exclude is not None:
        assert exclude not in res.indices


@settings(max_examples=100, deadline=None)
@given(point_sets())
def test_kth_distance_non_decreasing_in_k(case):
    pts, _, exclude = case
    q = pts.mean(axis=0)
    n_avail = len(pts) - (exclude is not None)
    kth = [knn(q, pts, k, exclude).distances[-1] for k in range(1, n_avail + 1)]
    assert all(a <= b for a, b in zip(kth, kth[1:]))


@settings(max_examples=100, deadline=None)
@given(point_sets())
def test_table_agrees_with_per_query_search(case):
    pts, k, _ = case
    idx, dist = knn_table(pts, k)
    for i in range(len(pts)):
        res = knn(pts[i], pts, k, exclude=i)
        np.testing.assert_allclose(dist[i], res.distances, rtol=1e-12)
        assert i not in idx[i]


def test_table_against_reference_set(rng):
    a, b = rng.normal(size=(7, 2)), rng.normal(size=(9, 2))
    idx, dist = knn_table(a, 3, reference=b)
    for i in range(7):
        res = knn(a[i], b, 3)
        assert idx[i].tolist() == res.indices.tolist()


def test_ties_break_to_lower_index():
    pts = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])
    assert knn(pts[3], pts, 3, exclude=3).indices.tolist() == [0, 1, 2]
    idx, _ = knn_table(pts, 3)
    assert idx[3].tolist() == [0, 1, 2]
