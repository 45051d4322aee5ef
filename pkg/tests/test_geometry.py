import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from gsmote.geometry import (DegenerateDirection, deform, make_direction, sample_unit_ball,
                             transform, translate, truncate)

E_X = np.array([1.0, 0.0])


def test_direction_examples():
    np.testing.assert_allclose(make_direction([0, 0], [3, 4]), [0.6, 0.8])
    np.testing.assert_array_equal(make_direction([1, 1], [1, 2]), [0.0, 1.0])
    with pytest.raises(DegenerateDirection):
        make_direction([1, 1], [1, 1])


@pytest.mark.parametrize("x, a, expected", [
    ([0.6, 0.2], 0.0, [0.6, 0.2]),
    ([-0.6, 0.2], 1.0, [0.6, 0.2]),
    ([0.6, 0.2], -1.0, [-0.6, 0.2]),
])
def test_truncate_examples(x, a, expected):
    np.testing.assert_allclose(truncate(np.array(x), E_X, a), expected, atol=1e-15)


@pytest.mark.parametrize("a, expected", [(0.0, [0.3, 0.4]), (1.0, [0.3, 0.0]), (0.5, [0.3, 0.2])])
def test_deform_examples(a, expected):
    np.testing.assert_allclose(deform(np.array([0.3, 0.4]), E_X, a), expected, atol=1e-15)


def test_translate_examples():
    x = np.array([0.5, -0.5])
    np.testing.assert_array_equal(translate(x, [0.0, 0.0], 1.0), x)
    np.testing.assert_array_equal(translate(x, [2.0, 3.0], 2.0), [3.0, 2.0])
    np.testing.assert_array_equal(translate(x, [2.0, 3.0], 0.0), [2.0, 3.0])


def test_transform_skips_shaping_when_surface_is_center():
    x = np.array([[0.3, -0.4]])
    out = transform(x, [[1.0, 1.0]], [[1.0, 1.0]], 0.0, 1.0, 1.0)
    np.testing.assert_array_equal(out, [[1.0, 1.0]])


def test_transform_matches_step_by_step_composition(rng):
    for _ in range(50):
        p = int(rng.integers(1, 6))
        x = sample_unit_ball(p, rng)
        c, s = rng.normal(size=p), rng.normal(size=p)
        a_t, a_d = rng.uniform(-1, 1), rng.uniform(0, 1)
        R = float(np.linalg.norm(s - c))
        e = make_direction(c, s)
        expected = translate(deform(truncate(x, e, a_t), e, a_d), c, R)
        np.testing.assert_allclose(transform(x[None], c[None], s[None], R, a_t, a_d)[0],
                                   expected, rtol=1e-14, atol=1e-14)


def test_ball_draws_inside_unit_ball(rng):
    for p in (1, 2, 3, 7, 20):
        for _ in range(200):
            assert np.linalg.norm(sample_unit_ball(p, rng)) <= 1.0


def test_one_dimensional_ball_is_uniform(rng):
    draws = np.array([sample_unit_ball(1, rng)[0] for _ in range(100_000)])
    assert stats.kstest(draws, stats.uniform(loc=-1, scale=2).cdf).pvalue > 0.01


def test_ball_draw_consumes_normals_then_one_uniform():
    a = np.random.default_rng(7)
    b = np.random.default_rng(7)
    x = sample_unit_ball(3, a)
    v = b.standard_normal(3)
    r = b.random()
    np.testing.assert_allclose(x, r ** (1 / 3) * v / np.linalg.norm(v), rtol=1e-15)
    assert a.random() == b.random()


def test_invalid_dimension(rng):
    with pytest.raises(ValueError):
        sample_unit_ball(0, rng)


@st.composite
def shaping_cases(draw):
    p = draw(st.sampled_from([1, 2, 3, 5, 20]))
    r = np.random.default_rng(draw(st.integers(0, 2**32 - 1)))
    x = sample_unit_ball(p, r)
    e = r.normal(size=p)
    e /= np.linalg.norm(e)
    return x, e


@settings(max_examples=300, deadline=None)
@given(shaping_cases(), st.floats(-1, 1))
def test_truncate_preserves_norm(case, a):
    x, e = case
    assert np.linalg.norm(truncate(x, e, a)) == pytest.approx(np.linalg.norm(x), abs=1e-12)


@settings(max_examples=300, deadline=None)
@given(shaping_cases(), st.floats(0, 1))
def test_deform_shrinks_only_the_perpendicular_part(case, a):
    x, e = case
    y = deform(x, e, a)
    assert np.linalg.norm(y) <= np.linalg.norm(x) + 1e-12
    assert y @ e == pytest.approx(x @ e, abs=1e-12)
    perp_x, perp_y = x - (x @ e) * e, y - (y @ e) * e
    np.testing.assert_allclose(perp_y, (1 - a) * perp_x, atol=1e-12)


@settings(max_examples=300, deadline=None)
@given(shaping_cases(), st.sampled_from([-1.0, 1.0]))
def test_full_truncation_half_space_and_idempotence(case, a):
    x, e = case
    once = truncate(x, e, a)
    assert a * (once @ e) >= 0
    np.testing.assert_array_equal(truncate(once, e, a), once)


@settings(max_examples=300, deadline=None)
@given(shaping_cases(), st.floats(-1, 1))
def test_partial_truncation_keeps_the_admissible_region(case, a):
    x, e = case
    once = truncate(x, e, a)
    assert np.linalg.norm(once) <= 1 + 1e-12
    t = once @ e
    # kept points satisfy |a - t| <= 1; reflected ones land on the far side
    if a >= 0:
        assert t >= a - 1 - 1e-12
    else:
        assert t <= a + 1 + 1e-12
