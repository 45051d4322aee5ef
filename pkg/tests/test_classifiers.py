import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize

from gsmote.classifiers import (PROBA_EPS, ClassifierError, GbcConfig, LrConfig, LrModel,
                                fit_predict, gbc_fit, gbc_predict_proba, gbc_staged_proba,
                                log_loss, lr_fit, lr_loss_and_grad, lr_predict_proba,
                                predict_grid, sigmoid, validate_classifier_params)


def xor_data(n=200, seed=0):
    r = np.random.default_rng(seed)
    X = r.uniform(-1, 1, size=(n, 2))
    y = ((X[:, 0] > 0) ^ (X[:, 1] > 0)).astype(float)
    return X, y


def random_problem(seed):
    r = np.random.default_rng(seed)
    n, p = int(r.integers(20, 300)), int(r.integers(1, 6))
    X = r.normal(size=(n, p))
    if seed % 3 == 0:
        X = np.round(X, 1)  # repeated values exercise threshold ties
    logits = X @ r.normal(0, 2, size=p)
    y = (r.random(n) < sigmoid(logits)).astype(float)
    if y.min() == y.max():
        y[0] = 1 - y[0]
    return X, y, r


def test_sigmoid_hand_value():
    assert sigmoid(np.array([0.5]))[0] == pytest.approx(0.6225, abs=1e-4)


def test_zero_model_predicts_one_half():
    model = LrModel(np.zeros(3), 0.0, 0, float("nan"))
    np.testing.assert_array_equal(lr_predict_proba(model, np.ones((4, 3))), 0.5)


def test_huge_bias_clamps_without_overflow():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        hi = lr_predict_proba(LrModel(np.zeros(1), 1e6, 0, 0.0), np.zeros((2, 1)))
        lo = lr_predict_proba(LrModel(np.zeros(1), -1e6, 0, 0.0), np.zeros((2, 1)))
    assert np.all(hi == 1 - PROBA_EPS) and np.all(hi < 1.0)
    assert np.all(lo == PROBA_EPS)


@pytest.mark.parametrize("solver", ["newton", "gd"])
def test_separable_one_dimensional(solver):
    X = np.array([[-1.0]] * 20 + [[1.0]] * 20)
    y = np.array([0.0] * 20 + [1.0] * 20)
    model = lr_fit(X, y, LrConfig(solver=solver))
    assert np.all((lr_predict_proba(model, X) >= 0.5) == (y == 1))


def test_loss_matches_direct_formula(rng):
    X, y = rng.normal(size=(50, 3)), (rng.random(50) < 0.4).astype(float)
    w, b, l2 = rng.normal(size=3), 0.3, 0.01
    z = X @ w + b
    direct = np.mean(np.log1p(np.exp(-z)) + (1 - y) * z) + 0.5 * l2 * w @ w
    assert lr_loss_and_grad(w, b, X, y, l2)[0] == pytest.approx(direct, rel=1e-12)


def test_gradient_matches_central_differences():
    r = np.random.default_rng(2024)
    h = 1e-6
    worst = 0.0
    for _ in range(100):
        n, p = int(r.integers(5, 80)), int(r.integers(1, 8))
        X, y = r.normal(size=(n, p)), (r.random(n) < 0.3).astype(float)
        w, b, l2 = r.normal(0, 2, size=p), float(r.normal()), float(r.choice([0.0, 1e-4, 0.1]))
        _, gw, gb = lr_loss_and_grad(w, b, X, y, l2)
        fd = np.empty(p + 1)
        for j in range(p):
            e = np.zeros(p)
            e[j] = h
            fd[j] = (lr_loss_and_grad(w + e, b, X, y, l2)[0]
                     - lr_loss_and_grad(w - e, b, X, y, l2)[0]) / (2 * h)
        fd[p] = (lr_loss_and_grad(w, b + h, X, y, l2)[0]
                 - lr_loss_and_grad(w, b - h, X, y, l2)[0]) / (2 * h)
        g = np.r_[gw, gb]
        worst = max(worst, np.linalg.norm(g - fd) / np.linalg.norm(fd))
    assert worst < 1e-6


def test_newton_optimum_matches_generic_minimizer(rng):
    X = rng.normal(size=(120, 3))
    y = (rng.random(120) < sigmoid(X @ [1.0, -2.0, 0.5])).astype(float)
    model = lr_fit(X, y, LrConfig(l2=1e-2))

    def objective(theta):
        loss, gw, gb = lr_loss_and_grad(theta[:-1], theta[-1], X, y, 1e-2)
        return loss, np.r_[gw, gb]

    ref = minimize(objective, np.zeros(4), jac=True, method="BFGS", options={"gtol": 1e-10})
    np.testing.assert_allclose(np.r_[model.weights, model.bias], ref.x, atol=1e-5)
    gd = lr_fit(X, y, LrConfig(l2=1e-2, solver="gd", learning_rate=1.0, max_iter=20000,
                                tol=1e-14))
    np.testing.assert_allclose(np.r_[gd.weights, gd.bias], ref.x, atol=1e-3)


def test_lr_rejects_bad_input():
    with pytest.raises(ClassifierError):
        lr_fit(np.ones((3, 2)), np.array([0.0, 1.0]))
    with pytest.raises(ClassifierError):
        lr_fit(np.ones((2, 1)), np.array([0.0, 1.0]), LrConfig(solver="sgd"))


def test_prior_only_model():
    X = np.arange(10.0)[:, None]
    y = np.array([1.0] * 3 + [0.0] * 7)
    model = gbc_fit(X, y, GbcConfig(n_estimators=0))
    np.testing.assert_allclose(gbc_predict_proba(model, X), 0.3, rtol=1e-12)


def test_xor_depth_two_fits_training_set():
    X, y = xor_data()
    model = gbc_fit(X, y, GbcConfig(n_estimators=50, max_depth=2))
    assert np.mean((gbc_predict_proba(model, X) >= 0.5) == (y == 1)) == 1.0


def test_stump_splits_at_midpoint():
    X = np.array([[0.0], [1.0], [2.0], [3.0]])
    y = np.array([0.0, 0.0, 1.0, 1.0])
    model = gbc_fit(X, y, GbcConfig(n_estimators=1, max_depth=1))
    assert model.feature[0, 0] == 0 and model.threshold[0, 0] == 1.5


def test_split_ties_go_to_lowest_feature(rng):
    x = rng.normal(size=40)
    X = np.c_[x, x, x]
    y = (x > 0.2).astype(float)
    model = gbc_fit(X, y, GbcConfig(n_estimators=5, max_depth=3))
    used = model.feature[model.feature >= 0]
    assert used.size and np.all(used == 0)


@pytest.mark.parametrize("label, expected", [(1.0, 1 - PROBA_EPS), (0.0, PROBA_EPS)])
def test_single_class_is_clamped(label, expected):
    X = np.arange(6.0)[:, None]
    model = gbc_fit(X, np.full(6, label), GbcConfig(n_estimators=3))
    np.testing.assert_allclose(gbc_predict_proba(model, X), expected, rtol=1e-9)
    assert model.n_trees == 3


def test_trees_and_leaves_are_well_formed():
    X, y, _ = random_problem(5)
    model = gbc_fit(X, y, GbcConfig(n_estimators=17, max_depth=4))
    assert model.n_trees == 17
    assert np.all(np.isfinite(model.value))
    assert np.all(np.isfinite(model.train_loss))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_training_loss_never_increases(seed):
    X, y, r = random_problem(seed)
    cfg = GbcConfig(n_estimators=25, max_depth=int(r.integers(1, 6)),
                    learning_rate=float(r.choice([0.1, 0.5, 1.0])),
                    min_samples_leaf=int(r.integers(1, 5)))
    model = gbc_fit(X, y, cfg)
    assert np.all(np.diff(model.train_loss) <= 0)
    # recorded losses match a recomputation from the staged predictions; the
    # recomputation clamps probabilities at 1e-12, hence the absolute slack
    staged = gbc_staged_proba(model, X, np.arange(cfg.n_estimators + 1))
    recomputed = [log_loss(y, s) for s in staged]
    np.testing.assert_allclose(model.train_loss, recomputed, rtol=1e-9, atol=1e-12)


def test_staged_prefix_equals_separate_fit():
    X, y, _ = random_problem(7)
    long = gbc_fit(X, y, GbcConfig(n_estimators=40, max_depth=3))
    short = gbc_fit(X, y, GbcConfig(n_estimators=15, max_depth=3))
    np.testing.assert_array_equal(gbc_staged_proba(long, X, [15])[0],
                                  gbc_predict_proba(short, X))


def test_fits_are_deterministic():
    X, y, _ = random_problem(11)
    a = gbc_fit(X, y, GbcConfig(n_estimators=20, max_depth=4))
    b = gbc_fit(X, y, GbcConfig(n_estimators=20, max_depth=4))
    for field in ("feature", "threshold", "value", "train_loss"):
        np.testing.assert_array_equal(getattr(a, field), getattr(b, field))


def test_grid_shortcut_matches_individual_fits():
    X, y, _ = random_problem(13)
    grid = [{"max_depth": d, "n_estimators": n} for d in (2, 4) for n in (10, 30)]
    for clf, g in (("gbc", grid), ("lr", [{}, {"l2": 0.1}])):
        shared = predict_grid(clf, g, X, y, X[:10])
        for params, scores in zip(g, shared):
            np.testing.assert_array_equal(scores, fit_predict(clf, params, X, y, X[:10]))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_scores_stay_inside_clamp(seed):
    X, y, _ = random_problem(seed)
    for clf, params in (("lr", {}), ("gbc", {"n_estimators": 30, "max_depth": 5,
                                             "learning_rate": 1.0})):
        s = fit_predict(clf, params, X, y, X * 3)
        assert np.all(s >= PROBA_EPS) and np.all(s <= 1 - PROBA_EPS)


def test_classifier_parameter_validation():
    with pytest.raises(ClassifierError, match="valid ids"):
        validate_classifier_params("svm", {})
    with pytest.raises(ClassifierError):
        validate_classifier_params("gbc", {"max_depth": 0})
    with pytest.raises(TypeError):
        validate_classifier_params("lr", {"depth": 3})
