"""Binary classifiers used to score oversamplers.

* Logistic regression on L2-regularized log-loss, trained full-batch by
  damped Newton steps (default) or fixed-step gradient descent.
* Gradient boosting with regression trees fitted to log-loss residuals
  ``y - p``, variance-reduction splits and one-step Newton leaf values.

The inner loops are compiled with numba; the benchmark fits tens of thousands
of these models.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numba
import numpy as np

PROBA_EPS = 1e-12


class ClassifierError(ValueError):
    pass


def _check_xy(X, y):
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    if X.ndim != 2 or y.shape != (X.shape[0],):
        raise ClassifierError(f"X shape {X.shape} and y shape {y.shape} do not match")
    if not np.all((y == 0) | (y == 1)):
        raise ClassifierError("y must be binary 0/1")
    return X, y


def sigmoid(z):
    """Logistic function, computed without overflow for large |z|."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _clamp(p):
    return np.clip(p, PROBA_EPS, 1.0 - PROBA_EPS)


# -- logistic regression ------------------------------------------------------

@dataclass(frozen=True)
class LrConfig:
    """``solver="gd"`` is fixed-step gradient descent with step halving on a
    loss increase; ``solver="newton"`` takes damped Newton steps. Both stop
    once an accepted step improves the loss by less than ``tol``."""

    learning_rate: float = 0.1
    max_iter: int = 5000
    l2: float = 1e-4
    tol: float = 1e-8
    solver: str = "newton"


@dataclass(frozen=True)
class LrModel:
    weights: np.ndarray
    bias: float
    n_iter: int
    loss: float


@numba.njit(cache=True)
def _softplus(z):
    # log(1 + exp(z))
    if z > 0:
        return z + np.log1p(np.exp(-z))
    return np.log1p(np.exp(z))


@numba.njit(cache=True)
def _sigmoid1(z):
    if z >= 0:
        return 1.0 / (1.0 + np.exp(-z))
    ez = np.exp(z)
    return ez / (1.0 + ez)


@numba.njit(cache=True)
def _lr_loss_grad(w, b, X, y, l2, grad_w):
    n, p = X.shape
    loss = 0.0
    gb = 0.0
    for j in range(p):
        grad_w[j] = 0.0
    for i in range(n):
        z = b
        for j in range(p):
            z += X[i, j] * w[j]
        loss += _softplus(z) - y[i] * z
        r = _sigmoid1(z) - y[i]
        gb += r
        for j in range(p):
            grad_w[j] += r * X[i, j]
    reg = 0.0
    for j in range(p):
        grad_w[j] = grad_w[j] / n + l2 * w[j]
        reg += w[j] * w[j]
    return loss / n + 0.5 * l2 * reg, gb / n


@numba.njit(cache=True)
def _lr_loss(w, b, X, y, l2):
    n, p = X.shape
    loss = 0.0
    for i in range(n):
        z = b
        for j in range(p):
            z += X[i, j] * w[j]
        loss += _softplus(z) - y[i] * z
    reg = 0.0
    for j in range(p):
        reg += w[j] * w[j]
    return loss / n + 0.5 * l2 * reg


@numba.njit(cache=True)
def _lr_train(X, y, lr, max_iter, l2, tol):
    p = X.shape[1]
    w = np.zeros(p)
    b = 0.0
    g = np.zeros(p)
    w_new = np.zeros(p)
    loss, gb = _lr_loss_grad(w, b, X, y, l2, g)
    step = lr
    it = 0
    while it < max_iter:
        if not np.isfinite(loss):
            break
        for j in range(p):
            w_new[j] = w[j] - step * g[j]
        b_new = b - step * gb
        new_loss = _lr_loss(w_new, b_new, X, y, l2)
        if new_loss > loss:
            # reject and shrink; a vanishing step means we are at the optimum
            step *= 0.5
            if step < 1e-12:
                break
            continue
        it += 1
        for j in range(p):
            w[j] = w_new[j]
        b = b_new
        improvement = loss - new_loss
        loss, gb = _lr_loss_grad(w, b, X, y, l2, g)
        if improvement < tol:
            break
    return w, b, it, loss


@numba.njit(cache=True)
def _lr_newton(X, y, max_iter, l2, tol):
    n, p = X.shape
    q = p + 1
    theta = np.zeros(q)  # weights then bias
    g = np.zeros(p)
    cand = np.zeros(q)
    loss, gb = _lr_loss_grad(theta[:p], theta[p], X, y, l2, g)
    it = 0
    while it < max_iter and np.isfinite(loss):
        grad = np.empty(q)
        grad[:p] = g
        grad[p] = gb
        H = np.zeros((q, q))
        for i in range(n):
            z = theta[p]
            for j in range(p):
                z += X[i, j] * theta[j]
            s = _sigmoid1(z)
            h = s * (1.0 - s) / n
            for a in range(p):
                for c in range(a, p):
                    H[a, c] += h * X[i, a] * X[i, c]
                H[a, p] += h * X[i, a]
            H[p, p] += h
        for a in range(q):
            for c in range(a):
                H[a, c] = H[c, a]
        for a in range(p):
            H[a, a] += l2
        H[p, p] += 1e-12
        direction = np.linalg.solve(H, grad)
        step = 1.0
        accepted = False
        new_loss = loss
        while step > 1e-12:
            for a in range(q):
                cand[a] = theta[a] - step * direction[a]
            new_loss = _lr_loss(cand[:p], cand[p], X, y, l2)
            if new_loss <= loss:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
        it += 1
        theta[:] = cand
        improvement = loss - new_loss
        loss, gb = _lr_loss_grad(theta[:p], theta[p], X, y, l2, g)
        if improvement < tol:
            break
    return theta[:p].copy(), theta[p], it, loss


def lr_loss_and_grad(w, b, X, y, l2=1e-4):
    """Mean log-loss + ``l2/2 * |w|^2`` and its gradient ``(grad_w, grad_b)``."""
    X, y = _check_xy(X, y)
    g = np.zeros(X.shape[1])
    loss, gb = _lr_loss_grad(np.ascontiguousarray(w, dtype=np.float64), float(b), X, y, l2, g)
    return loss, g, gb


def lr_fit(X, y, config: LrConfig = LrConfig()) -> LrModel:
    X, y = _check_xy(X, y)
    if config.solver == "newton":
        w, b, n_iter, loss = _lr_newton(X, y, config.max_iter, config.l2, config.tol)
    elif config.solver == "gd":
        w, b, n_iter, loss = _lr_train(X, y, config.learning_rate, config.max_iter,
                                       config.l2, config.tol)
    else:
        raise ClassifierError(f"unknown solver {config.solver!r}; use 'newton' or 'gd'")
    if not np.isfinite(loss):
        raise ClassifierError("logistic regression loss became non-finite; is the input scaled?")
    return LrModel(w, float(b), int(n_iter), float(loss))


def lr_predict_proba(model: LrModel, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != len(model.weights):
        raise ClassifierError(f"expected {len(model.weights)} features, got shape {X.shape}")
    return _clamp(sigmoid(X @ model.weights + model.bias))


# -- gradient boosting ----------------------------------------------------------

@dataclass(frozen=True)
class GbcConfig:
    n_estimators: int = 100
    max_depth: int = 3
    learning_rate: float = 0.1
    min_samples_leaf: int = 1


@dataclass(frozen=True)
class GbcModel:
    """Boosted trees stored as flat node arrays, one row per tree.

    ``feature[t, i] == -1`` marks node ``i`` of tree ``t`` as a leaf. Leaf
    values already include the learning rate. ``train_loss[t]`` is the mean
    training log-loss after ``t`` trees.
    """

    init_logodds: float
    learning_rate: float
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    train_loss: np.ndarray

    @property
    def n_trees(self) -> int:
        return self.feature.shape[0]


@numba.njit(cache=True)
def _make_leaf(F, y, prob, resid, idx, start, end, lr):
    """Leaf value: one Newton step scaled by ``lr``, halved until the leaf's
    summed loss does not increase. The value is added to ``F`` for the leaf's
    samples.

    Each sample's loss curvature is at most 1/4, so with hessian sum ``H``
    over ``m`` samples the step cannot raise the loss when ``H >= lr*m/8``;
    only less curved leaves are checked explicitly.
    """
    m = end - start
    num = 0.0
    den = 0.0
    for a in range(start, end):
        i = idx[a]
        num += resid[i]
        den += prob[i] * (1.0 - prob[i])
    if den <= 1e-150:
        return 0.0
    v = lr * num / den
    if den < lr * m / 8.0:
        base = 0.0
        for a in range(start, end):
            i = idx[a]
            base += _softplus(F[i]) - y[i] * F[i]
        accepted = False
        for _ in range(60):
            total = 0.0
            for a in range(start, end):
                i = idx[a]
                z = F[i] + v
                total += _softplus(z) - y[i] * z
            if total <= base:
                accepted = True
                break
            v *= 0.5
        if not accepted:
            return 0.0
    for a in range(start, end):
        F[idx[a]] += v
    return v


@numba.njit(cache=True)
def _build_tree(X, y, F, prob, resid, sorted_idx, sorted_x, max_depth,
                min_leaf, lr, feature, threshold, left, right, value, go_left, buf, fbuf):
    """Grow one tree in place.

    ``sorted_idx[f]`` holds all sample indices sorted by feature ``f``; each
    node owns the same slice ``[start, end)`` of every row, kept sorted by a
    stable partition after each split. ``sorted_x`` mirrors it with the
    feature values so split scans read contiguous memory. Leaf values are
    added to ``F`` as leaves are made.
    """
    n, p = X.shape
    work = sorted_idx.copy()
    wx = sorted_x.copy()
    st_node = np.empty(max_depth + 2, np.int64)
    st_start = np.empty_like(st_node)
    st_end = np.empty_like(st_node)
    st_depth = np.empty_like(st_node)
    st_node[0] = 0
    st_start[0] = 0
    st_end[0] = n
    st_depth[0] = 0
    top = 1
    n_nodes = 1
    while top > 0:
        top -= 1
        node = st_node[top]
        start = st_start[top]
        end = st_end[top]
        depth = st_depth[top]
        m = end - start

        best_f = -1
        if depth < max_depth and m >= 2 * min_leaf:
            total = 0.0
            for a in range(start, end):
                total += resid[work[0, a]]
            parent_score = total * total / m
            best_gain = 0.0
            best_pos = -1
            best_thr = 0.0
            for f in range(p):
                row = work[f]
                xrow = wx[f]
                s_left = 0.0
                for a in range(start, end - 1):
                    s_left += resid[row[a]]
                    n_left = a - start + 1
                    n_right = m - n_left
                    if n_left < min_leaf:
                        continue
                    if n_right < min_leaf:
                        break
                    x0 = xrow[a]
                    x1 = xrow[a + 1]
                    if x0 == x1:
                        continue
                    s_right = total - s_left
                    gain = s_left * s_left / n_left + s_right * s_right / n_right - parent_score
                    if gain > best_gain:
                        best_gain = gain
                        best_f = f
                        best_pos = a
                        thr = 0.5 * (x0 + x1)
                        if thr >= x1:
                            thr = x0
                        best_thr = thr

        if best_f < 0:
            feature[node] = -1
            value[node] = _make_leaf(F, y, prob, resid, work[0], start, end, lr)
            continue

        feature[node] = best_f
        threshold[node] = best_thr
        split_row = work[best_f]
        for a in range(start, end):
            go_left[split_row[a]] = a <= best_pos
        n_left = best_pos - start + 1
        for f in range(p):
            row = work[f]
            xrow = wx[f]
            li = start
            ri = start + n_left
            for a in range(start, end):
                i = row[a]
                if go_left[i]:
                    buf[li] = i
                    fbuf[li] = xrow[a]
                    li += 1
                else:
                    buf[ri] = i
                    fbuf[ri] = xrow[a]
                    ri += 1
            for a in range(start, end):
                row[a] = buf[a]
                xrow[a] = fbuf[a]
        lnode = n_nodes
        rnode = n_nodes + 1
        n_nodes += 2
        left[node] = lnode
        right[node] = rnode
        # right pushed first so the left subtree is grown first
        st_node[top] = rnode
        st_start[top] = start + n_left
        st_end[top] = end
        st_depth[top] = depth + 1
        top += 1
        st_node[top] = lnode
        st_start[top] = start
        st_end[top] = start + n_left
        st_depth[top] = depth + 1
        top += 1
    return n_nodes


@numba.njit(cache=True)
def _tree_apply(X, feature, threshold, left, right, value, out):
    for i in range(X.shape[0]):
        node = 0
        while feature[node] >= 0:
            if X[i, feature[node]] <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[i] += value[node]


@numba.njit(cache=True)
def _gbc_train(X, y, n_estimators, max_depth, min_leaf, lr, f0,
               feature, threshold, left, right, value, losses, track_loss):
    n, p = X.shape
    F = np.full(n, f0)
    prob = np.empty(n)
    resid = np.empty(n)
    sorted_idx = np.empty((p, n), np.int64)
    sorted_x = np.empty((p, n))
    for f in range(p):
        sorted_idx[f] = np.argsort(X[:, f], kind="mergesort")
        sorted_x[f] = X[sorted_idx[f], f]
    go_left = np.zeros(n, np.bool_)
    buf = np.empty(n, np.int64)
    fbuf = np.empty(n)
    if track_loss:
        losses[0] = _mean_logloss(F, y)
    for t in range(n_estimators):
        for i in range(n):
            prob[i] = _sigmoid1(F[i])
            resid[i] = y[i] - prob[i]
        _build_tree(X, y, F, prob, resid, sorted_idx, sorted_x,
                    max_depth, min_leaf, lr, feature[t], threshold[t], left[t], right[t],
                    value[t], go_left, buf, fbuf)
        if track_loss:
            losses[t + 1] = _mean_logloss(F, y)


@numba.njit(cache=True)
def _mean_logloss(F, y):
    s = 0.0
    for i in range(F.shape[0]):
        s += _softplus(F[i]) - y[i] * F[i]
    return s / F.shape[0]


@numba.njit(cache=True)
def _gbc_staged(X, f0, feature, threshold, left, right, value, stages):
    """Raw scores after each requested number of trees; ``stages`` ascending."""
    out = np.empty((stages.shape[0], X.shape[0]))
    F = np.full(X.shape[0], f0)
    t = 0
    for s in range(stages.shape[0]):
        while t < stages[s]:
            _tree_apply(X, feature[t], threshold[t], left[t], right[t], value[t], F)
            t += 1
        out[s] = F
    return out


def gbc_fit(X, y, config: GbcConfig = GbcConfig(), track_loss: bool = True) -> GbcModel:
    """Fit ``config.n_estimators`` trees stagewise.

    Split ties go to the lowest feature index, then the lowest threshold.
    With ``track_loss=False`` the per-stage training loss is not recorded
    (``train_loss`` is then all NaN), which saves one pass per stage.
    """
    if config.n_estimators < 0:
        raise ClassifierError("n_estimators must be >= 0")
    if config.max_depth < 1:
        raise ClassifierError("max_depth must be >= 1")
    if config.min_samples_leaf < 1:
        raise ClassifierError("min_samples_leaf must be >= 1")
    X, y = _check_xy(X, y)
    pos = float(np.clip(y.mean(), PROBA_EPS, 1 - PROBA_EPS))
    f0 = float(np.log(pos / (1 - pos)))

    n_nodes = 2 ** (config.max_depth + 1) - 1
    T = config.n_estimators
    feature = np.full((T, n_nodes), -1, dtype=np.int64)
    threshold = np.zeros((T, n_nodes))
    left = np.zeros((T, n_nodes), dtype=np.int64)
    right = np.zeros((T, n_nodes), dtype=np.int64)
    value = np.zeros((T, n_nodes))
    losses = np.full(T + 1, np.nan)
    if y.min() == y.max():
        # single class: every tree is one zero-valued leaf
        z = np.full(len(y), f0)
        losses[:] = np.mean(np.logaddexp(0.0, z) - y * z)
    else:
        _gbc_train(X, y, T, config.max_depth, config.min_samples_leaf, config.learning_rate, f0,
                   feature, threshold, left, right, value, losses, track_loss)
    return GbcModel(f0, config.learning_rate, feature, threshold, left, right, value, losses)


def gbc_staged_proba(model: GbcModel, X, stages) -> np.ndarray:
    """Scores of the sub-models made of the first ``stages[i]`` trees.

    Boosting is stagewise, so these equal separately fitted models with
    ``n_estimators = stages[i]``.
    """
    stages = np.asarray(stages, dtype=np.int64)
    if np.any(np.diff(stages) < 0) or np.any(stages < 0) or np.any(stages > model.n_trees):
        raise ClassifierError(f"stages must be ascending within [0, {model.n_trees}]")
    X = np.ascontiguousarray(X, dtype=np.float64)
    F = _gbc_staged(X, model.init_logodds, model.feature, model.threshold, model.left,
                    model.right, model.value, stages)
    return _clamp(sigmoid(F))


def gbc_predict_proba(model: GbcModel, X) -> np.ndarray:
    return gbc_staged_proba(model, X, [model.n_trees])[0]


def log_loss(y, proba) -> float:
    proba = _clamp(np.asarray(proba, dtype=float))
    y = np.asarray(y, dtype=float)
    return float(-np.mean(y * np.log(proba) + (1 - y) * np.log(1 - proba)))


# -- uniform registry -------------------------------------------------------------

CLASSIFIERS = {
    "lr": (LrConfig, lr_fit, lr_predict_proba),
    "gbc": (GbcConfig, gbc_fit, gbc_predict_proba),
}


def fit_predict(classifier: str, params: dict, X_train, y_train, X_test) -> np.ndarray:
    """Fit ``classifier`` with ``params`` and return minority-class scores for ``X_test``."""
    try:
        config_cls, fit, predict = CLASSIFIERS[classifier]
    except KeyError:
        raise ClassifierError(
            f"unknown classifier {classifier!r}; valid ids: {', '.join(CLASSIFIERS)}"
        ) from None
    model = fit(X_train, y_train, config_cls(**params))
    return predict(model, X_test)


def predict_grid(classifier: str, grid: list[dict], X_train, y_train, X_test) -> list[np.ndarray]:
    """Scores for every parameter set in ``grid``, in grid order.

    Gradient-boosting entries that differ only in ``n_estimators`` share one
    fit with the largest count and read the smaller models off its stages.
    """
    if classifier != "gbc":
        return [fit_predict(classifier, params, X_train, y_train, X_test) for params in grid]
    configs = [GbcConfig(**params) for params in grid]
    groups: dict[tuple, list[int]] = {}
    for i, c in enumerate(configs):
        groups.setdefault((c.max_depth, c.learning_rate, c.min_samples_leaf), []).append(i)
    out: list = [None] * len(grid)
    for members in groups.values():
        longest = max(configs[i].n_estimators for i in members)
        model = gbc_fit(X_train, y_train, replace(configs[members[0]], n_estimators=longest),
                        track_loss=False)
        stages = sorted({configs[i].n_estimators for i in members})
        scores = gbc_staged_proba(model, X_test, stages)
        for i in members:
            out[i] = scores[stages.index(configs[i].n_estimators)]
    return out


def validate_classifier_params(classifier: str, params: dict) -> None:
    if classifier not in CLASSIFIERS:
        raise ClassifierError(
            f"unknown classifier {classifier!r}; valid ids: {', '.join(CLASSIFIERS)}"
        )
    cfg = CLASSIFIERS[classifier][0](**params)
    if isinstance(cfg, LrConfig):
        if cfg.solver not in ("newton", "gd"):
            raise ClassifierError(f"unknown solver {cfg.solver!r}")
        if cfg.learning_rate <= 0 or cfg.max_iter < 1 or cfg.l2 < 0 or cfg.tol < 0:
            raise ClassifierError(f"invalid logistic regression settings {params}")
    else:
        if int(cfg.n_estimators) != cfg.n_estimators or cfg.n_estimators < 0:
            raise ClassifierError(f"n_estimators must be an integer >= 0, got {cfg.n_estimators}")
        if int(cfg.max_depth) != cfg.max_depth or cfg.max_depth < 1:
            raise ClassifierError(f"max_depth must be an integer >= 1, got {cfg.max_depth}")
        if cfg.learning_rate <= 0 or cfg.min_samples_leaf < 1:
            raise ClassifierError(f"invalid gradient boosting settings {params}")
