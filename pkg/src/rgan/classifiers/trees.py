"""CART trees, random forests and gradient-boosted trees for binary labels.

Trees are stored as flat arrays. Split search sorts the node's rows once per
candidate feature and scores every boundary between distinct values; ties go
to the lowest feature index, then the lowest threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import expit


@dataclass
class Tree:
    feature: np.ndarray  # -1 marks a leaf
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    @property
    def n_leaves(self) -> int:
        return int((self.feature < 0).sum())

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf node index reached by every row of ``X`` (goes left on ``x <= threshold``)."""
        node = np.zeros(len(X), dtype=np.int64)
        rows = np.arange(len(X))
        while True:
            f = self.feature[node]
            active = f >= 0
            if not active.any():
                return node
            r, n = rows[active], node[active]
            go_left = X[r, f[active]] <= self.threshold[n]
            node[r] = np.where(go_left, self.left[n], self.right[n])

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.value[self.apply(X)]


def best_split(X, y, features, criterion, min_leaf=1):
    """Best ``(feature, threshold)`` for the rows ``X`` (n x d) or ``None``.

    ``criterion`` is ``"gini"`` (y in {0, 1}) or ``"mse"`` (real y). Both are
    scored as a quantity to maximise: the sum over children of
    ``(c1^2 + c0^2) / n`` for gini and ``S^2 / n`` for squared error.
    """
    n = len(y)
    if n < 2 * min_leaf:
        return None
    features = np.asarray(sorted(features))
    Xf = X[:, features]
    order = np.argsort(Xf, axis=0, kind="stable")
    xs = np.take_along_axis(Xf, order, axis=0)
    ys = y[order]
    csum = np.cumsum(ys, axis=0)[:-1]  # left sums for a cut after position i
    total = csum[-1] + ys[-1] if n > 1 else ys[0]
    n_left = np.arange(1, n, dtype=np.float64)[:, None]
    n_right = n - n_left
    s_left, s_right = csum, total - csum
    if criterion == "gini":
        score = (s_left ** 2 + (n_left - s_left) ** 2) / n_left + (s_right ** 2 + (n_right - s_right) ** 2) / n_right
    else:
        score = s_left ** 2 / n_left + s_right ** 2 / n_right
    valid = xs[1:] > xs[:-1]
    if min_leaf > 1:
        valid &= (n_left >= min_leaf) & (n_right >= min_leaf)
    if not valid.any():
        return None
    score = np.where(valid, score, -np.inf).T  # (features, positions): argmax breaks ties low-first
    j, i = np.unravel_index(np.argmax(score), score.shape)
    return int(features[j]), float(0.5 * (xs[i, j] + xs[i + 1, j]))


def grow_tree(
    X: np.ndarray,
    y: np.ndarray,
    criterion: str = "gini",
    max_depth: Optional[int] = None,
    max_features: Optional[int] = None,
    min_leaf: int = 1,
    rng: Optional[np.random.Generator] = None,
) -> Tree:
    """Grow a CART tree; leaves store the mean of ``y`` over their rows."""
    d = X.shape[1]
    feature, threshold, left, right, value = [], [], [], [], []

    def new_node(rows):
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(float(y[rows].mean()))
        return len(feature) - 1

    stack = [(new_node(np.arange(len(y))), np.arange(len(y)), 0)]
    while stack:
        node, rows, depth = stack.pop()
        yr = y[rows]
        if len(rows) < 2 or (max_depth is not None and depth >= max_depth) or np.all(yr == yr[0]):
            continue
        Xr = X[rows]
        if max_features is None or max_features >= d:
            split = best_split(Xr, yr, range(d), criterion, min_leaf)
        else:
            perm = rng.permutation(d)
            split = best_split(Xr, yr, perm[:max_features], criterion, min_leaf)
            if split is None:
                # sampled features were all constant here; fall back to the rest
                split = best_split(Xr, yr, perm[max_features:], criterion, min_leaf)
        if split is None:
            continue
        f, t = split
        go_left = Xr[:, f] <= t
        lrows, rrows = rows[go_left], rows[~go_left]
        feature[node], threshold[node] = f, t
        left[node], right[node] = new_node(lrows), new_node(rrows)
        stack.append((right[node], rrows, depth + 1))
        stack.append((left[node], lrows, depth + 1))

    return Tree(np.array(feature), np.array(threshold), np.array(left), np.array(right), np.array(value))


@dataclass
class RandomForest:
    trees: list

    def predict_scores(self, X):
        """Mean over trees of the leaf's positive fraction (the vote share for pure leaves)."""
        return np.mean([t.predict(X) for t in self.trees], axis=0)


def fit_random_forest(X, y, seed=0, n_trees=100, max_features="sqrt", max_depth=None, min_leaf=1,
                      bootstrap=True) -> RandomForest:
    n, d = X.shape
    m = max(1, math.ceil(math.sqrt(d))) if max_features == "sqrt" else (max_features or d)
    trees = []
    # one stream per tree so the forest does not depend on training order
    for ss in np.random.SeedSequence(seed).spawn(n_trees):
        rng = np.random.default_rng(ss)
        rows = rng.integers(0, n, size=n) if bootstrap else np.arange(n)
        trees.append(grow_tree(X[rows], y[rows].astype(np.float64), "gini", max_depth, m, min_leaf, rng))
    return RandomForest(trees)


@dataclass
class GradientBoosting:
    init: float
    learning_rate: float
    trees: list

    def decision_function(self, X):
        F = np.full(len(X), self.init)
        for t in self.trees:
            F += self.learning_rate * t.predict(X)
        return F

    def predict_scores(self, X):
        return expit(self.decision_function(X))


def fit_gradient_boosting(X, y, seed=0, n_estimators=100, learning_rate=0.1, max_depth=3) -> GradientBoosting:
    """Logistic-loss boosting with Newton-step leaf values."""
    y = y.astype(np.float64)
    p0 = np.clip(y.mean(), 1e-12, 1 - 1e-12)
    init = float(np.log(p0 / (1 - p0)))
    F = np.full(len(y), init)
    trees = []
    for _ in range(n_estimators):
        p = expit(F)
        resid = y - p
        tree = grow_tree(X, resid, "mse", max_depth=max_depth)
        leaves = tree.apply(X)
        num = np.bincount(leaves, weights=resid, minlength=tree.n_nodes)
        den = np.bincount(leaves, weights=p * (1 - p), minlength=tree.n_nodes)
        vals = np.where(np.abs(den) < 1e-150, 0.0, num / np.where(den == 0, 1.0, den))
        tree.value = vals
        F += learning_rate * vals[leaves]
        trees.append(tree)
    return GradientBoosting(init, learning_rate, trees)
