"""Independent reference computations shared by the tests."""

import numpy as np

from rgan.nn import flatten_params, forward, unflatten_params


def finite_difference(net, x, upstream, h=1e-4):
    """Central differences of sum(forward(net, x) * upstream) w.r.t. every parameter."""
    theta = flatten_params(net)
    grad = np.empty_like(theta)
    for i in range(theta.size):
        plus, minus = theta.copy(), theta.copy()
        plus[i] += h
        minus[i] -= h
        fp = (forward(unflatten_params(net, plus), x).output * upstream).sum()
        fm = (forward(unflatten_params(net, minus), x).output * upstream).sum()
        grad[i] = (fp - fm) / (2 * h)
    return grad


def rel_error(a, b):
    return float(np.max(np.abs(a - b) / np.maximum(1e-6, np.abs(a) + np.abs(b))))


def pair_count_auc(scores, labels):
    pos = [s for s, y in zip(scores, labels) if y == 1]
    neg = [s for s, y in zip(scores, labels) if y != 1]
    total = 0.0
    for p in pos:
        for n in neg:
            total += 1.0 if p > n else 0.5 if p == n else 0.0
    return total / (len(pos) * len(neg))


def brute_correlation_sr(layer_pairs):
    """SR by explicit double loop over node pairs; constant nodes correlate 0."""
    maxima = []
    for d_acts, g_acts in layer_pairs:
        k = d_acts.shape[0]
        for j in range(d_acts.shape[1]):
            best = -np.inf
            for jj in range(g_acts.shape[1]):
                a, b = d_acts[:, j], g_acts[:, jj]
                sa, sb = a.std(), b.std()
                if sa == 0 or sb == 0:
                    rho = 0.0
                else:
                    rho = sum((a[t] - a.mean()) * (b[t] - b.mean()) for t in range(k)) / (k * sa * sb)
                best = max(best, rho)
            maxima.append(best)
    return float(np.mean(maxima))


def brute_knn(X, i, k):
    """k nearest other rows of row i by squared distance, ties by index."""
    d = [(float(((X[i] - X[j]) ** 2).sum()), j) for j in range(len(X)) if j != i]
    d.sort()
    return [j for _, j in d[:k]]


def on_segment(p, a, b, tol=1e-9):
    """Whether p = a + u (b - a) for some u in [0, 1]."""
    ab, ap = b - a, p - a
    denom = float(ab @ ab)
    if denom == 0:
        return bool(np.allclose(p, a, atol=tol))
    u = float(ap @ ab) / denom
    return -tol <= u <= 1 + tol and bool(np.allclose(a + u * ab, p, atol=tol))


def brute_spearman(x, y):
    """Rank-difference formula; valid only when neither side has ties."""
    n = len(x)
    rx = [sorted(x).index(v) for v in x]
    ry = [sorted(y).index(v) for v in y]
    d2 = sum((a - b) ** 2 for a, b in zip(rx, ry))
    return 1 - 6 * d2 / (n * (n * n - 1))
