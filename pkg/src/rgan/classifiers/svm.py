"""Linear SVM trained by deterministic full-batch subgradient descent."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class LinearSvm:
    w: np.ndarray
    b: float

    def predict_scores(self, X):
        """Signed margin ``w.x + b``; positive means the positive side."""
        return X @ self.w + self.b


def svm_objective(w, b, X, y_pm, C=1.0) -> float:
    """``(||w||^2 + b^2) / 2 + C * sum(hinge)`` on labels in {-1, +1}.

    The bias is regularised along with the weights.
    """
    hinge = np.maximum(0.0, 1.0 - y_pm * (X @ w + b))
    return float(0.5 * (w @ w + b * b) + C * hinge.sum())


def fit_svm(X, y, seed=0, C=1.0, epochs=1000) -> LinearSvm:
    """Pegasos-style updates on the rescaled objective ``lam/2 ||v||^2 + mean(hinge)``.

    ``lam = 1 / (C n)`` makes the minimiser match :func:`svm_objective`. The
    bias rides along as a constant feature, steps are ``1 / (lam t)``, iterates
    are projected onto the ball of radius ``1/sqrt(lam)`` and the second half
    of the trajectory is averaged. No randomness is involved; ``seed`` is
    accepted for a uniform interface.
    """
    n, d = X.shape
    Xa = np.hstack([X, np.ones((n, 1))])
    y_pm = np.where(y == 1, 1.0, -1.0)
    lam = 1.0 / (C * n)
    radius = 1.0 / np.sqrt(lam)
    v = np.zeros(d + 1)
    avg = np.zeros(d + 1)
    start = epochs // 2
    for t in range(1, epochs + 1):
        active = y_pm * (Xa @ v) < 1.0
        sub = lam * v - (y_pm[active, None] * Xa[active]).sum(axis=0) / n
        v = v - sub / (lam * t)
        norm = np.linalg.norm(v)
        if norm > radius:
            v *= radius / norm
        if t > start:
            avg += v
    avg /= epochs - start
    return LinearSvm(avg[:d], float(avg[d]))
