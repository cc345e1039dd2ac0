"""Score-producing binary classifiers and the AUC used to evaluate them."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .ann import fit_ann
from .knn import fit_knn
from .metrics import auc
from .svm import fit_svm
from .trees import fit_gradient_boosting, fit_random_forest

KINDS = ("ann", "svm", "knn", "rfc", "gbc")

_FITTERS = {
    "ann": fit_ann,
    "svm": fit_svm,
    "knn": fit_knn,
    "rfc": fit_random_forest,
    "gbc": fit_gradient_boosting,
}


@dataclass
class FittedClassifier:
    kind: str
    model: Any
    seed: int
    n_features: int
    params: dict = field(default_factory=dict)


def fit(kind: str, train, seed: int = 0, **params) -> FittedClassifier:
    """Train a classifier of ``kind`` on a :class:`LabeledDataset` (label 1 scores high)."""
    if kind not in _FITTERS:
        raise ValueError(f"unknown classifier {kind!r}; expected one of {KINDS}")
    X, y = train.features, train.labels
    if len(np.unique(y)) < 2:
        raise ValueError("training set must contain both classes")
    model = _FITTERS[kind](X, y, seed=seed, **params)
    return FittedClassifier(kind, model, seed, X.shape[1], dict(params))


def predict_scores(clf: FittedClassifier, X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != clf.n_features:
        raise ValueError(f"expected {clf.n_features} columns, got shape {X.shape}")
    return np.asarray(clf.model.predict_scores(X), dtype=np.float64)


__all__ = ["KINDS", "FittedClassifier", "auc", "fit", "predict_scores"]
