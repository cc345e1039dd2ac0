"""One-hidden-layer network trained by full-batch gradient descent on cross-entropy."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from ..nn import Network, NetworkSpec, backward, build_network, forward, sgd_step


@dataclass
class AnnModel:
    net: Network  # outputs logits; the sigmoid is applied when scoring

    def decision_function(self, X):
        return forward(self.net, X).output[:, 0]

    def predict_scores(self, X):
        return expit(self.decision_function(X))


def bce_with_logits(logits, y) -> float:
    # log(1 + e^z) - y z, written stably
    return float(np.mean(np.logaddexp(0.0, logits) - y * logits))


def fit_ann(X, y, seed=0, hidden=32, epochs=200, lr=0.1, activation="relu") -> AnnModel:
    spec = NetworkSpec.mlp(X.shape[1], [hidden], 1, activation=activation, output_activation="linear")
    net = build_network(spec, seed)
    y = y.astype(np.float64)[:, None]
    n = len(y)
    for _ in range(epochs):
        trace = forward(net, X)
        # d mean-BCE / d logit = (sigmoid(z) - y) / n
        grads = backward(net, trace, (expit(trace.output) - y) / n)
        net = sgd_step(net, grads, lr)
    return AnnModel(net)
