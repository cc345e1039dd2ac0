import numpy as np
from scipy.stats import rankdata


def auc(scores, labels) -> float:
    """ROC AUC as the Mann-Whitney statistic (ties count one half).

    Computed from mid-ranks, so the numerator is an exact multiple of 0.5 and
    the result equals explicit pair counting.
    """
    s = np.asarray(scores, dtype=np.float64).ravel()
    y = np.asarray(labels).ravel()
    if s.shape != y.shape:
        raise ValueError("scores and labels must have the same length")
    pos = y == 1
    n_pos, n_neg = int(pos.sum()), int((~pos).sum())
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC needs both classes present")
    if np.isnan(s).any():
        raise ValueError("scores contain NaN")
    ranks = rankdata(s)
    u = ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))
