"""KMMD quality signal and the KMMD-driven dropout schedule for the generator.

The schedule turns the running kernel-MMD between generated and real batches
into a dropout rate: the KMMD is min-max normalised over the training history
into ``q``; while ``q`` does not exceed the best value seen so far the rate is
zero, otherwise it grows linearly with the regression ``q - q_best``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

MAX_RATE = 0.95
SIGMA_FLOOR = 1e-9


@dataclass(frozen=True)
class KmmdConfig:
    bandwidth_mode: str = "median_heuristic"  # or "fixed"
    bandwidths: tuple = ()
    estimator: str = "biased"

    def __post_init__(self):
        if self.bandwidth_mode not in ("median_heuristic", "fixed"):
            raise ValueError(f"unknown bandwidth mode {self.bandwidth_mode!r}")
        if self.bandwidth_mode == "fixed":
            if not self.bandwidths or any(s <= 0 for s in self.bandwidths):
                raise ValueError("fixed bandwidths must be a nonempty list of positive values")
        if self.estimator != "biased":
            raise ValueError("only the biased estimator is supported")


@lru_cache(maxsize=16)
def _upper_indices(n: int):
    return np.triu_indices(n, k=1)


def _sq_distances(pooled: np.ndarray) -> np.ndarray:
    norms = np.einsum("ij,ij->i", pooled, pooled)
    sq = norms[:, None] + norms[None, :] - 2.0 * (pooled @ pooled.T)
    np.maximum(sq, 0.0, out=sq)
    np.fill_diagonal(sq, 0.0)
    return sq


def median_bandwidth(sq: np.ndarray) -> float:
    """Median pairwise distance from a square matrix of squared distances."""
    n = len(sq)
    if n < 2:
        return 1.0
    upper = sq[_upper_indices(n)]
    mid = upper.size // 2
    if upper.size % 2:
        med = np.sqrt(np.partition(upper, mid)[mid])
    else:
        lo, hi = np.partition(upper, [mid - 1, mid])[[mid - 1, mid]]
        med = 0.5 * (np.sqrt(lo) + np.sqrt(hi))
    return max(float(med), SIGMA_FLOOR)


def kmmd(a: np.ndarray, b: np.ndarray, cfg: Optional[KmmdConfig] = None) -> float:
    """Biased MMD^2 between two samples under a Gaussian kernel.

    With several fixed bandwidths the kernel is the average of the Gaussian
    kernels. The biased estimator keeps the diagonal terms, so the value is
    never negative.
    """
    cfg = cfg or KmmdConfig()
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    b = np.atleast_2d(np.asarray(b, dtype=np.float64))
    if a.size == 0 or b.size == 0:
        raise ValueError("kmmd needs two nonempty samples")
    if a.shape[1] != b.shape[1]:
        raise ValueError(f"column mismatch: {a.shape[1]} vs {b.shape[1]}")

    m = len(a)
    sq = _sq_distances(np.vstack([a, b]))
    if cfg.bandwidth_mode == "median_heuristic":
        sigmas = [median_bandwidth(sq)]
    else:
        sigmas = list(cfg.bandwidths)

    total = 0.0
    for s in sigmas:
        k = np.exp(sq * (-0.5 / (s * s)))
        k_aa = k[:m, :m].mean()
        k_bb = k[m:, m:].mean()
        k_ab = k[:m, m:].mean()
        total += (k_aa + k_bb) - 2.0 * k_ab
    return max(total / len(sigmas), 0.0)


@dataclass
class RestraintState:
    """Running state of the dropout schedule for one training run."""

    alpha: float = 0.2
    lam: float = 0.0
    kmmd_min: float = np.inf
    kmmd_max: float = -np.inf
    q_best: float = 1.0
    history: list = field(default_factory=list)

    def __post_init__(self):
        if self.alpha < 0 or self.lam < 0:
            raise ValueError("alpha and lambda must be nonnegative")

    def observe(self, raw: float) -> tuple[float, float, float]:
        """Feed one raw KMMD value; returns ``(q, q_best_used, rate)``.

        The rate is computed against the best index *before* this step, and
        only then is the best index updated.
        """
        q, new = normalize_q(raw, self)
        q_star = new.q_best
        rate = f_rate(q, q_star, self.alpha, self.lam)
        new = update_best(new, q)
        self.kmmd_min, self.kmmd_max, self.q_best = new.kmmd_min, new.kmmd_max, new.q_best
        self.history = new.history
        return q, q_star, rate


def normalize_q(raw: float, state: RestraintState) -> tuple[float, RestraintState]:
    """Min-max normalise ``raw`` against the full KMMD history (including ``raw``).

    Returns the index and a new state whose extremes include ``raw``; the best
    index is left untouched (see :func:`update_best`).
    """
    raw = float(raw)
    if raw < 0:
        raise ValueError("raw KMMD must be nonnegative")
    lo = min(state.kmmd_min, raw)
    hi = max(state.kmmd_max, raw)
    q = 0.0 if hi == lo else (raw - lo) / (hi - lo)
    q = min(max(q, 0.0), 1.0)
    return q, replace(state, kmmd_min=lo, kmmd_max=hi, history=[*state.history, raw])


def update_best(state: RestraintState, q: float) -> RestraintState:
    return replace(state, q_best=min(state.q_best, q))


def f_rate(q: float, q_star: float, alpha: float, lam: float) -> float:
    """Piecewise dropout rate: zero unless the index regressed past the best.

    For ``q > q_star`` the rate is ``alpha*q_star + (alpha+lam)*(q-q_star)``,
    clamped to ``[0, 0.95]``.
    """
    if q <= q_star:
        return 0.0
    rate = alpha * q_star + (alpha + lam) * (q - q_star)
    return float(min(max(rate, 0.0), MAX_RATE))


def rate_schedule(raw_values: Sequence[float], alpha: float, lam: float) -> list[float]:
    """Dropout rates produced by feeding ``raw_values`` through a fresh state."""
    state = RestraintState(alpha=alpha, lam=lam)
    return [state.observe(r)[2] for r in raw_values]
