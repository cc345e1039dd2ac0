import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from rgan.restraint import (
    MAX_RATE,
    KmmdConfig,
    RestraintState,
    f_rate,
    kmmd,
    median_bandwidth,
    normalize_q,
    rate_schedule,
)

unit = st.floats(0, 1)
small_matrix = arrays(np.float64, st.tuples(st.integers(1, 12), st.just(3)), elements=st.floats(-5, 5))


def brute_kmmd(a, b, sigma):
    def k(x, y):
        return np.exp(-((x - y) ** 2).sum() / (2 * sigma ** 2))
    kaa = np.mean([[k(x, y) for y in a] for x in a])
    kbb = np.mean([[k(x, y) for y in b] for x in b])
    kab = np.mean([[k(x, y) for y in b] for x in a])
    return kaa + kbb - 2 * kab


def test_identical_samples_zero():
    a = np.random.default_rng(0).normal(size=(50, 3))
    assert kmmd(a, a.copy()) < 1e-10


def test_symmetry():
    rng = np.random.default_rng(1)
    a, b = rng.normal(size=(30, 2)), rng.normal(1, 1, size=(40, 2))
    assert abs(kmmd(a, b) - kmmd(b, a)) < 1e-12


def test_monotone_in_shift():
    rng = np.random.default_rng(0)
    base = rng.normal(size=(200, 2))
    other = rng.normal(size=(200, 2))
    vals = [kmmd(base, other + s) for s in (0.5, 1.0, 2.0)]
    assert vals[0] < vals[1] < vals[2]


def test_matches_brute_force_with_median_bandwidth():
    rng = np.random.default_rng(3)
    a, b = rng.normal(size=(7, 2)), rng.normal(0.5, 1, size=(9, 2))
    pooled = np.vstack([a, b])
    dists = [np.linalg.norm(pooled[i] - pooled[j]) for i in range(16) for j in range(i + 1, 16)]
    sigma = float(np.median(dists))
    assert kmmd(a, b) == pytest.approx(brute_kmmd(a, b, sigma), abs=1e-12)


def test_fixed_bandwidths_average_kernels():
    rng = np.random.default_rng(4)
    a, b = rng.normal(size=(6, 2)), rng.normal(size=(5, 2))
    cfg = KmmdConfig("fixed", (0.5, 2.0))
    expected = 0.5 * (brute_kmmd(a, b, 0.5) + brute_kmmd(a, b, 2.0))
    assert kmmd(a, b, cfg) == pytest.approx(expected, abs=1e-12)


def test_median_bandwidth_floor():
    assert median_bandwidth(np.zeros((4, 4))) == 1e-9


@given(small_matrix, small_matrix)
def test_kmmd_nonnegative_and_symmetric(a, b):
    v = kmmd(a, b)
    assert v >= 0
    assert abs(v - kmmd(b, a)) < 1e-12


def test_kmmd_errors():
    with pytest.raises(ValueError):
        kmmd(np.ones((3, 2)), np.ones((3, 3)))
    with pytest.raises(ValueError):
        kmmd(np.empty((0, 2)), np.ones((3, 2)))
    with pytest.raises(ValueError):
        KmmdConfig("fixed", ())
    with pytest.raises(ValueError):
        KmmdConfig("fixed", (1.0, -1.0))


def test_f_rate_examples():
    assert f_rate(0.4, 0.5, 0.2, 0.3) == 0.0
    assert f_rate(0.8, 0.5, 0.2, 0.3) == pytest.approx(0.25, abs=1e-15)
    assert f_rate(1.0, 0.0, 0.5, 2.0) == MAX_RATE == 0.95


def test_f_rate_jump_at_q_star():
    # the printed piecewise form jumps from 0 to alpha*q_star just above q_star
    assert f_rate(0.5, 0.5, 0.2, 0.3) == 0.0
    assert f_rate(0.5 + 1e-12, 0.5, 0.2, 0.3) == pytest.approx(0.1, abs=1e-9)


@given(unit, unit, unit, st.floats(0, 2), st.floats(0, 2))
def test_f_rate_monotone_in_q(q1, q2, q_star, alpha, lam):
    lo, hi = sorted((q1, q2))
    assert f_rate(lo, q_star, alpha, lam) <= f_rate(hi, q_star, alpha, lam)


@given(unit, unit, st.floats(0, 2), st.floats(0, 2), st.floats(0, 2))
def test_f_rate_monotone_in_lambda(q, q_star, alpha, l1, l2):
    lo, hi = sorted((l1, l2))
    assert f_rate(q, q_star, alpha, lo) <= f_rate(q, q_star, alpha, hi)
    assert 0 <= f_rate(q, q_star, alpha, hi) <= MAX_RATE


def test_normalize_first_observation():
    q, s = normalize_q(0.7, RestraintState())
    assert q == 0.0 and s.kmmd_min == s.kmmd_max == 0.7


def test_normalize_midpoint():
    s = RestraintState(kmmd_min=0.1, kmmd_max=0.5)
    q, _ = normalize_q(0.3, s)
    assert q == pytest.approx(0.5)


def test_normalize_at_max():
    q, _ = normalize_q(0.5, RestraintState(kmmd_min=0.1, kmmd_max=0.5))
    assert q == 1.0


def test_normalize_rejects_negative():
    with pytest.raises(ValueError):
        normalize_q(-0.1, RestraintState())


def test_new_best_yields_zero_rate_on_its_step():
    s = RestraintState(alpha=0.2, lam=0.3)
    s.observe(0.5)
    s.observe(0.9)
    q, q_star, rate = s.observe(0.1)  # new minimum: q = 0
    assert q == 0.0 and rate == 0.0


def test_q_best_tracks_running_minimum_of_q():
    s = RestraintState(alpha=0.2, lam=0.3)
    assert s.q_best == 1.0
    q, q_star, rate = s.observe(0.4)
    assert (q, q_star, rate) == (0.0, 1.0, 0.0)
    assert s.q_best == 0.0
    q, q_star, rate = s.observe(0.8)  # worse: q = 1 against q* = 0
    assert q == 1.0 and q_star == 0.0 and rate == pytest.approx(0.5)


@given(st.lists(st.floats(0, 10), min_size=1, max_size=40), st.floats(0, 1), st.floats(0, 1))
def test_schedule_invariants(raws, alpha, lam):
    s = RestraintState(alpha=alpha, lam=lam)
    best = []
    for r in raws:
        q, _, rate = s.observe(r)
        assert 0 <= q <= 1 and 0 <= rate <= MAX_RATE
        assert s.kmmd_min <= s.kmmd_max
        best.append(s.q_best)
    assert all(b <= a for a, b in zip(best, best[1:]))
    assert s.history == [float(r) for r in raws]


def test_rate_schedule_improving_run_is_zero():
    assert rate_schedule([1.0, 0.8, 0.5, 0.2], 0.5, 0.5) == [0.0] * 4


def test_state_rejects_negative_coefficients():
    with pytest.raises(ValueError):
        RestraintState(alpha=-0.1)
