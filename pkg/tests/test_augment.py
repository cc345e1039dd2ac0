import numpy as np
import pytest
from hypothesis import given, strategies as st

from rgan.augment import AugmentPlan, apply_plan, n_synthetic, smote
from rgan.dataset import LabeledDataset
from rgan.gan import init_model
from rgan.topology import TopologyPattern, make_pair

from helpers import brute_knn, on_segment


def _dataset(n_maj, n_min, d=3, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.random((n_maj + n_min, d))
    return LabeledDataset(X, np.r_[np.zeros(n_maj), np.ones(n_min)])


def test_identical_rows():
    X = np.tile([[0.2, 0.4]], (5, 1))
    out = smote(X, k=3, n_new=7, seed=0)
    assert np.array_equal(out, np.tile([[0.2, 0.4]], (7, 1)))


def test_zero_new():
    assert smote(np.random.default_rng(0).random((4, 2)), n_new=0).shape == (0, 2)


def test_needs_two_rows():
    with pytest.raises(ValueError):
        smote(np.ones((1, 2)), n_new=3)


def segment_check(X, out, k):
    """Every synthetic row lies on a segment from some row to one of its brute-force k-NN."""
    k = min(k, len(X) - 1)
    neighbours = {i: brute_knn(X, i, k) for i in range(len(X))}
    for p in out:
        if not any(on_segment(p, X[i], X[j]) for i in range(len(X)) for j in neighbours[i]):
            return False
    return True


def test_segment_property():
    rng = np.random.default_rng(0)
    X = rng.random((12, 3))
    assert segment_check(X, smote(X, k=5, n_new=60, seed=1), 5)


@given(st.integers(2, 10), st.integers(1, 7), st.integers(0, 10_000))
def test_segment_property_random(n, k, seed):
    X = np.random.default_rng(seed).random((n, 2))
    assert segment_check(X, smote(X, k=k, n_new=10, seed=seed), k)


def test_smote_deterministic():
    X = np.random.default_rng(0).random((8, 2))
    assert np.array_equal(smote(X, 3, 10, seed=5), smote(X, 3, 10, seed=5))


def test_none_is_identity():
    ds = _dataset(10, 4)
    assert apply_plan(ds, AugmentPlan("none")) is ds


def test_counts_hundred_fifty():
    ds = _dataset(100, 50)
    out = apply_plan(ds, AugmentPlan("smote", seed=1))
    assert len(out) - len(ds) == 50
    assert out.class_counts == {0: 100, 1: 100}


def test_idempotent_at_target():
    ds = apply_plan(_dataset(100, 50), AugmentPlan("smote", seed=1))
    again = apply_plan(ds, AugmentPlan("smote", seed=2))
    assert len(again) == len(ds)


@given(st.integers(10, 60), st.integers(2, 9), st.floats(0.1, 1.0))
def test_ratio_within_one_row(n_maj, n_min, ratio):
    ds = _dataset(n_maj, n_min)
    out = apply_plan(ds, AugmentPlan("smote", target_ratio=ratio, seed=0))
    counts = out.class_counts
    if n_min < round(ratio * n_maj):
        assert abs(counts[1] / counts[0] - ratio) <= 1 / counts[0]
    # originals stay as a prefix, synthetic rows are minority and marked -1
    assert np.array_equal(out.features[: len(ds)], ds.features)
    assert np.all(out.labels[len(ds):] == 1)
    assert np.all(out.row_ids[len(ds):] == -1)
    assert out.features.min() >= 0 and out.features.max() <= 1


def test_gan_plan_clamped_rows():
    ds = _dataset(30, 10, d=4)
    model = init_model(make_pair(TopologyPattern("isomorphic"), [8], 4), 0)
    out = apply_plan(ds, AugmentPlan("gan", model, seed=3))
    assert out.class_counts == {0: 30, 1: 30}
    assert out.features.min() >= 0 and out.features.max() <= 1


def test_plan_validation():
    with pytest.raises(ValueError):
        AugmentPlan("gan")
    with pytest.raises(ValueError):
        AugmentPlan("smote", target_ratio=1.5)
    with pytest.raises(ValueError):
        AugmentPlan("adasyn")


def test_n_synthetic():
    assert n_synthetic(50, 100, 1.0) == 50
    assert n_synthetic(80, 100, 0.5) == 0
