import numpy as np
import pytest
from hypothesis import given, strategies as st

from rgan.nn import Network, NetworkSpec, build_network, forward
from rgan.topology import (
    PATTERN_METHODS,
    ProbeSet,
    TopologyPattern,
    draw_probes,
    is_palindrome,
    make_pair,
    palindrome,
    satisfies_pattern,
    scale_generator,
    sr,
    sr_from_activations,
    standardize,
)

from helpers import brute_correlation_sr

widths = st.lists(st.integers(1, 40), min_size=1, max_size=4)


def test_isomorphic_base():
    p = make_pair(TopologyPattern("isomorphic"), [64, 32], 14)
    assert p.g_spec.hidden_widths == [64, 32] and p.d_spec.hidden_widths == [64, 32]
    assert p.layer_matching == ((0, 0), (1, 1))


def test_axisymmetric_base():
    p = make_pair(TopologyPattern("axisymmetric"), [64, 32], 14)
    assert p.g_spec.hidden_widths == [64, 32] and p.d_spec.hidden_widths == [32, 64]
    # mirrored matching pairs layers of equal width
    for gi, di in p.layer_matching:
        assert p.g_spec.hidden_widths[gi] == p.d_spec.hidden_widths[di]


def test_self_symmetric_base():
    p = make_pair(TopologyPattern("self_symmetric"), [64, 32], 14)
    assert p.g_spec.hidden_widths == [64, 32, 64] == p.d_spec.hidden_widths


def test_axi_and_self_symmetric_base():
    p = make_pair(TopologyPattern("axi_and_self_symmetric"), [64, 32], 14)
    assert p.g_spec.hidden_widths == [32, 64, 32] == p.d_spec.hidden_widths


def test_palindrome_rule():
    assert palindrome([64, 32]) == [64, 32, 64]
    assert palindrome([5]) == [5]
    assert is_palindrome([1, 2, 1]) and not is_palindrome([1, 2])


def test_pair_dimensions():
    p = make_pair(TopologyPattern("isomorphic"), [8], 5, noise_dim=3)
    assert p.g_spec.input_dim == 3 and p.g_spec.output_dim == 5
    assert p.d_spec.input_dim == 5 and p.d_spec.output_dim == 1
    assert p.g_spec.output_activation == "sigmoid"


def test_empty_base_rejected():
    with pytest.raises(ValueError):
        make_pair(TopologyPattern("isomorphic"), [], 4)


def test_custom_needs_widths():
    with pytest.raises(ValueError):
        TopologyPattern.custom([], [3])


def test_method_names():
    assert PATTERN_METHODS == {
        "isomorphic": "iwgan",
        "axisymmetric": "awgan",
        "self_symmetric": "swgan",
        "axi_and_self_symmetric": "aswgan",
    }


@given(widths, st.sampled_from(["isomorphic", "axisymmetric", "self_symmetric", "axi_and_self_symmetric"]))
def test_make_pair_satisfies_invariant(base, kind):
    assert satisfies_pattern(make_pair(TopologyPattern(kind), base, 4), kind)


def test_custom_unequal_depth_aligns_deepest():
    p = make_pair(TopologyPattern.custom([64, 32], [128]), [], 4)
    assert p.layer_matching == ((1, 0),)


def test_scale_generator_widths():
    p = make_pair(TopologyPattern("isomorphic"), [64, 32], 14)
    half = scale_generator(p, 0.5)
    assert half.g_spec.hidden_widths == [32, 16]
    assert half.d_spec == p.d_spec
    assert scale_generator(p, 0.01).g_spec.hidden_widths == [1, 1]
    assert scale_generator(p, 1 / 3).g_spec.hidden_widths == [22, 11]


def test_scale_generator_doubles_params():
    p = make_pair(TopologyPattern("isomorphic"), [64, 32], 14)
    n1 = p.g_spec.n_params
    n2 = scale_generator(p, 2.0).g_spec.n_params
    # only the 64x32 block grows quadratically; the rest doubles exactly
    assert 2 * n1 <= n2 <= 2 * n1 + 2 * 64 * 32 + 1


def test_sr_self_identity():
    spec = NetworkSpec.mlp(6, [10, 7], 3, activation="tanh")
    net = build_network(spec, 0)
    x = np.random.default_rng(0).normal(size=(40, 6))
    probes = ProbeSet(x, x)
    assert sr(net, net, ((0, 0), (1, 1)), probes) == pytest.approx(1.0, abs=1e-9)


def test_sr_matches_brute_force_oracle():
    rng = np.random.default_rng(5)
    d = build_network(NetworkSpec.mlp(8, [6], 1, activation="tanh"), 1)
    g = build_network(NetworkSpec.mlp(4, [6], 8, activation="tanh"), 2)
    probes = ProbeSet(rng.random((32, 8)), rng.uniform(-1, 1, (32, 4)))
    value = sr(g, d, ((0, 0),), probes)
    d_acts = forward(d, probes.d_probe).layers[0]
    g_acts = forward(g, probes.g_probe).layers[0]
    assert value == pytest.approx(brute_correlation_sr([(d_acts, g_acts)]), abs=1e-12)


def test_constant_d_nodes_give_zero():
    d_acts = np.ones((10, 4))
    g_acts = np.random.default_rng(0).normal(size=(10, 3))
    assert sr_from_activations([(d_acts, g_acts)]) == 0.0


def test_sr_bounds_and_affine_invariance():
    rng = np.random.default_rng(1)
    d_acts, g_acts = rng.normal(size=(20, 5)), rng.normal(size=(20, 7))
    base = sr_from_activations([(d_acts, g_acts)])
    assert -1 <= base <= 1
    scaled = d_acts * rng.uniform(0.5, 3.0, size=5) + rng.normal(size=5)
    assert sr_from_activations([(scaled, g_acts)]) == pytest.approx(base, abs=1e-12)


def test_sr_duplicated_probes_unchanged():
    rng = np.random.default_rng(2)
    d_acts, g_acts = rng.normal(size=(15, 4)), rng.normal(size=(15, 6))
    a = sr_from_activations([(d_acts, g_acts)])
    b = sr_from_activations([(np.vstack([d_acts, d_acts]), np.vstack([g_acts, g_acts]))])
    assert b == pytest.approx(a, abs=1e-12)


@given(st.integers(2, 30), st.integers(1, 6), st.integers(1, 6), st.integers(0, 1000))
def test_sr_in_range(k, nd, ng, seed):
    rng = np.random.default_rng(seed)
    val = sr_from_activations([(rng.normal(size=(k, nd)), rng.normal(size=(k, ng)))])
    assert -1.0 <= val <= 1.0


def test_probe_validation():
    with pytest.raises(ValueError):
        ProbeSet(np.ones((1, 3)), np.ones((1, 2)))
    with pytest.raises(ValueError):
        ProbeSet(np.ones((3, 3)), np.ones((4, 2)))


def test_draw_probes_shapes():
    p = draw_probes(np.random.default_rng(0).random((10, 3)), noise_dim=5, k=16, seed=1)
    assert p.d_probe.shape == (16, 3) and p.g_probe.shape == (16, 5)


def test_standardize_population_std():
    z = standardize(np.array([[1.0], [3.0]]))
    assert z.ravel().tolist() == [-1.0, 1.0]


def test_sr_rejects_bad_matching():
    net = build_network(NetworkSpec.mlp(3, [4], 1), 0)
    probes = ProbeSet(np.ones((3, 3)) * np.arange(3)[:, None], np.ones((3, 3)))
    with pytest.raises(ValueError):
        sr(net, net, ((0, 5),), probes)
