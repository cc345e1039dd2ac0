"""Generator/discriminator topology pairs and the SR similarity metric.

SR compares how the hidden units of D and G respond to probe inputs: every
node's response vector over ``k`` probes is standardised, D nodes are matched
to their most correlated G node in the paired layer, and the best
correlations are averaged over all D nodes of all matched layers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .nn import Network, NetworkSpec, forward

PATTERNS = ("isomorphic", "axisymmetric", "self_symmetric", "axi_and_self_symmetric", "custom")

# method name used in result tables for each static pattern
PATTERN_METHODS = {
    "isomorphic": "iwgan",
    "axisymmetric": "awgan",
    "self_symmetric": "swgan",
    "axi_and_self_symmetric": "aswgan",
}
METHOD_PATTERNS = {m: p for p, m in PATTERN_METHODS.items()}


@dataclass(frozen=True)
class TopologyPattern:
    kind: str
    g_hidden: tuple = ()
    d_hidden: tuple = ()

    def __post_init__(self):
        if self.kind not in PATTERNS:
            raise ValueError(f"unknown topology pattern {self.kind!r}")
        if self.kind == "custom":
            if not self.g_hidden or not self.d_hidden:
                raise ValueError("custom pattern needs nonempty G and D hidden lists")
            if min(self.g_hidden) < 1 or min(self.d_hidden) < 1:
                raise ValueError("custom widths must be >= 1")
        object.__setattr__(self, "g_hidden", tuple(int(w) for w in self.g_hidden))
        object.__setattr__(self, "d_hidden", tuple(int(w) for w in self.d_hidden))

    @classmethod
    def custom(cls, g_hidden, d_hidden):
        return cls("custom", tuple(g_hidden), tuple(d_hidden))


@dataclass(frozen=True)
class TopologyPair:
    g_spec: NetworkSpec
    d_spec: NetworkSpec
    layer_matching: tuple  # (g_hidden_index, d_hidden_index) pairs
    pattern: str = "custom"
    name: str = ""

    @property
    def feature_dim(self) -> int:
        return self.g_spec.output_dim


def palindrome(widths: Sequence[int]) -> list[int]:
    """``h ++ reverse(h minus last)``: [64, 32] -> [64, 32, 64]."""
    widths = list(widths)
    return widths + widths[-2::-1]


def is_palindrome(widths: Sequence[int]) -> bool:
    return list(widths) == list(widths)[::-1]


def hidden_lists(pattern: TopologyPattern, base_hidden: Sequence[int]) -> tuple[list[int], list[int]]:
    base = [int(w) for w in base_hidden]
    kind = pattern.kind
    if kind == "custom":
        return list(pattern.g_hidden), list(pattern.d_hidden)
    if not base:
        raise ValueError("base_hidden must be nonempty")
    if kind == "isomorphic":
        return base, list(base)
    if kind == "axisymmetric":
        return base, base[::-1]
    if kind == "self_symmetric":
        return palindrome(base), palindrome(base)
    # mirror first, then symmetrise; keeps D == reverse(G) with both palindromic
    # while staying distinct from the self-symmetric pair
    sym = palindrome(base[::-1])
    return sym, list(sym)


def default_matching(kind: str, n_g: int, n_d: int) -> tuple:
    if kind in ("axisymmetric", "axi_and_self_symmetric") and n_g == n_d:
        return tuple((n_g - 1 - i, i) for i in range(n_d))
    if n_g == n_d:
        return tuple((i, i) for i in range(n_d))
    # unequal depth: align the deepest layers, match along the shorter list
    n = min(n_g, n_d)
    return tuple((n_g - n + i, n_d - n + i) for i in range(n))


def make_pair(
    pattern: TopologyPattern,
    base_hidden: Sequence[int],
    feature_dim: int,
    noise_dim: Optional[int] = None,
    g_activation: str = "leaky_relu",
    d_activation: str = "leaky_relu",
    d_output: str = "linear",
    name: str = "",
) -> TopologyPair:
    """Build the (G, D) spec pair for ``pattern``.

    G maps ``noise_dim`` noise to ``feature_dim`` sigmoid outputs; D maps
    ``feature_dim`` features to one score with activation ``d_output``.
    """
    if pattern.kind != "custom" and not list(base_hidden):
        raise ValueError("base_hidden must be nonempty")
    noise_dim = feature_dim if noise_dim is None else noise_dim
    g_hidden, d_hidden = hidden_lists(pattern, base_hidden)
    g_spec = NetworkSpec.mlp(noise_dim, g_hidden, feature_dim, g_activation, "sigmoid")
    d_spec = NetworkSpec.mlp(feature_dim, d_hidden, 1, d_activation, d_output)
    matching = default_matching(pattern.kind, len(g_hidden), len(d_hidden))
    return TopologyPair(g_spec, d_spec, matching, pattern.kind, name or PATTERN_METHODS.get(pattern.kind, "custom"))


def satisfies_pattern(pair: TopologyPair, kind: str) -> bool:
    g, d = pair.g_spec.hidden_widths, pair.d_spec.hidden_widths
    ok = pair.g_spec.output_dim == pair.d_spec.input_dim and pair.d_spec.output_dim == 1
    if kind == "isomorphic":
        return ok and g == d
    if kind == "axisymmetric":
        return ok and d == g[::-1]
    if kind == "self_symmetric":
        return ok and is_palindrome(g) and is_palindrome(d)
    if kind == "axi_and_self_symmetric":
        return ok and d == g[::-1] and is_palindrome(g) and is_palindrome(d)
    return ok


@dataclass
class ProbeSet:
    d_probe: np.ndarray  # (k, feature_dim) real samples
    g_probe: np.ndarray  # (k, noise_dim) noise draws

    def __post_init__(self):
        self.d_probe = np.atleast_2d(np.asarray(self.d_probe, dtype=np.float64))
        self.g_probe = np.atleast_2d(np.asarray(self.g_probe, dtype=np.float64))
        if len(self.d_probe) != len(self.g_probe):
            raise ValueError("D and G probe sets must have the same row count")
        if len(self.d_probe) < 2:
            raise ValueError("need at least 2 probes to standardise responses")

    @property
    def k(self) -> int:
        return len(self.d_probe)


def draw_probes(real: np.ndarray, noise_dim: int, k: int = 128, seed: int = 0) -> ProbeSet:
    """``k`` real rows (with replacement if fewer exist) plus ``k`` uniform noise draws."""
    rng = np.random.default_rng(seed)
    real = np.asarray(real, dtype=np.float64)
    rows = rng.choice(len(real), size=k, replace=len(real) < k)
    return ProbeSet(real[rows], rng.uniform(-1.0, 1.0, size=(k, noise_dim)))


def standardize(acts: np.ndarray) -> np.ndarray:
    """Column-wise z-scores using the population std; constant columns become 0."""
    acts = np.asarray(acts, dtype=np.float64)
    centered = acts - acts.mean(axis=0)
    std = np.sqrt((centered ** 2).mean(axis=0))
    # tolerance relative to the column scale catches round-off "variance"
    scale = np.abs(acts).max(axis=0)
    dead = std <= 1e-12 * np.maximum(scale, 1.0)
    out = np.zeros_like(centered)
    out[:, ~dead] = centered[:, ~dead] / std[~dead]
    return out


def layer_correlations(d_acts: np.ndarray, g_acts: np.ndarray) -> np.ndarray:
    """Matrix of correlations between every D node (rows) and G node (columns)."""
    k = len(d_acts)
    if len(g_acts) != k:
        raise ValueError("activation matrices need the same probe count")
    rho = standardize(d_acts).T @ standardize(g_acts) / k
    return np.clip(rho, -1.0, 1.0)


def sr_from_activations(pairs: Sequence[tuple]) -> float:
    """SR from (d_activations, g_activations) matrices of the matched layers."""
    best = [layer_correlations(d, g).max(axis=1) for d, g in pairs]
    return float(np.concatenate(best).mean())


def sr(g: Network, d: Network, matching: Sequence[tuple], probes: ProbeSet) -> float:
    if probes.k < 2:
        raise ValueError("need at least 2 probes")
    if not matching:
        raise ValueError("no matched layers")
    g_layers = forward(g, probes.g_probe).layers
    d_layers = forward(d, probes.d_probe).layers
    n_g, n_d = g.n_layers - 1, d.n_layers - 1
    pairs = []
    for gi, di in matching:
        if not (0 <= gi < n_g and 0 <= di < n_d):
            raise ValueError(f"matched layer ({gi}, {di}) is not a hidden layer of both networks")
        pairs.append((d_layers[di], g_layers[gi]))
    return sr_from_activations(pairs)


def scale_generator(pair: TopologyPair, factor: float) -> TopologyPair:
    """Multiply G's hidden widths by ``factor`` (rounded up, at least 1); D is unchanged."""
    widths = [max(1, int(np.ceil(w * factor - 1e-9))) for w in pair.g_spec.hidden_widths]
    acts = [a for _, a in pair.g_spec.hidden]
    g_spec = NetworkSpec(pair.g_spec.input_dim, tuple(zip(widths, acts)), pair.g_spec.output_dim,
                         pair.g_spec.output_activation)
    return TopologyPair(g_spec, pair.d_spec, pair.layer_matching, pair.pattern, pair.name)
