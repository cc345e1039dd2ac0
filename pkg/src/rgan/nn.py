"""Dense feed-forward networks with hand-written reverse-mode gradients.

Everything here works on float64 numpy arrays. Networks are treated as values:
the update functions return new networks instead of mutating their inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.special import expit

LEAKY_SLOPE = 0.01
ACTIVATIONS = ("relu", "leaky_relu", "tanh", "sigmoid", "linear")


_sigmoid = expit


def activate(name: str, z: np.ndarray) -> np.ndarray:
    if name == "relu":
        return np.maximum(z, 0.0)
    if name == "leaky_relu":
        return np.maximum(z, LEAKY_SLOPE * z)
    if name == "tanh":
        return np.tanh(z)
    if name == "sigmoid":
        return _sigmoid(z)
    if name == "linear":
        return z
    raise ValueError(f"unknown activation {name!r}")


def activation_grad(name: str, z: np.ndarray) -> np.ndarray:
    """Derivative of the activation at pre-activation ``z``."""
    if name == "relu":
        return (z > 0).astype(z.dtype)
    if name == "leaky_relu":
        return np.where(z > 0, 1.0, LEAKY_SLOPE)
    if name == "tanh":
        t = np.tanh(z)
        return 1.0 - t * t
    if name == "sigmoid":
        s = _sigmoid(z)
        return s * (1.0 - s)
    if name == "linear":
        return np.ones_like(z)
    raise ValueError(f"unknown activation {name!r}")


@dataclass(frozen=True)
class NetworkSpec:
    """Layer widths and activations of a dense network.

    ``hidden`` is a sequence of ``(width, activation)`` pairs and may be empty.
    """

    input_dim: int
    hidden: tuple = ()
    output_dim: int = 1
    output_activation: str = "linear"

    def __post_init__(self):
        object.__setattr__(self, "hidden", tuple((int(w), str(a)) for w, a in self.hidden))
        for w in (self.input_dim, self.output_dim, *self.hidden_widths):
            if int(w) < 1:
                raise ValueError(f"layer width must be >= 1, got {w}")
        for a in (*(a for _, a in self.hidden), self.output_activation):
            if a not in ACTIVATIONS:
                raise ValueError(f"unknown activation {a!r}")

    @classmethod
    def mlp(cls, input_dim, widths, output_dim, activation="leaky_relu", output_activation="linear"):
        return cls(input_dim, tuple((w, activation) for w in widths), output_dim, output_activation)

    @property
    def hidden_widths(self) -> list[int]:
        return [w for w, _ in self.hidden]

    @property
    def layer_dims(self) -> list[int]:
        return [self.input_dim, *self.hidden_widths, self.output_dim]

    @property
    def activations(self) -> list[str]:
        return [a for _, a in self.hidden] + [self.output_activation]

    @property
    def n_params(self) -> int:
        dims = self.layer_dims
        return sum((fan_in + 1) * fan_out for fan_in, fan_out in zip(dims[:-1], dims[1:]))


@dataclass
class Network:
    spec: NetworkSpec
    weights: list  # (fan_out, fan_in) per layer
    biases: list  # (fan_out,) per layer
    rng_seed_used: int = 0

    def __post_init__(self):
        dims = self.spec.layer_dims
        if len(self.weights) != len(dims) - 1 or len(self.biases) != len(dims) - 1:
            raise ValueError("layer count does not match spec")
        for W, b, fan_in, fan_out in zip(self.weights, self.biases, dims[:-1], dims[1:]):
            if W.shape != (fan_out, fan_in) or b.shape != (fan_out,):
                raise ValueError(f"parameter shape {W.shape}/{b.shape} does not match ({fan_out}, {fan_in})")

    @property
    def n_layers(self) -> int:
        return len(self.weights)

    @property
    def n_params(self) -> int:
        return sum(W.size + b.size for W, b in zip(self.weights, self.biases))

    def copy(self) -> "Network":
        return Network(self.spec, [W.copy() for W in self.weights], [b.copy() for b in self.biases], self.rng_seed_used)

    def max_abs_param(self) -> float:
        return max(max(np.abs(W).max(), np.abs(b).max()) for W, b in zip(self.weights, self.biases))


def build_network(spec: NetworkSpec, seed: int) -> Network:
    """Glorot-uniform weights, zero biases; deterministic in ``seed``."""
    rng = np.random.default_rng(seed)
    dims = spec.layer_dims
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return Network(spec, weights, biases, int(seed))


@dataclass
class ForwardTrace:
    """Per-layer values recorded by :func:`forward`.

    ``layers[i]`` is the post-activation (and post-dropout) output of layer i;
    the last entry is the network output.
    """

    inputs: np.ndarray
    pre: list
    layers: list
    masks: list = field(default_factory=list)  # scaled dropout masks or None, per layer

    @property
    def output(self) -> np.ndarray:
        return self.layers[-1]


def forward(
    net: Network,
    batch: np.ndarray,
    dropout_rate: float = 0.0,
    dropout_seed: int = 0,
    train_mode: bool = False,
) -> ForwardTrace:
    """Run a batch through ``net``.

    In train mode with ``dropout_rate > 0`` every hidden unit is zeroed
    independently with that probability and survivors are scaled by
    ``1 / (1 - rate)``. The output layer never gets dropout.
    """
    x = np.asarray(batch, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != net.spec.input_dim:
        raise ValueError(f"expected batch with {net.spec.input_dim} columns, got shape {x.shape}")
    if not 0.0 <= dropout_rate < 1.0:
        raise ValueError("dropout_rate must be in [0, 1)")
    use_dropout = train_mode and dropout_rate > 0.0
    rng = np.random.default_rng(dropout_seed) if use_dropout else None

    acts = net.spec.activations
    pre, layers, masks = [], [], []
    a = x
    last = net.n_layers - 1
    for i, (W, b) in enumerate(zip(net.weights, net.biases)):
        z = a @ W.T + b
        a = activate(acts[i], z)
        mask = None
        if use_dropout and i < last:
            mask = (rng.random(a.shape) >= dropout_rate) / (1.0 - dropout_rate)
            a = a * mask
        pre.append(z)
        layers.append(a)
        masks.append(mask)
    return ForwardTrace(x, pre, layers, masks)


@dataclass
class Gradients:
    weights: list
    biases: list
    inputs: Optional[np.ndarray] = None  # d(scalar)/d(batch)

    def flat(self) -> np.ndarray:
        return np.concatenate([g.ravel() for pair in zip(self.weights, self.biases) for g in pair])


def backward(net: Network, trace: ForwardTrace, output_grad: np.ndarray) -> Gradients:
    """Backpropagate ``output_grad`` (d scalar / d output) through ``net``.

    Dropout masks stored in the trace are reused, so the gradients are those of
    the exact function that produced the trace.
    """
    if len(trace.layers) != net.n_layers:
        raise ValueError("trace does not belong to this network")
    delta = np.asarray(output_grad, dtype=np.float64)
    if delta.shape != trace.output.shape:
        raise ValueError(f"output_grad shape {delta.shape} != output shape {trace.output.shape}")

    acts = net.spec.activations
    gw = [None] * net.n_layers
    gb = [None] * net.n_layers
    for i in range(net.n_layers - 1, -1, -1):
        mask = trace.masks[i]
        if mask is not None:
            delta = delta * mask
        dz = delta * activation_grad(acts[i], trace.pre[i])
        prev = trace.layers[i - 1] if i > 0 else trace.inputs
        gw[i] = dz.T @ prev
        gb[i] = dz.sum(axis=0)
        delta = dz @ net.weights[i]
    return Gradients(gw, gb, delta)


@dataclass
class OptState:
    """RMSProp running averages of squared gradients."""

    sq_weights: list
    sq_biases: list
    decay: float = 0.9
    eps: float = 1e-8

    @classmethod
    def zeros_like(cls, net: Network, decay=0.9, eps=1e-8) -> "OptState":
        return cls([np.zeros_like(W) for W in net.weights], [np.zeros_like(b) for b in net.biases], decay, eps)


def _check_grad_shapes(net, grads):
    for W, b, gW, gb in zip(net.weights, net.biases, grads.weights, grads.biases):
        if W.shape != gW.shape or b.shape != gb.shape:
            raise ValueError("gradient shapes do not match network")


def rmsprop_step(net: Network, grads: Gradients, lr: float, state: Optional[OptState] = None,
                 decay: float = 0.9, eps: float = 1e-8) -> tuple[Network, OptState]:
    """One RMSProp update: v <- d*v + (1-d)*g^2 ; w <- w - lr*g/sqrt(v + eps)."""
    _check_grad_shapes(net, grads)
    if state is None:
        state = OptState.zeros_like(net, decay, eps)
    d, e = state.decay, state.eps
    new_w, new_b, sq_w, sq_b = [], [], [], []
    for W, b, gW, gb, vW, vb in zip(net.weights, net.biases, grads.weights, grads.biases,
                                    state.sq_weights, state.sq_biases):
        vW = d * vW + (1.0 - d) * gW * gW
        vb = d * vb + (1.0 - d) * gb * gb
        new_w.append(W - lr * gW / np.sqrt(vW + e))
        new_b.append(b - lr * gb / np.sqrt(vb + e))
        sq_w.append(vW)
        sq_b.append(vb)
    return Network(net.spec, new_w, new_b, net.rng_seed_used), OptState(sq_w, sq_b, d, e)


def sgd_step(net: Network, grads: Gradients, lr: float) -> Network:
    _check_grad_shapes(net, grads)
    return Network(
        net.spec,
        [W - lr * gW for W, gW in zip(net.weights, grads.weights)],
        [b - lr * gb for b, gb in zip(net.biases, grads.biases)],
        net.rng_seed_used,
    )


def clip_weights(net: Network, c: float) -> Network:
    if not c > 0:
        raise ValueError(f"clip constant must be positive, got {c}")
    return Network(
        net.spec,
        [np.clip(W, -c, c) for W in net.weights],
        [np.clip(b, -c, c) for b in net.biases],
        net.rng_seed_used,
    )


def flatten_params(net: Network) -> np.ndarray:
    return np.concatenate([p.ravel() for pair in zip(net.weights, net.biases) for p in pair])


def unflatten_params(net: Network, flat: Sequence[float]) -> Network:
    flat = np.asarray(flat, dtype=np.float64)
    out = net.copy()
    pos = 0
    for i in range(net.n_layers):
        for arr in (out.weights[i], out.biases[i]):
            n = arr.size
            arr[...] = flat[pos:pos + n].reshape(arr.shape)
            pos += n
    if pos != flat.size:
        raise ValueError("flat parameter vector has the wrong length")
    return out
