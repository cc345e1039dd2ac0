"""GAN / WGAN training on the minority rows of a tabular dataset.

The restraint never enters a loss: static restraint is the choice of topology
pair, and dynamic restraint only changes the dropout rate used in G's
training-mode forward passes.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .nn import Network, OptState, backward, build_network, clip_weights, forward, rmsprop_step
from .restraint import KmmdConfig, RestraintState, kmmd
from .topology import ProbeSet, TopologyPair, draw_probes, sr

SCORE_EPS = 1e-7
LOSS_KINDS = ("vanilla", "wasserstein")
RESTRAINTS = ("none", "static", "dynamic")


def _scores(x, name):
    x = np.asarray(x, dtype=np.float64).ravel()
    if x.size == 0:
        raise ValueError(f"{name} is empty")
    return x


def d_loss_vanilla(d_real, d_fake) -> float:
    """``-mean(log D(x)) - mean(log(1 - D(G(z))))`` with scores clamped away from 0 and 1."""
    r = np.clip(_scores(d_real, "d_real"), SCORE_EPS, 1 - SCORE_EPS)
    f = np.clip(_scores(d_fake, "d_fake"), SCORE_EPS, 1 - SCORE_EPS)
    return float(-np.mean(np.log(r)) - np.mean(np.log1p(-f)))


def g_loss_vanilla(d_fake) -> float:
    """Non-saturating generator loss ``-mean(log D(G(z)))``."""
    f = np.clip(_scores(d_fake, "d_fake"), SCORE_EPS, 1 - SCORE_EPS)
    return float(-np.mean(np.log(f)))


def d_loss_wasserstein(s_real, s_fake) -> float:
    """Critic loss ``mean(s_fake) - mean(s_real)`` (negated critic objective)."""
    return float(np.mean(_scores(s_fake, "s_fake")) - np.mean(_scores(s_real, "s_real")))


def g_loss_wasserstein(s_fake) -> float:
    return float(-np.mean(_scores(s_fake, "s_fake")))


@dataclass
class GanConfig:
    loss_kind: str = "wasserstein"
    noise_dim: Optional[int] = None  # defaults to the feature dimension
    batch_size: int = 64
    iterations: int = 3000
    critic_steps: Optional[int] = None  # 5 for wasserstein, 1 for vanilla
    clip_c: float = 0.05
    lr_g: Optional[float] = None
    lr_d: Optional[float] = None
    rms_decay: float = 0.9
    restraint: str = "none"
    alpha: float = 0.2
    lam: float = 0.0
    kmmd_batch: int = 256
    sr_every: int = 0  # 0 disables SR snapshots
    sr_probes: int = 128
    seed: int = 0

    def __post_init__(self):
        if self.loss_kind not in LOSS_KINDS:
            raise ValueError(f"loss_kind must be one of {LOSS_KINDS}")
        if self.restraint not in RESTRAINTS:
            raise ValueError(f"restraint must be one of {RESTRAINTS}")
        if self.iterations < 0 or self.batch_size < 1 or self.kmmd_batch < 1:
            raise ValueError("iterations must be >= 0 and batch sizes >= 1")
        if self.alpha < 0 or self.lam < 0:
            raise ValueError("alpha and lambda must be nonnegative")
        if self.loss_kind == "wasserstein" and not self.clip_c > 0:
            raise ValueError("clip_c must be positive")
        if self.critic_steps is None:
            self.critic_steps = 5 if self.loss_kind == "wasserstein" else 1
        if self.critic_steps < 1:
            raise ValueError("critic_steps must be >= 1")
        default_lr = 5e-4
        self.lr_g = default_lr if self.lr_g is None else self.lr_g
        self.lr_d = default_lr if self.lr_d is None else self.lr_d


@dataclass
class GanModel:
    generator: Network
    discriminator: Network

    @property
    def noise_dim(self) -> int:
        return self.generator.spec.input_dim

    @property
    def feature_dim(self) -> int:
        return self.generator.spec.output_dim


@dataclass
class IterationRecord:
    iteration: int
    d_loss: float
    g_loss: float
    raw_kmmd: Optional[float] = None
    q: Optional[float] = None
    q_star: Optional[float] = None
    dropout_rate: Optional[float] = None
    sr: Optional[float] = None


@dataclass
class TrainTrace:
    records: list = field(default_factory=list)

    def __len__(self):
        return len(self.records)

    def column(self, name: str) -> list:
        return [getattr(r, name) for r in self.records]

    def to_csv(self, path) -> None:
        cols = ["iter", "d_loss", "g_loss", "kmmd", "q", "dropout_rate"]
        with_sr = any(r.sr is not None for r in self.records)
        if with_sr:
            cols.append("sr")
        fmt = lambda v: "" if v is None else repr(float(v))
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(cols)
            for r in self.records:
                row = [r.iteration, fmt(r.d_loss), fmt(r.g_loss), fmt(r.raw_kmmd), fmt(r.q), fmt(r.dropout_rate)]
                if with_sr:
                    row.append(fmt(r.sr))
                w.writerow(row)


def sample_noise(rng: np.random.Generator, n: int, dim: int) -> np.ndarray:
    return rng.uniform(-1.0, 1.0, size=(n, dim))


def init_model(pair: TopologyPair, seed: int) -> GanModel:
    ss = np.random.SeedSequence(seed).spawn(2)
    return GanModel(
        build_network(pair.g_spec, int(ss[0].generate_state(1)[0])),
        build_network(pair.d_spec, int(ss[1].generate_state(1)[0])),
    )


def generate(model: GanModel, n: int, seed: int) -> np.ndarray:
    """``n`` generator samples in eval mode, clamped to the [0, 1] feature box."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return np.empty((0, model.feature_dim))
    rng = np.random.default_rng(seed)
    z = sample_noise(rng, n, model.noise_dim)
    return np.clip(forward(model.generator, z).output, 0.0, 1.0)


def _check_pair(pair: TopologyPair, feature_dim: int, loss_kind: str):
    if pair.g_spec.output_dim != feature_dim or pair.d_spec.input_dim != feature_dim:
        raise ValueError(f"topology expects {pair.g_spec.output_dim} features, data has {feature_dim}")
    if pair.d_spec.output_dim != 1:
        raise ValueError("discriminator must output a single score")
    if loss_kind == "vanilla" and pair.d_spec.output_activation != "sigmoid":
        raise ValueError("vanilla GAN needs a sigmoid discriminator output")


def train_gan(
    minority: np.ndarray,
    pair: TopologyPair,
    config: GanConfig,
    hooks: Sequence[Callable] = (),
) -> tuple[GanModel, TrainTrace]:
    """Train G and D on ``minority`` rows (features already scaled to [0, 1]).

    Each iteration runs ``critic_steps`` D updates (weights clipped after each
    in wasserstein mode) followed by one G update. With dynamic restraint a
    fresh KMMD measurement after the G update sets the dropout rate for G's
    next training-mode passes.

    ``hooks`` are called as ``hook(record, model)`` after every iteration.
    """
    x = np.asarray(minority, dtype=np.float64)
    if x.ndim != 2 or len(x) == 0:
        raise ValueError("minority slice is empty")
    _check_pair(pair, x.shape[1], config.loss_kind)
    n = len(x)
    batch = min(config.batch_size, n)
    wass = config.loss_kind == "wasserstein"
    dynamic = config.restraint == "dynamic"

    # independent streams: the restraint machinery never perturbs the
    # batch/noise stream, so a zero rate reproduces the unrestrained run
    init_ss, main_ss, drop_ss, kmmd_ss = np.random.SeedSequence(config.seed).spawn(4)
    model = init_model(pair, int(init_ss.generate_state(1)[0]))
    rng = np.random.default_rng(main_ss)
    drop_rng = np.random.default_rng(drop_ss)
    kmmd_rng = np.random.default_rng(kmmd_ss)

    G, D = model.generator, model.discriminator
    g_state, d_state = OptState.zeros_like(G, config.rms_decay), OptState.zeros_like(D, config.rms_decay)
    restraint = RestraintState(alpha=config.alpha, lam=config.lam) if dynamic else None
    kcfg = KmmdConfig()
    rate = 0.0
    noise_dim = G.spec.input_dim
    probes = None
    if config.sr_every:
        probes = draw_probes(x, noise_dim, config.sr_probes, seed=int(kmmd_ss.generate_state(2)[1]))
    trace = TrainTrace()

    def g_forward(z):
        seed = int(drop_rng.integers(2**63)) if rate > 0 else 0
        return forward(G, z, dropout_rate=rate, dropout_seed=seed, train_mode=True)

    for it in range(config.iterations):
        for _ in range(config.critic_steps):
            real = x[rng.choice(n, size=batch, replace=False)]
            fake = g_forward(sample_noise(rng, batch, noise_dim)).output
            # one pass over [real; fake] so D's gradient is a single backward
            tr = forward(D, np.vstack([real, fake]))
            s_real, s_fake = tr.output[:batch], tr.output[batch:]
            if wass:
                d_loss = d_loss_wasserstein(s_real, s_fake)
                grad_real = np.full_like(s_real, -1.0 / batch)
                grad_fake = np.full_like(s_fake, 1.0 / batch)
            else:
                d_loss = d_loss_vanilla(s_real, s_fake)
                grad_real = -1.0 / np.maximum(s_real, SCORE_EPS) / batch
                grad_fake = 1.0 / np.maximum(1.0 - s_fake, SCORE_EPS) / batch
            d_grads = backward(D, tr, np.vstack([grad_real, grad_fake]))
            D, d_state = rmsprop_step(D, d_grads, config.lr_d, d_state)
            if wass:
                D = clip_weights(D, config.clip_c)

        g_trace = g_forward(sample_noise(rng, batch, noise_dim))
        d_trace = forward(D, g_trace.output)
        s_fake = d_trace.output
        if wass:
            g_loss = g_loss_wasserstein(s_fake)
            grad = np.full_like(s_fake, -1.0 / batch)
        else:
            g_loss = g_loss_vanilla(s_fake)
            grad = -1.0 / np.maximum(s_fake, SCORE_EPS) / batch
        through_d = backward(D, d_trace, grad).inputs
        G, g_state = rmsprop_step(G, backward(G, g_trace, through_d), config.lr_g, g_state)

        record = IterationRecord(it, d_loss, g_loss)
        if dynamic:
            m = min(config.kmmd_batch, n)
            real = x[kmmd_rng.choice(n, size=m, replace=False)]
            fake = np.clip(forward(G, sample_noise(kmmd_rng, m, noise_dim)).output, 0.0, 1.0)
            raw = kmmd(fake, real, kcfg)
            q, q_star, rate = restraint.observe(raw)
            record.raw_kmmd, record.q, record.q_star, record.dropout_rate = raw, q, q_star, rate
        if probes is not None and (it + 1) % config.sr_every == 0:
            record.sr = sr(G, D, pair.layer_matching, probes)
        trace.records.append(record)
        if hooks:
            snapshot = GanModel(G, D)
            for hook in hooks:
                hook(record, snapshot)

    return GanModel(G, D), trace


def measure_sr(model: GanModel, pair: TopologyPair, real: np.ndarray, k: int = 128, seed: int = 0) -> float:
    probes = draw_probes(real, model.noise_dim, k, seed)
    return sr(model.generator, model.discriminator, pair.layer_matching, probes)
