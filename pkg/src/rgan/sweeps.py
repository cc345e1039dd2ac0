"""Analysis sweeps built on the experiment harness."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.stats import spearmanr

from .harness import ExperimentConfig, MethodSpec, ResultTable, method_spec, run_specs
from .topology import TopologyPair, TopologyPattern


def spearman(x: Sequence[float], y: Sequence[float]) -> Optional[float]:
    """Rank correlation; ``None`` below two points, 0.0 when either side is constant."""
    x, y = np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64)
    if len(x) < 2:
        return None
    if np.all(x == x[0]) or np.all(y == y[0]):
        return 0.0
    return float(spearmanr(x, y)[0])


DEFAULT_SR_PAIRS = (
    TopologyPattern("isomorphic"),
    TopologyPattern("axisymmetric"),
    TopologyPattern("self_symmetric"),
    TopologyPattern("axi_and_self_symmetric"),
    TopologyPattern.custom([64, 32], [128]),
    TopologyPattern.custom([64, 32], [16, 128]),
)


@dataclass
class SrPoint:
    name: str
    sr: float
    auc: dict  # classifier -> mean AUC
    sr_by_seed: dict = field(default_factory=dict)
    auc_by_seed: dict = field(default_factory=dict)  # classifier -> {seed: mean AUC}


@dataclass
class SrSweep:
    points: list
    correlation: dict  # classifier -> Spearman over pooled points (None if undefined)
    per_seed: dict  # classifier -> {seed: Spearman}


def _pair_label(i, p) -> str:
    if isinstance(p, TopologyPair):
        return p.name or f"pair{i}"
    if p.kind == "custom":
        g = "-".join(map(str, p.g_hidden))
        d = "-".join(map(str, p.d_hidden))
        return f"g{g}_d{d}"
    return p.kind


def sr_sweep(cfg: ExperimentConfig, pairs: Sequence = DEFAULT_SR_PAIRS) -> SrSweep:
    """Train a WGAN per topology pair, record SR of the trained pair and the augmented AUC.

    ``pairs`` holds :class:`TopologyPattern` (built per dataset) or ready
    :class:`TopologyPair` objects; SR is averaged over folds.
    """
    specs = []
    for i, p in enumerate(pairs):
        label = _pair_label(i, p)
        if isinstance(p, TopologyPair):
            specs.append(MethodSpec(label, augment="gan", pair=p, restraint="static", measure_sr=True))
        else:
            specs.append(MethodSpec(label, augment="gan", pattern=p, restraint="static", measure_sr=True))
    rt = run_specs(cfg, specs)
    srs = rt.extras.get("sr", {})
    points = []
    for ds in rt.datasets:
        for spec in specs:
            sr_by_seed = {s: float(np.mean([v for (d, m, s2, _), v in srs.items()
                                            if d == ds and m == spec.label and s2 == s]))
                          for s in cfg.seeds}
            auc = {c: rt[(ds, c, spec.label)].mean for c in cfg.classifiers}
            auc_by_seed = {c: {s: rt[(ds, c, spec.label)].seed_mean(s) for s in cfg.seeds} for c in cfg.classifiers}
            points.append(SrPoint(spec.label if len(rt.datasets) == 1 else f"{ds}:{spec.label}",
                                  float(np.mean(list(sr_by_seed.values()))), auc, sr_by_seed, auc_by_seed))
    correlation = {c: spearman([p.sr for p in points], [p.auc[c] for p in points]) for c in cfg.classifiers}
    per_seed = {c: {s: spearman([p.sr_by_seed[s] for p in points], [p.auc_by_seed[c][s] for p in points])
                    for s in cfg.seeds} for c in cfg.classifiers}
    return SrSweep(points, correlation, per_seed)


@dataclass
class LambdaCurve:
    alpha: float
    lambdas: list
    table: ResultTable  # methods labelled ``lam=<value>``

    def label(self, lam) -> str:
        return f"lam={lam:g}"

    def curve(self, dataset: str, classifier: str, seed=None) -> list:
        """(lambda, AUC) points; mean over folds and seeds, or folds only for ``seed``."""
        out = []
        for lam in self.lambdas:
            cell = self.table[(dataset, classifier, self.label(lam))]
            out.append((lam, cell.mean if seed is None else cell.seed_mean(seed)))
        return out


def lambda_sweep(cfg: ExperimentConfig, lambdas: Optional[Sequence[float]] = None,
                 alpha: Optional[float] = None) -> LambdaCurve:
    """Dynamic-restraint WGAN at each lambda with alpha fixed."""
    lambdas = list(cfg.lambda_grid if lambdas is None else lambdas)
    alpha = cfg.wgan_star.get("alpha", 0.2) if alpha is None else alpha
    base = method_spec("wgan_star", cfg)
    specs = []
    for lam in lambdas:
        over = {**dict(base.gan_overrides), "alpha": alpha, "lam": lam}
        specs.append(MethodSpec(f"lam={lam:g}", augment="gan", restraint="dynamic",
                                gan_overrides=tuple(sorted(over.items()))))
    return LambdaCurve(alpha, lambdas, run_specs(cfg, specs))


def dof_sweep(cfg: ExperimentConfig, factors: Optional[Sequence[float]] = None,
              methods: Sequence[str] = ("gan", "wgan")) -> ResultTable:
    """Unrestrained GAN/WGAN with G's hidden widths scaled; D keeps its size.

    Rows are labelled ``<method>@x<factor>``.
    """
    factors = list(cfg.scale_factors if factors is None else factors)
    specs = []
    for m in methods:
        if m not in ("gan", "wgan"):
            raise ValueError("the width sweep covers the unrestrained gan and wgan rows only")
        base = method_spec(m, cfg)
        for f in factors:
            if f <= 0:
                raise ValueError("scale factors must be positive")
            specs.append(MethodSpec(f"{m}@x{f:g}", augment="gan", loss_kind=base.loss_kind, g_scale=float(f)))
    return run_specs(cfg, specs)
