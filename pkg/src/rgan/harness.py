"""Cross-validated augmentation experiments.

The unit of work is one (dataset, seed, fold, method): the method's
augmentation is applied to the training fold only (training a GAN on the
fold's minority rows when needed), every requested classifier is fitted on
the augmented fold, and each is scored on the untouched test fold.
"""

from __future__ import annotations

import hashlib
import json
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np
import yaml

from . import classifiers
from .augment import AugmentPlan, apply_plan
from .dataset import LabeledDataset, load_dataset, kfold_split
from .gan import GanConfig, measure_sr, train_gan
from .topology import METHOD_PATTERNS, TopologyPair, TopologyPattern, make_pair, scale_generator

METHODS = ("original", "smote", "gan", "wgan", "awgan", "swgan", "aswgan", "iwgan", "wgan_star")
STATIC_METHODS = ("iwgan", "awgan", "swgan", "aswgan")
GAN_METHODS = ("gan", "wgan", *STATIC_METHODS, "wgan_star")

# ranking merges the static variants into one family
FAMILIES = {**{m: "SRGAN" for m in STATIC_METHODS}, "wgan_star": "DRGAN"}
RESTRAINED_FAMILIES = ("SRGAN", "DRGAN")


def derive_seed(*parts) -> int:
    """Stable 32-bit seed from a tuple of ints/strings (crc32 for strings)."""
    words = [p if isinstance(p, int) else zlib.crc32(str(p).encode()) for p in parts]
    return int(np.random.SeedSequence(words).generate_state(1)[0])


@dataclass
class ExperimentConfig:
    datasets: list
    methods: list = field(default_factory=lambda: ["original"])
    classifiers: list = field(default_factory=lambda: ["rfc"])
    folds: int = 10
    seeds: list = field(default_factory=lambda: [0])
    gan: dict = field(default_factory=dict)  # GanConfig overrides shared by every GAN method
    wgan_star: dict = field(default_factory=lambda: {"alpha": 0.2, "lam": 0.3})
    base_hidden: list = field(default_factory=lambda: [64, 32])
    wgan_d_hidden: list = field(default_factory=lambda: [128])
    target_ratio: float = 1.0
    classifier_params: dict = field(default_factory=dict)
    lambda_grid: list = field(default_factory=lambda: [0.1, 0.2, 0.3, 0.4, 0.5, 0.6])
    scale_factors: list = field(default_factory=lambda: [0.5, 1.0, 2.0])
    sr_probes: int = 128
    save_traces: bool = False
    out: str = "results"
    jobs: int = 1

    def __post_init__(self):
        self.datasets = [str(d) for d in self.datasets]
        if not self.datasets:
            raise ValueError("config needs at least one dataset")
        if self.folds < 2:
            raise ValueError("folds must be >= 2")
        if not self.methods or not self.classifiers or not self.seeds:
            raise ValueError("methods, classifiers and seeds must be nonempty")
        bad = [m for m in self.methods if m not in METHODS]
        if bad:
            raise ValueError(f"unknown methods {bad}; expected a subset of {METHODS}")
        bad = [c for c in self.classifiers if c not in classifiers.KINDS]
        if bad:
            raise ValueError(f"unknown classifiers {bad}; expected a subset of {classifiers.KINDS}")
        unknown = set(self.gan) - set(GanConfig.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown gan settings: {sorted(unknown)}")
        GanConfig(**self.gan)  # fail early on bad values

    @classmethod
    def from_dict(cls, raw: dict, base: Optional[Path] = None) -> "ExperimentConfig":
        raw = dict(raw)
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        if base is not None and "datasets" in raw:
            raw["datasets"] = [str(p if Path(p).is_absolute() else Path(base) / p) for p in raw["datasets"]]
        return cls(**raw)

    @classmethod
    def from_yaml(cls, path) -> "ExperimentConfig":
        path = Path(path)
        return cls.from_dict(yaml.safe_load(path.read_text()) or {}, base=path.parent)

    def config_hash(self) -> str:
        d = asdict(self)
        d.pop("out")
        d.pop("jobs")
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()[:16]


@dataclass(frozen=True)
class MethodSpec:
    """How one table row augments a training fold."""

    label: str
    augment: str = "none"  # none | smote | gan
    loss_kind: str = "wasserstein"
    pattern: Optional[TopologyPattern] = None  # None: the plain WGAN pair
    pair: Optional[TopologyPair] = None  # explicit pair overrides ``pattern``
    restraint: str = "none"
    gan_overrides: tuple = ()  # extra GanConfig fields as (key, value) pairs
    g_scale: float = 1.0
    measure_sr: bool = False

    def build_pair(self, cfg: ExperimentConfig, feature_dim: int) -> TopologyPair:
        if self.pair is not None:
            if self.pair.feature_dim != feature_dim:
                raise ValueError(f"pair {self.pair.name!r} expects {self.pair.feature_dim} features, data has {feature_dim}")
            pair = self.pair
        elif self.loss_kind == "vanilla":
            pair = make_pair(TopologyPattern("isomorphic"), cfg.base_hidden, feature_dim,
                             d_output="sigmoid", name=self.label)
        elif self.pattern is None:
            pair = make_pair(TopologyPattern.custom(cfg.base_hidden, cfg.wgan_d_hidden), cfg.base_hidden,
                             feature_dim, name=self.label)
        else:
            pair = make_pair(self.pattern, cfg.base_hidden, feature_dim, name=self.label)
        return scale_generator(pair, self.g_scale) if self.g_scale != 1.0 else pair


def method_spec(method: str, cfg: ExperimentConfig) -> MethodSpec:
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    if method == "original":
        return MethodSpec(method)
    if method == "smote":
        return MethodSpec(method, augment="smote")
    if method == "gan":
        return MethodSpec(method, augment="gan", loss_kind="vanilla")
    if method == "wgan":
        return MethodSpec(method, augment="gan")
    if method == "wgan_star":
        return MethodSpec(method, augment="gan", restraint="dynamic",
                          gan_overrides=tuple(sorted(cfg.wgan_star.items())))
    return MethodSpec(method, augment="gan", pattern=TopologyPattern(METHOD_PATTERNS[method]), restraint="static")


class LeakageError(AssertionError):
    pass


def check_disjoint(stage: str, used_ids: np.ndarray, test_ids: np.ndarray) -> None:
    used = np.asarray(used_ids)
    used = used[used >= 0]  # synthetic rows carry -1
    hit = np.intersect1d(used, test_ids)
    if hit.size:
        raise LeakageError(f"{stage}: {hit.size} test-fold rows reached training (e.g. {hit[:5].tolist()})")


@dataclass
class RecordingGuard:
    """Leakage guard that also keeps a log of every check it performed."""

    calls: list = field(default_factory=list)

    def __call__(self, stage, key, used_ids, test_ids):
        used = np.asarray(used_ids)
        overlap = int(np.intersect1d(used[used >= 0], test_ids).size)
        self.calls.append((stage, key, len(used), overlap))
        check_disjoint(stage, used_ids, test_ids)


def default_guard(stage, key, used_ids, test_ids):
    check_disjoint(f"{stage} {key}", used_ids, test_ids)


@dataclass
class UnitResult:
    key: tuple  # (dataset, seed, fold, method label)
    aucs: dict  # classifier -> AUC
    sr: Optional[float] = None
    n_synthetic: int = 0


def run_unit(cfg: ExperimentConfig, ds: LabeledDataset, seed: int, fold: int, train_idx, test_idx,
             spec: MethodSpec, guard: Callable = default_guard, trace_dir: Optional[Path] = None) -> UnitResult:
    key = (ds.name, seed, fold, spec.label)
    train = ds.subset(train_idx)
    test_ids = ds.row_ids[np.asarray(test_idx)]
    aug_seed = derive_seed(seed, ds.name, fold, "augment")
    sr_value = None

    if spec.augment == "gan":
        mino = train.minority_label
        guard("gan-training", key, train.row_ids[train.labels == mino], test_ids)
        pair = spec.build_pair(cfg, ds.n_features)
        overrides = {**cfg.gan, **dict(spec.gan_overrides)}
        gcfg = GanConfig(**{**overrides, "loss_kind": spec.loss_kind, "restraint": spec.restraint,
                            "seed": derive_seed(seed, ds.name, fold, "gan")})
        model, trace = train_gan(train.rows_of(mino), pair, gcfg)
        if trace_dir is not None:
            trace.to_csv(trace_dir / f"{ds.name}_{spec.label}_s{seed}_f{fold}.csv")
        if spec.measure_sr:
            sr_value = measure_sr(model, pair, train.rows_of(mino), cfg.sr_probes,
                                  seed=derive_seed(seed, ds.name, fold, "probes"))
        plan = AugmentPlan("gan", model, cfg.target_ratio, aug_seed)
    elif spec.augment == "smote":
        plan = AugmentPlan("smote", None, cfg.target_ratio, aug_seed)
    else:
        plan = AugmentPlan("none")

    guard("augmentation", key, train.row_ids, test_ids)
    augmented = apply_plan(train, plan)
    X_test, y_test = ds.features[test_idx], ds.labels[test_idx]
    aucs = {}
    for kind in cfg.classifiers:
        clf = classifiers.fit(kind, augmented, seed=derive_seed(seed, ds.name, fold, kind),
                              **cfg.classifier_params.get(kind, {}))
        aucs[kind] = classifiers.auc(classifiers.predict_scores(clf, X_test), y_test)
    return UnitResult(key, aucs, sr_value, len(augmented) - len(train))


@dataclass
class Cell:
    mean: float
    std: float
    n: int
    values: dict = field(default_factory=dict)  # (seed, fold) -> AUC

    @classmethod
    def from_values(cls, values: dict) -> "Cell":
        arr = np.array([values[k] for k in sorted(values)])
        return cls(float(arr.mean()), float(arr.std()), len(arr), dict(values))

    def seed_mean(self, seed) -> float:
        vals = [v for (s, _), v in sorted(self.values.items()) if s == seed]
        if not vals:
            raise KeyError(f"no values for seed {seed}")
        return float(np.mean(vals))


@dataclass
class ResultTable:
    """AUC cells keyed by (dataset, classifier, method); std is over folds x seeds."""

    cells: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)  # e.g. SR per (dataset, method, seed, fold)

    def __getitem__(self, key) -> Cell:
        return self.cells[key]

    def __len__(self):
        return len(self.cells)

    @property
    def datasets(self) -> list:
        return _ordered(k[0] for k in self.cells)

    @property
    def classifiers(self) -> list:
        return _ordered(k[1] for k in self.cells)

    @property
    def methods(self) -> list:
        return _ordered(k[2] for k in self.cells)


def _ordered(items) -> list:
    return list(dict.fromkeys(items))


def _plan_units(cfg: ExperimentConfig, datasets: dict, specs: Sequence[MethodSpec]) -> list:
    units = []
    for name, ds in datasets.items():
        for seed in cfg.seeds:
            splits = kfold_split(ds, cfg.folds, derive_seed(seed, name, "folds"))
            for fold, (tr, te) in enumerate(splits):
                for spec in specs:
                    units.append((name, seed, fold, tr, te, spec))
    return units


def _load(cfg: ExperimentConfig) -> dict:
    out = {}
    for path in cfg.datasets:
        ds = load_dataset(path)
        if ds.name in out:
            raise ValueError(f"dataset name {ds.name!r} appears twice")
        out[ds.name] = ds
    return out


def _execute(cfg, datasets, units, guard, trace_dir):
    def args(u):
        name, seed, fold, tr, te, spec = u
        return (cfg, datasets[name], seed, fold, tr, te, spec, guard, trace_dir)

    if cfg.jobs > 1 and len(units) > 1:
        # results are merged by key, so completion order does not matter
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            futures = [pool.submit(run_unit, *args(u)) for u in units]
            return [f.result() for f in futures]
    results = []
    for u in units:
        try:
            results.append(run_unit(*args(u)))
        except LeakageError:
            raise
        except Exception as exc:
            raise RuntimeError(f"unit {u[:3] + (u[5].label,)} failed: {exc}") from exc
    return results


def run_specs(cfg: ExperimentConfig, specs: Sequence[MethodSpec], guard: Optional[Callable] = None,
              datasets: Optional[dict] = None) -> ResultTable:
    """Run every (dataset, seed, fold, spec) unit and aggregate into a table."""
    labels = [s.label for s in specs]
    if len(set(labels)) != len(labels):
        raise ValueError(f"duplicate method labels in {labels}")
    datasets = datasets if datasets is not None else _load(cfg)
    trace_dir = None
    if cfg.save_traces:
        trace_dir = Path(cfg.out) / "traces"
        trace_dir.mkdir(parents=True, exist_ok=True)
    units = _plan_units(cfg, datasets, specs)
    results = _execute(cfg, datasets, units, guard or default_guard, trace_dir)

    collected: dict = {}
    srs: dict = {}
    for r in results:
        name, seed, fold, label = r.key
        for kind, value in r.aucs.items():
            collected.setdefault((name, kind, label), {})[(seed, fold)] = value
        if r.sr is not None:
            srs[(name, label, seed, fold)] = r.sr
    cells = {}
    for name in datasets:
        for kind in cfg.classifiers:
            for label in labels:
                cells[(name, kind, label)] = Cell.from_values(collected[(name, kind, label)])
    provenance = {"config_hash": cfg.config_hash(), "seeds": list(cfg.seeds), "folds": cfg.folds}
    return ResultTable(cells, provenance, {"sr": srs} if srs else {})


def run_experiment(cfg: ExperimentConfig, guard: Optional[Callable] = None) -> ResultTable:
    return run_specs(cfg, [method_spec(m, cfg) for m in cfg.methods], guard)


@dataclass
class Ranking:
    best: str
    second: Optional[str]
    order: list  # families by descending mean AUC


@dataclass
class RankingTable:
    groups: dict  # (dataset, classifier) -> Ranking
    best_counts: dict
    top2_counts: dict

    @property
    def restrained_best(self) -> int:
        return sum(self.best_counts.get(f, 0) for f in RESTRAINED_FAMILIES)

    @property
    def restrained_top2(self) -> int:
        return sum(1 for r in self.groups.values()
                   if r.best in RESTRAINED_FAMILIES or r.second in RESTRAINED_FAMILIES)


def family(method: str) -> str:
    return FAMILIES.get(method, method)


def rank_methods(rt: ResultTable) -> RankingTable:
    """Best and second-best family per (dataset, classifier).

    Methods sort by mean AUC descending, then std ascending, then name; the
    static topologies share one family, represented by its best member.
    """
    groups = {}
    for ds in rt.datasets:
        for clf in rt.classifiers:
            entries = [(m, rt.cells[(ds, clf, m)]) for m in rt.methods if (ds, clf, m) in rt.cells]
            if not entries:
                continue
            entries.sort(key=lambda e: (-e[1].mean, e[1].std, e[0]))
            order = _ordered(family(m) for m, _ in entries)
            groups[(ds, clf)] = Ranking(order[0], order[1] if len(order) > 1 else None, order)
    best_counts: dict = {}
    top2_counts: dict = {}
    for r in groups.values():
        best_counts[r.best] = best_counts.get(r.best, 0) + 1
        for f in r.order[:2]:
            top2_counts[f] = top2_counts.get(f, 0) + 1
    return RankingTable(groups, best_counts, top2_counts)
