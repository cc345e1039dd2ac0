"""Command line entry point: ``rgan <subcommand> --config cfg.yaml``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import report as rep
from .augment import AugmentPlan, apply_plan
from .dataset import load_dataset
from .gan import GanConfig, generate, train_gan
from .harness import (GAN_METHODS, METHODS, ExperimentConfig, derive_seed, method_spec, rank_methods,
                      run_experiment)
from .sweeps import dof_sweep, lambda_sweep, sr_sweep

log = logging.getLogger("rgan")


def _config(args) -> ExperimentConfig:
    cfg = ExperimentConfig.from_yaml(args.config)
    if args.seed is not None:
        cfg = replace(cfg, seeds=[args.seed])
    if args.out is not None:
        cfg = replace(cfg, out=args.out)
    if args.jobs is not None:
        cfg = replace(cfg, jobs=args.jobs)
    return cfg


def _out(cfg) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _pick_dataset(cfg, name):
    if name is None:
        return load_dataset(cfg.datasets[0])
    for path in cfg.datasets:
        ds = load_dataset(path)
        if ds.name == name:
            return ds
    raise SystemExit(f"dataset {name!r} is not in the config")


def cmd_experiment(args):
    cfg = _config(args)
    out = _out(cfg)
    rt = run_experiment(cfg)
    rk = rank_methods(rt)
    for fmt in rep.FORMATS:
        rep.report(rt, out, fmt)
        rep.report(rk, out, fmt)
    (out / "provenance.json").write_text(json.dumps(rt.provenance, indent=2))
    print(rep.table_markdown(rt))
    print(rep.ranking_markdown(rk))


def _write_matrix(path, names, X, y):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([*names, "label"])
        for row, label in zip(X, y):
            w.writerow([repr(float(v)) for v in row] + [int(label)])


def _train_method_gan(cfg, ds, method, seed):
    spec = method_spec(method, cfg)
    pair = spec.build_pair(cfg, ds.n_features)
    gcfg = GanConfig(**{**cfg.gan, **dict(spec.gan_overrides), "loss_kind": spec.loss_kind,
                        "restraint": spec.restraint, "seed": derive_seed(seed, ds.name, "cli", "gan")})
    return train_gan(ds.rows_of(ds.minority_label), pair, gcfg)


def cmd_augment(args):
    cfg = _config(args)
    out = _out(cfg)
    ds = _pick_dataset(cfg, args.dataset)
    seed = cfg.seeds[0]
    aug_seed = derive_seed(seed, ds.name, "cli", "augment")
    if args.method == "original":
        plan = AugmentPlan("none")
    elif args.method == "smote":
        plan = AugmentPlan("smote", None, cfg.target_ratio, aug_seed)
    else:
        model, _ = _train_method_gan(cfg, ds, args.method, seed)
        plan = AugmentPlan("gan", model, cfg.target_ratio, aug_seed)
    aug = apply_plan(ds, plan)
    path = out / f"{ds.name}_{args.method}_augmented.csv"
    _write_matrix(path, ds.feature_names, aug.features, aug.labels)
    print(f"{len(aug) - len(ds)} synthetic rows appended; wrote {path}")


def cmd_train_gan(args):
    cfg = _config(args)
    out = _out(cfg)
    ds = _pick_dataset(cfg, args.dataset)
    model, trace = _train_method_gan(cfg, ds, args.method, cfg.seeds[0])
    trace_path = out / f"{ds.name}_{args.method}_trace.csv"
    trace.to_csv(trace_path)
    sample = generate(model, args.samples, derive_seed(cfg.seeds[0], ds.name, "cli", "sample"))
    sample_path = out / f"{ds.name}_{args.method}_samples.csv"
    _write_matrix(sample_path, ds.feature_names, sample, np.full(len(sample), ds.minority_label))
    print(f"wrote {trace_path} and {sample_path}")


def cmd_sweep_sr(args):
    cfg = _config(args)
    sweep = sr_sweep(cfg)
    paths = rep.report(sweep, _out(cfg), stem="sweep")
    for p in sweep.points:
        print(f"{p.name:24s} SR={p.sr:.4f} " + " ".join(f"{c}={v:.4f}" for c, v in p.auc.items()))
    print("spearman:", sweep.correlation)
    print("wrote", *paths)


def cmd_sweep_lambda(args):
    cfg = _config(args)
    curve = lambda_sweep(cfg)
    paths = rep.report(curve, _out(cfg), fmt="markdown", stem="sweep")
    print(rep.table_markdown(curve.table))
    print("wrote", *paths)


def cmd_sweep_dof(args):
    cfg = _config(args)
    rt = dof_sweep(cfg)
    out = _out(cfg)
    paths = rep.report(rt, out, "csv", stem="dof") + rep.report(rt, out, "markdown", stem="dof")
    print(rep.table_markdown(rt))
    print("wrote", *paths)


def cmd_report(args):
    rt = rep.read_table_csv(args.input)
    out = Path(args.out or Path(args.input).parent)
    paths = rep.report(rt, out, args.format, stem=Path(args.input).stem + "_report")
    if rt.cells:
        paths += rep.report(rank_methods(rt), out, args.format, stem=Path(args.input).stem + "_report")
    print("wrote", *paths)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="experiment YAML")
    common.add_argument("--seed", type=int, default=None, help="run a single master seed")
    common.add_argument("--out", default=None, help="output directory")
    common.add_argument("--jobs", type=int, default=None, help="parallel worker processes")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="rgan", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("experiment", parents=[common], help="full CV grid").set_defaults(func=cmd_experiment)

    a = sub.add_parser("augment", parents=[common], help="augment a whole dataset and write it out")
    a.add_argument("--method", choices=METHODS, default="smote")
    a.add_argument("--dataset", default=None, help="dataset name (default: first in config)")
    a.set_defaults(func=cmd_augment)

    t = sub.add_parser("train-gan", parents=[common], help="train one GAN on a dataset's minority rows")
    t.add_argument("--method", choices=GAN_METHODS, default="wgan")
    t.add_argument("--dataset", default=None)
    t.add_argument("--samples", type=int, default=100)
    t.set_defaults(func=cmd_train_gan)

    sub.add_parser("sweep-sr", parents=[common]).set_defaults(func=cmd_sweep_sr)
    sub.add_parser("sweep-lambda", parents=[common]).set_defaults(func=cmd_sweep_lambda)
    sub.add_parser("sweep-dof", parents=[common]).set_defaults(func=cmd_sweep_dof)

    r = sub.add_parser("report", parents=[common], help="re-render a results CSV")
    r.add_argument("--input", required=True)
    r.add_argument("--format", choices=rep.FORMATS, default="markdown")
    r.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if args.command != "report" and not args.config:
        print("error: --config is required", file=sys.stderr)
        return 2
    try:
        args.func(args)
    except Exception as exc:  # any failing cell aborts with a nonzero code
        log.debug("failure", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
