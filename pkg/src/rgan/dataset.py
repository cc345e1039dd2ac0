"""Labelled numeric datasets: CSV ingestion, [0, 1] scaling and stratified folds."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
import yaml

COLUMN_TYPES = ("numeric", "categorical")
CATEGORICAL_POLICIES = ("ordinal",)


class SchemaError(ValueError):
    pass


@dataclass
class LabeledDataset:
    """Feature matrix with binary labels (1 = positive/minority class of interest).

    ``row_ids`` tracks where every row came from: original rows keep their
    index in the source file, synthetic rows carry -1.
    """

    features: np.ndarray
    labels: np.ndarray
    feature_names: list = field(default_factory=list)
    row_ids: Optional[np.ndarray] = None
    bounds: Optional[tuple] = None  # (min, max) per column before scaling
    name: str = ""

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64).ravel()
        if self.features.ndim != 2 or len(self.features) != len(self.labels):
            raise ValueError("features must be (n, d) with one label per row")
        if not np.isin(self.labels, (0, 1)).all():
            raise ValueError("labels must be 0/1")
        if self.row_ids is None:
            self.row_ids = np.arange(len(self.labels))
        self.row_ids = np.asarray(self.row_ids, dtype=np.int64)
        if not self.feature_names:
            self.feature_names = [f"x{i}" for i in range(self.n_features)]

    def __len__(self):
        return len(self.labels)

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def class_counts(self) -> dict:
        return {c: int((self.labels == c).sum()) for c in (0, 1)}

    @property
    def minority_label(self) -> int:
        counts = self.class_counts
        return 1 if counts[1] <= counts[0] else 0

    @property
    def majority_label(self) -> int:
        return 1 - self.minority_label

    def rows_of(self, label: int) -> np.ndarray:
        return self.features[self.labels == label]

    def subset(self, idx) -> "LabeledDataset":
        idx = np.asarray(idx, dtype=np.int64)
        return LabeledDataset(self.features[idx], self.labels[idx], list(self.feature_names),
                              self.row_ids[idx], self.bounds, self.name)

    def with_rows(self, X: np.ndarray, label: int) -> "LabeledDataset":
        """Copy with synthetic rows appended after the originals."""
        X = np.asarray(X, dtype=np.float64).reshape(-1, self.n_features)
        return LabeledDataset(
            np.vstack([self.features, X]),
            np.concatenate([self.labels, np.full(len(X), label)]),
            list(self.feature_names),
            np.concatenate([self.row_ids, np.full(len(X), -1)]),
            self.bounds,
            self.name,
        )

    def denormalize(self, X: np.ndarray) -> np.ndarray:
        lo, hi = self.bounds
        return np.asarray(X) * (hi - lo) + lo


@dataclass
class Schema:
    name: str
    path: Path
    label: str
    positive: str
    column_types: dict = field(default_factory=dict)  # column -> numeric|categorical
    categorical_policy: str = "ordinal"
    expected_shape: Optional[tuple] = None
    delimiter: str = ","

    @classmethod
    def from_yaml(cls, path) -> "Schema":
        path = Path(path)
        raw = yaml.safe_load(path.read_text()) or {}
        return cls.from_dict(raw, base=path.parent)

    @classmethod
    def from_dict(cls, raw: dict, base=Path(".")) -> "Schema":
        for key in ("path", "label", "positive"):
            if key not in raw:
                raise SchemaError(f"schema is missing {key!r}")
        types = dict(raw.get("columns") or {})
        for col, kind in types.items():
            if kind not in COLUMN_TYPES:
                raise SchemaError(f"column {col!r}: unknown type {kind!r}")
        policy = raw.get("categorical_policy", "ordinal")
        if policy not in CATEGORICAL_POLICIES:
            raise SchemaError(f"unknown categorical policy {policy!r}")
        shape = raw.get("expected_shape")
        data_path = Path(raw["path"])
        if not data_path.is_absolute():
            data_path = Path(base) / data_path
        return cls(
            name=raw.get("name", data_path.stem),
            path=data_path,
            label=str(raw["label"]),
            positive=str(raw["positive"]),
            column_types=types,
            categorical_policy=policy,
            expected_shape=tuple(shape) if shape else None,
            delimiter=raw.get("delimiter", ","),
        )


def minmax_scale(X: np.ndarray) -> tuple[np.ndarray, tuple]:
    lo, hi = X.min(axis=0), X.max(axis=0)
    span = hi - lo
    out = np.zeros_like(X)
    live = span > 0
    out[:, live] = (X[:, live] - lo[live]) / span[live]
    return out, (lo, hi)


def _ordinal(values: list) -> np.ndarray:
    codes: dict = {}
    return np.array([codes.setdefault(v, len(codes)) for v in values], dtype=np.float64)


def load_csv(path=None, schema: Optional[Schema] = None) -> LabeledDataset:
    """Read a headed CSV described by ``schema`` into a scaled :class:`LabeledDataset`.

    Categorical columns are coded 0, 1, 2, ... in order of first appearance;
    every feature column is then min-max scaled to [0, 1] (constant columns
    map to 0). Rows whose label equals ``schema.positive`` get label 1.
    """
    if schema is None:
        raise SchemaError("a schema is required")
    path = Path(path) if path is not None else schema.path
    if not path.exists():
        raise FileNotFoundError(path)
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh, delimiter=schema.delimiter) if r and any(c.strip() for c in r)]
    if not rows:
        raise SchemaError(f"{path} is empty")
    header = [h.strip() for h in rows[0]]
    body = rows[1:]
    if schema.label not in header:
        raise SchemaError(f"label column {schema.label!r} not in {path}")
    unknown = set(schema.column_types) - set(header)
    if unknown:
        raise SchemaError(f"schema names columns missing from the file: {sorted(unknown)}")
    for i, r in enumerate(body, start=2):
        if len(r) != len(header):
            raise SchemaError(f"{path}:{i}: expected {len(header)} fields, got {len(r)}")

    label_idx = header.index(schema.label)
    names = [h for h in header if h != schema.label]
    cols = []
    for name in names:
        j = header.index(name)
        values = [r[j].strip() for r in body]
        if schema.column_types.get(name, "numeric") == "categorical":
            cols.append(_ordinal(values))
        else:
            try:
                cols.append(np.array([float(v) for v in values]))
            except ValueError as exc:
                raise SchemaError(f"column {name!r} is not numeric: {exc}") from None
    X = np.column_stack(cols) if cols else np.empty((len(body), 0))
    y = np.array([int(r[label_idx].strip() == schema.positive) for r in body])
    if not 0 < y.sum() < len(y):
        raise SchemaError(f"label {schema.positive!r} does not split {path} into two classes")
    if schema.expected_shape and X.shape != tuple(schema.expected_shape):
        raise SchemaError(f"{path}: shape {X.shape} does not match expected {tuple(schema.expected_shape)}")
    X, bounds = minmax_scale(X)
    return LabeledDataset(X, y, names, np.arange(len(y)), bounds, schema.name)


def load_dataset(schema_path) -> LabeledDataset:
    schema = Schema.from_yaml(schema_path)
    return load_csv(schema.path, schema)


def kfold_split(ds: LabeledDataset, K: int = 10, seed: int = 0) -> list:
    """Stratified K-fold partition as a list of ``(train_idx, test_idx)``.

    Each class is shuffled, the classes are laid end to end, and position i
    goes to fold ``i mod K``. Per-class fold counts then differ by at most one
    and fold sizes differ by at most one overall.
    """
    if K < 2:
        raise ValueError("K must be >= 2")
    counts = ds.class_counts
    if min(counts.values()) < K:
        raise ValueError(f"smallest class has {min(counts.values())} rows, fewer than K={K}")
    rng = np.random.default_rng(seed)
    order = np.concatenate([rng.permutation(np.flatnonzero(ds.labels == c)) for c in (0, 1)])
    fold_of = np.empty(len(ds), dtype=np.int64)
    fold_of[order] = np.arange(len(order)) % K
    all_idx = np.arange(len(ds))
    return [(all_idx[fold_of != k], all_idx[fold_of == k]) for k in range(K)]
