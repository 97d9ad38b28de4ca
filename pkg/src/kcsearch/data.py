"""Tabular CSV ingestion for binary classification.

Columns are declared by a schema (a JSON list of ``{name, kind, categories}``
objects, kind one of numeric / categorical / drop / label). Categorical
columns are label-encoded to integers rather than one-hot encoded, so the
feature width equals the number of kept columns.
"""

from __future__ import annotations

import json
import logging
import warnings
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np
import pandas as pd

log = logging.getLogger(__name__)

KINDS = ("numeric", "categorical", "drop", "label")
MISSING = frozenset({"", "NA", "N/A", "NaN", "nan", "?", "null", "None"})


class DataError(ValueError):
    pass


@dataclass(frozen=True)
class ColumnSchema:
    name: str
    kind: str
    categories: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DataError(f"column {self.name!r}: unknown kind {self.kind!r}")
        if self.categories is not None:
            object.__setattr__(self, "categories", tuple(str(c) for c in self.categories))

    def as_dict(self) -> dict:
        out = {"name": self.name, "kind": self.kind}
        if self.categories is not None:
            out["categories"] = list(self.categories)
        return out


def _check_schema(schema: list[ColumnSchema]):
    labels = [c.name for c in schema if c.kind == "label"]
    if len(labels) != 1:
        raise DataError(f"schema needs exactly one label column, found {len(labels)}")
    names = [c.name for c in schema]
    if len(set(names)) != len(names):
        raise DataError("duplicate column names in schema")


def load_schema(path) -> list[ColumnSchema]:
    with open(path, encoding="utf-8") as fh:
        entries = json.load(fh)
    schema = [ColumnSchema(e["name"], e["kind"], e.get("categories")) for e in entries]
    _check_schema(schema)
    return schema


def save_schema(schema: list[ColumnSchema], path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump([c.as_dict() for c in schema], fh, indent=2)
        fh.write("\n")


def bundled_schema(name: str) -> list[ColumnSchema]:
    """Schemas shipped with the package, e.g. ``bundled_schema("titanic")``."""
    ref = resources.files("kcsearch") / "schemas" / f"{name}.json"
    if not ref.is_file():
        raise DataError(f"no bundled schema named {name!r}")
    with resources.as_file(ref) as p:
        return load_schema(p)


def _read_strings(path) -> pd.DataFrame:
    return pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")


def _is_missing(series: pd.Series) -> np.ndarray:
    return series.str.strip().isin(MISSING).to_numpy()


def infer_schema(path, label: str, drop=()) -> list[ColumnSchema]:
    """Guess numeric/categorical kinds from the values of a CSV file."""
    df = _read_strings(path)
    if label not in df.columns:
        raise DataError(f"label column {label!r} not found in {path}")
    schema = []
    for name in df.columns:
        if name == label:
            kind = "label"
        elif name in drop:
            kind = "drop"
        else:
            present = df[name][~_is_missing(df[name])]
            parsed = pd.to_numeric(present, errors="coerce")
            kind = "numeric" if parsed.notna().all() else "categorical"
        schema.append(ColumnSchema(name, kind))
    return schema


@dataclass
class RawTable:
    """Typed columns after imputation; numeric as float, categorical as str."""

    columns: dict[str, np.ndarray]
    labels: np.ndarray
    schema: list[ColumnSchema]
    source: str

    @property
    def n_rows(self) -> int:
        return len(self.labels)


def _mode(values: pd.Series) -> str:
    counts = values.value_counts()
    top = counts.max()
    # ties resolved alphabetically so the choice is order independent
    return sorted(counts[counts == top].index)[0]


def load_csv(path, schema: list[ColumnSchema]) -> RawTable:
    """Read ``path`` and type its columns according to ``schema``.

    Missing numerics get the column median, missing categoricals the most
    frequent category. Errors name the offending line (header is line 1)
    and column.
    """
    _check_schema(schema)
    df = _read_strings(path)
    declared = {c.name for c in schema}
    unknown = [c for c in df.columns if c not in declared]
    if unknown:
        raise DataError(f"{path}: columns not in schema: {unknown}")
    absent = [c.name for c in schema if c.name not in df.columns]
    if absent:
        raise DataError(f"{path}: schema columns missing from file: {absent}")

    columns = {}
    labels = None
    for col in schema:
        if col.kind == "drop":
            continue
        raw = df[col.name].str.strip()
        missing = _is_missing(raw)
        if col.kind == "label":
            if missing.any():
                line = int(np.flatnonzero(missing)[0]) + 2
                raise DataError(f"{path}: missing label at line {line}, column {col.name!r}")
            labels = _parse_numeric(raw, path, col.name)
        elif col.kind == "numeric":
            vals = np.full(len(raw), np.nan)
            vals[~missing] = _parse_numeric(raw[~missing], path, col.name)
            if missing.any():
                if missing.all():
                    raise DataError(f"{path}: numeric column {col.name!r} has no values")
                vals[missing] = np.median(vals[~missing])
            columns[col.name] = vals
        else:
            vals = raw.to_numpy(dtype=object).copy()
            if missing.any():
                if missing.all():
                    raise DataError(f"{path}: categorical column {col.name!r} has no values")
                vals[missing] = _mode(raw[~missing])
            if col.categories is not None:
                bad = ~pd.Series(vals).isin(col.categories).to_numpy()
                if bad.any():
                    line = int(np.flatnonzero(bad)[0]) + 2
                    raise DataError(f"{path}: line {line}, column {col.name!r}: "
                                    f"category {vals[bad][0]!r} not in schema")
            columns[col.name] = vals
    return RawTable(columns=columns, labels=labels, schema=list(schema), source=str(path))


def _parse_numeric(raw: pd.Series, path, name) -> np.ndarray:
    parsed = pd.to_numeric(raw, errors="coerce")
    bad = parsed.isna().to_numpy()
    if bad.any():
        pos = int(np.flatnonzero(bad)[0])
        line = int(raw.index[pos]) + 2
        raise DataError(f"{path}: line {line}, column {name!r}: cannot parse {raw.iloc[pos]!r} as a number")
    return parsed.to_numpy(dtype=float)


@dataclass
class Dataset:
    features: np.ndarray
    labels: np.ndarray
    feature_names: list[str]
    train_indices: np.ndarray
    test_indices: np.ndarray
    source: str = ""
    means: np.ndarray | None = None
    scales: np.ndarray | None = None

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def to_csv(self, path):
        """Dump the preprocessed matrix with a ``split`` column for inspection."""
        df = pd.DataFrame(self.features, columns=self.feature_names)
        df["label"] = self.labels
        split = np.empty(len(self.labels), dtype=object)
        split[self.train_indices] = "train"
        split[self.test_indices] = "test"
        df["split"] = split
        df.to_csv(path, index=False)


def split_indices(n: int, seed: int, split_fraction: float) -> tuple[np.ndarray, np.ndarray]:
    if not 0.0 < split_fraction < 1.0:
        raise DataError("split_fraction must be in (0, 1)")
    if n < 2:
        raise DataError("need at least two rows to split")
    n_train = min(max(int(round(n * split_fraction)), 1), n - 1)
    perm = np.random.default_rng(seed).permutation(n)
    return np.sort(perm[:n_train]), np.sort(perm[n_train:])


def preprocess(raw: RawTable, schema: list[ColumnSchema] | None = None, seed: int = 42,
               split_fraction: float = 0.8) -> Dataset:
    """Encode, split, then standardize with training-split statistics only."""
    schema = raw.schema if schema is None else schema
    labels = raw.labels
    if not np.isin(labels, (0.0, 1.0)).all():
        bad = labels[~np.isin(labels, (0.0, 1.0))][0]
        raise DataError(f"label values must be 0 or 1, found {bad!r}")
    labels = labels.astype(int)

    names, cols = [], []
    for col in schema:
        if col.kind == "numeric":
            cols.append(np.asarray(raw.columns[col.name], dtype=float))
        elif col.kind == "categorical":
            cats = col.categories if col.categories is not None else sorted(set(raw.columns[col.name]))
            lookup = {c: k for k, c in enumerate(cats)}
            cols.append(np.array([lookup[v] for v in raw.columns[col.name]], dtype=float))
        else:
            continue
        names.append(col.name)
    if not cols:
        raise DataError("schema keeps no feature columns")
    X = np.column_stack(cols)

    train, test = split_indices(len(labels), seed, split_fraction)
    means = X[train].mean(axis=0)
    scales = X[train].std(axis=0)
    flat = scales == 0
    if flat.any():
        flat_names = [n for n, f in zip(names, flat) if f]
        warnings.warn(f"zero-variance columns scaled to 0: {flat_names}", stacklevel=2)
        scales = np.where(flat, 1.0, scales)
    X = (X - means) / scales
    X[:, flat] = 0.0
    if not np.all(np.isfinite(X)):
        raise DataError("non-finite feature values after preprocessing")
    return Dataset(features=X, labels=labels, feature_names=names, train_indices=train,
                   test_indices=test, source=raw.source, means=means, scales=scales)


def load_dataset(path, schema, seed: int = 42, split_fraction: float = 0.8) -> Dataset:
    """``load_csv`` followed by ``preprocess``; ``schema`` may be a list or a JSON path."""
    if not isinstance(schema, list):
        schema = load_schema(schema)
    return preprocess(load_csv(path, schema), schema, seed, split_fraction)
