"""Attribute schema and CSV ingestion, standardization, presets and splits."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Sequence

import numpy as np

from .rng import XorShift64Star

QUALITATIVE = "qualitative"
QUANTITATIVE = "quantitative"

DEPOSIT = 1
BARREN = -1
LABEL_NAMES = {DEPOSIT: "deposit", BARREN: "barren"}
_LABEL_TOKENS = {"deposit": DEPOSIT, "barren": BARREN}

# Attribute subsets of the Andes GIS databases, 1-based.
PRESETS: dict[str, tuple[int, ...]] = {
    "I": tuple(range(1, 26)),
    "II": tuple(range(1, 9)),
    "III": tuple(range(9, 26)),
    "IV": (11, 12, 13, 14),
    "V": (11, 12, 13, 25),
    "VI": (3, 5, 6, 7),
    "VII": (11, 12, 13, 14, 25),
    "VIII": (11, 12, 13, 20, 25),
    "IX": (3, 5, 6, 7, 11, 12, 13, 25),
    "X": (11, 12, 13, 14, 18, 19, 20, 21, 23, 24),
    "XI": (11, 12, 13, 14, 18, 19, 20, 21, 23, 24, 25),
}


class DatasetError(ValueError):
    """Malformed input data or schema."""


@dataclass(frozen=True)
class Attribute:
    name: str
    kind: str

    def __post_init__(self):
        if self.kind not in (QUALITATIVE, QUANTITATIVE):
            raise DatasetError(f"attribute {self.name!r}: unknown kind {self.kind!r}")


@dataclass(frozen=True)
class AttributeSchema:
    attributes: tuple[Attribute, ...]
    target: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "attributes", tuple(self.attributes))
        names = [a.name for a in self.attributes]
        if not names:
            raise DatasetError("schema needs at least one attribute")
        if len(set(names)) != len(names):
            raise DatasetError("attribute names must be unique")
        if self.target is not None and self.target in names:
            raise DatasetError(f"target column {self.target!r} listed as a feature")

    @property
    def names(self) -> list[str]:
        return [a.name for a in self.attributes]

    @property
    def n_features(self) -> int:
        return len(self.attributes)

    def quantitative_mask(self) -> np.ndarray:
        return np.array([a.kind == QUANTITATIVE for a in self.attributes])

    def to_dict(self) -> dict:
        return {
            "attributes": [{"name": a.name, "kind": a.kind} for a in self.attributes],
            "target": self.target,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AttributeSchema":
        try:
            attrs = tuple(Attribute(a["name"], a["kind"]) for a in d["attributes"])
        except (KeyError, TypeError) as exc:
            raise DatasetError(f"bad schema document: {exc}") from exc
        return cls(attrs, d.get("target"))


def load_schema(path: str | Path) -> AttributeSchema:
    with open(path, encoding="utf-8") as fh:
        return AttributeSchema.from_dict(json.load(fh))


def save_schema(schema: AttributeSchema, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(schema.to_dict(), fh, indent=2)
        fh.write("\n")


@dataclass(frozen=True)
class Dataset:
    """Patterns as rows of ``X`` (P x N) with optional +-1 labels ``y``."""

    schema: AttributeSchema
    X: np.ndarray
    y: np.ndarray | None = None
    categories: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def __post_init__(self):
        X = np.array(self.X, dtype=float, copy=True)
        if X.ndim == 1 and X.size == 0:
            X = X.reshape(0, self.schema.n_features)
        if X.ndim != 2 or X.shape[1] != self.schema.n_features:
            raise DatasetError(
                f"pattern width {X.shape[-1] if X.ndim else 0} != schema width {self.schema.n_features}"
            )
        if not np.all(np.isfinite(X)):
            raise DatasetError("pattern values must be finite")
        X.setflags(write=False)
        object.__setattr__(self, "X", X)
        if self.y is not None:
            y = np.array(self.y, dtype=np.int64, copy=True)
            if y.shape != (X.shape[0],):
                raise DatasetError("label count differs from pattern count")
            if not np.all(np.isin(y, (-1, 1))):
                raise DatasetError("labels must be -1 or +1")
            y.setflags(write=False)
            object.__setattr__(self, "y", y)

    def __len__(self) -> int:
        return self.X.shape[0]

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    @property
    def labeled(self) -> bool:
        return self.y is not None

    def subset(self, idx: Sequence[int]) -> "Dataset":
        idx = np.asarray(idx, dtype=np.int64)
        y = None if self.y is None else self.y[idx]
        return Dataset(self.schema, self.X[idx], y, self.categories)

    def unlabeled(self) -> "Dataset":
        return Dataset(self.schema, self.X, None, self.categories)


@lru_cache(maxsize=64)
def anonymous_schema(n: int) -> AttributeSchema:
    return AttributeSchema(tuple(Attribute(f"x{k + 1}", QUANTITATIVE) for k in range(n)))


def from_arrays(X, y=None) -> Dataset:
    """Dataset over all-quantitative attributes x1..xN."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    return Dataset(anonymous_schema(X.shape[1]), X, y)


def require_labels(data: Dataset) -> np.ndarray:
    if data.y is None:
        raise DatasetError("labels required")
    return data.y


def _parse_label(token: str, row: int, column: str) -> int:
    t = token.strip()
    if t.lower() in _LABEL_TOKENS:
        return _LABEL_TOKENS[t.lower()]
    try:
        v = float(t)
    except ValueError:
        v = math.nan
    if v in (1.0, -1.0):
        return int(v)
    raise DatasetError(f"row {row}, column {column!r}: unknown label {token!r}")


def load_csv(path: str | Path, schema: AttributeSchema) -> Dataset:
    """Read a comma separated file with a header row into a Dataset.

    Qualitative cells are coded 0..k-1 in order of first appearance.
    Rows are numbered from 1 for the first data row in error messages.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DatasetError(f"{path}: empty file, header row expected") from None
        wanted = schema.names + ([schema.target] if schema.target else [])
        for name in wanted:
            if name not in header:
                raise DatasetError(f"{path}: missing column {name!r}")
        pos = {name: header.index(name) for name in wanted}

        codes: dict[str, dict[str, int]] = {
            a.name: {} for a in schema.attributes if a.kind == QUALITATIVE
        }
        rows, labels = [], []
        for r, cells in enumerate(reader, start=1):
            if not cells or all(not c.strip() for c in cells):
                continue
            if len(cells) < len(header):
                raise DatasetError(f"row {r}: expected {len(header)} cells, got {len(cells)}")
            values = []
            for a in schema.attributes:
                cell = cells[pos[a.name]].strip()
                if a.kind == QUALITATIVE:
                    values.append(float(codes[a.name].setdefault(cell, len(codes[a.name]))))
                else:
                    try:
                        v = float(cell)
                    except ValueError:
                        v = math.nan
                    if not math.isfinite(v):
                        raise DatasetError(
                            f"row {r}, column {a.name!r}: non-numeric value {cell!r}"
                        )
                    values.append(v)
            rows.append(values)
            if schema.target:
                labels.append(_parse_label(cells[pos[schema.target]], r, schema.target))

    X = np.array(rows, dtype=float).reshape(len(rows), schema.n_features)
    y = np.array(labels, dtype=np.int64) if schema.target else None
    cats = {name: tuple(m) for name, m in codes.items()}
    return Dataset(schema, X, y, cats)


def _category_name(data: Dataset, name: str, code: int) -> str:
    cats = data.categories.get(name)
    if cats and 0 <= code < len(cats):
        return cats[code]
    return f"c{code}"


def write_csv(data: Dataset, path: str | Path) -> None:
    """Write patterns (and labels as deposit/barren) with a header row."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        header = data.schema.names + ([data.schema.target] if data.schema.target else [])
        w.writerow(header)
        quant = data.schema.quantitative_mask()
        for i in range(len(data)):
            row = [
                repr(float(v)) if q else _category_name(data, name, int(v))
                for v, q, name in zip(data.X[i], quant, data.schema.names)
            ]
            if data.schema.target:
                if data.y is None:
                    raise DatasetError("schema names a target but dataset has no labels")
                row.append(LABEL_NAMES[int(data.y[i])])
            w.writerow(row)


@dataclass(frozen=True)
class StandardizationParams:
    """Mean and population std per quantitative attribute, keyed by name."""

    means: dict[str, float]
    stds: dict[str, float]

    def to_dict(self) -> dict:
        return {"means": dict(self.means), "stds": dict(self.stds)}

    @classmethod
    def from_dict(cls, d: dict) -> "StandardizationParams":
        return cls(dict(d["means"]), dict(d["stds"]))


def fit_standardization(data: Dataset) -> StandardizationParams:
    if len(data) < 1:
        raise DatasetError("standardization needs at least one pattern")
    means, stds = {}, {}
    for j, a in enumerate(data.schema.attributes):
        if a.kind == QUANTITATIVE:
            col = data.X[:, j]
            if np.all(col == col[0]):
                # exact, so rounding in the mean cannot fake a tiny spread
                means[a.name], stds[a.name] = float(col[0]), 0.0
            else:
                means[a.name] = float(np.mean(col))
                stds[a.name] = float(np.std(col))
    return StandardizationParams(means, stds)


def apply_standardization(data: Dataset, params: StandardizationParams) -> Dataset:
    X = np.array(data.X)
    for j, a in enumerate(data.schema.attributes):
        if a.kind != QUANTITATIVE:
            continue
        if a.name not in params.means:
            raise DatasetError(f"no standardization entry for {a.name!r}")
        X[:, j] -= params.means[a.name]
        sd = params.stds[a.name]
        if sd > 0:
            X[:, j] /= sd
        else:
            X[:, j] = 0.0
    return Dataset(data.schema, X, data.y, data.categories)


def standardize(
    data: Dataset, params: StandardizationParams | None = None
) -> tuple[Dataset, StandardizationParams]:
    """Center and scale quantitative attributes; qualitative ones pass through.

    Fits on ``data`` unless ``params`` (e.g. from a training set) is given.
    Constant columns become 0.
    """
    if params is None:
        params = fit_standardization(data)
    return apply_standardization(data, params), params


def select_attributes(data: Dataset, indices: Sequence[int] | str) -> Dataset:
    """Restrict to the given 1-based attribute indices, or a named preset I..XI."""
    if isinstance(indices, str):
        try:
            indices = PRESETS[indices.upper()]
        except KeyError:
            raise DatasetError(f"unknown preset {indices!r}") from None
    idx = [int(i) for i in indices]
    if not idx:
        raise DatasetError("empty attribute selection")
    if len(set(idx)) != len(idx):
        raise DatasetError("attribute indices must be unique")
    n = data.schema.n_features
    for i in idx:
        if not 1 <= i <= n:
            raise DatasetError(f"attribute index {i} out of range 1..{n}")
    cols = [i - 1 for i in idx]
    attrs = tuple(data.schema.attributes[c] for c in cols)
    schema = AttributeSchema(attrs, data.schema.target)
    cats = {a.name: data.categories[a.name] for a in attrs if a.name in data.categories}
    return Dataset(schema, data.X[:, cols], data.y, cats)


def class_mean_diff(data: Dataset) -> np.ndarray:
    """Squared difference of deposit and barren class means per attribute.

    Quantitative attributes are standardized over the whole dataset first.
    """
    y = require_labels(data)
    if not (np.any(y == DEPOSIT) and np.any(y == BARREN)):
        raise DatasetError("both classes must be present")
    std, _ = standardize(data)
    diff = std.X[y == DEPOSIT].mean(axis=0) - std.X[y == BARREN].mean(axis=0)
    return diff**2


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.train_fraction <= 1.0:
            raise DatasetError("train_fraction must lie in (0, 1]")


def train_size(n: int, fraction: float) -> int:
    """round-half-up of fraction * n."""
    return int(math.floor(fraction * n + 0.5))


def split(data: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset]:
    """Seeded random holdout; both parts keep the original pattern order."""
    n = len(data)
    if spec.train_fraction < 1.0 and n < 2:
        raise DatasetError("need at least 2 patterns to split")
    k = train_size(n, spec.train_fraction)
    perm = XorShift64Star(spec.seed).permutation(n)
    train_idx = np.sort(perm[:k])
    test_idx = np.sort(perm[k:])
    return data.subset(train_idx), data.subset(test_idx)


def generate_synthetic(
    n_per_class: int | tuple[int, int],
    n_quant: int,
    n_qual: int,
    separation: float,
    seed: int,
    n_categories: int = 3,
) -> Dataset:
    """Two-class GIS-like data: Gaussian quantitative block, skewed categoricals.

    Deposit (+1) and barren (-1) means sit at +-separation/2 along the
    diagonal direction of the quantitative block, with unit variance per
    axis. Qualitative attributes come first (a01.. for the qualitative
    block, then quantitative), which lines the 8+17 layout up with the
    PRESETS index layout. ``n_per_class`` may be a (deposit, barren) pair.
    """
    if isinstance(n_per_class, int):
        n_dep = n_bar = n_per_class
    else:
        n_dep, n_bar = n_per_class
    if min(n_dep, n_bar) < 1 or n_quant + n_qual < 1 or n_quant < 0 or n_qual < 0:
        raise DatasetError("counts must be positive")
    rng = XorShift64Star(seed)
    n = n_dep + n_bar
    y = np.array([DEPOSIT] * n_dep + [BARREN] * n_bar, dtype=np.int64)
    y = y[rng.permutation(n)]

    base = np.arange(n_categories, 0, -1, dtype=float)
    p_dep = base / base.sum()
    p_bar = p_dep[::-1]
    qual = np.zeros((n, n_qual))
    for i in range(n):
        p = p_dep if y[i] == DEPOSIT else p_bar
        for j in range(n_qual):
            qual[i, j] = rng.choice(p)

    quant = rng.normal((n, n_quant))
    if n_quant:
        direction = np.full(n_quant, 1.0 / math.sqrt(n_quant))
        quant += 0.5 * separation * y[:, None] * direction[None, :]

    attrs = [Attribute(f"a{j + 1:02d}", QUALITATIVE) for j in range(n_qual)]
    attrs += [Attribute(f"a{n_qual + j + 1:02d}", QUANTITATIVE) for j in range(n_quant)]
    schema = AttributeSchema(tuple(attrs), target="class")
    cats = {a.name: tuple(f"c{k}" for k in range(n_categories)) for a in attrs[:n_qual]}
    return Dataset(schema, np.hstack([qual, quant]), y, cats)
