"""Holdout scoring and learning curves over repeated random splits."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .annealing import AnnealingConfig, TrainingError
from .dataset import LABEL_NAMES, Dataset, SplitSpec, require_labels, split, standardize
from .fcm import FcmConfig, FcmError
from .hybrid import HybridError, hybrid_fit, hybrid_predict, map_clusters_to_labels, predict_labels
from .rng import mix_seed

DEFAULT_FRACTIONS = (0.10, 0.20, 0.30, 0.40, 0.50, 0.60, 0.70, 0.80, 0.90, 0.95)
CLASS_KEYS = ("deposit", "barren")


def score(predicted, truth) -> tuple[float, dict[str, float]]:
    """Accuracy and per-class detection rate for the classes present in ``truth``."""
    predicted = np.asarray(predicted)
    truth = np.asarray(truth)
    if predicted.shape != truth.shape:
        raise ValueError(f"length mismatch: {predicted.shape} vs {truth.shape}")
    if truth.size == 0:
        raise ValueError("nothing to score")
    hit = predicted == truth
    per_class = {}
    for label, name in LABEL_NAMES.items():
        sel = truth == label
        if np.any(sel):
            per_class[name] = float(np.mean(hit[sel]))
    return float(np.mean(hit)), per_class


@dataclass(frozen=True)
class PipelineConfig:
    c: int = 2
    fcm: FcmConfig = field(default_factory=FcmConfig)
    annealing: AnnealingConfig = field(default_factory=AnnealingConfig)
    # "train": fit standardization on the training part only; "corpus": on
    # the whole dataset before splitting; "none": leave values as they are
    standardize: str = "train"

    def __post_init__(self):
        if self.standardize not in ("train", "corpus", "none"):
            raise ValueError(f"unknown standardize mode {self.standardize!r}")

    def to_dict(self) -> dict:
        return {
            "c": self.c,
            "fcm": asdict(self.fcm),
            "annealing": self.annealing.to_dict(),
            "standardize": self.standardize,
        }


@dataclass
class TrialResult:
    train_fraction: float
    seed: int
    train_size: int
    test_size: int
    accuracy: float = math.nan
    per_class: dict[str, float] = field(default_factory=dict)
    train_accuracy: float = math.nan
    failed: bool = False
    error: str | None = None


@dataclass
class EvalReport:
    trials: list[TrialResult]
    base_seed: int = 0
    config: dict = field(default_factory=dict)

    def fractions(self) -> list[float]:
        return sorted({t.train_fraction for t in self.trials})

    def aggregates(self) -> list[dict]:
        """One row per fraction: mean and population std over successful trials."""
        rows = []
        for f in self.fractions():
            ok = [t for t in self.trials if t.train_fraction == f and not t.failed]
            n_failed = sum(1 for t in self.trials if t.train_fraction == f and t.failed)
            row = {"fraction": f, "n_trials": len(ok), "n_failed": n_failed}
            row["mean_accuracy"], row["std_accuracy"] = _mean_std([t.accuracy for t in ok])
            for name in CLASS_KEYS:
                vals = [t.per_class[name] for t in ok if name in t.per_class]
                row[f"mean_rate_{name}"], row[f"std_rate_{name}"] = _mean_std(vals)
            rows.append(row)
        return rows

    def to_dict(self) -> dict:
        return {
            "base_seed": self.base_seed,
            "config": self.config,
            "trials": [asdict(t) for t in self.trials],
            "aggregates": self.aggregates(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, allow_nan=True)


def _mean_std(vals: Sequence[float]) -> tuple[float, float]:
    if not vals:
        return math.nan, math.nan
    a = np.asarray(vals, dtype=float)
    return float(np.mean(a)), float(np.std(a))


def run_trial(data: Dataset, fraction: float, seed: int, config: PipelineConfig) -> TrialResult:
    train, test = split(data, SplitSpec(fraction, seed))
    result = TrialResult(fraction, seed, len(train), len(test))
    try:
        if config.standardize == "train":
            train, params = standardize(train)
            test, _ = standardize(test, params)
        fcm = replace(config.fcm, c=config.c, seed=seed)
        model = hybrid_fit(train.unlabeled(), config.c, fcm, config.annealing)
        mapping, _ = map_clusters_to_labels(
            hybrid_predict(model, train.X), train.y, config.c
        )
        model.mapping = mapping
        result.train_accuracy, _ = score(predict_labels(model, train.X), train.y)
        result.accuracy, result.per_class = score(predict_labels(model, test.X), test.y)
    except (FcmError, HybridError, TrainingError, ValueError) as exc:
        result.failed = True
        result.error = f"{type(exc).__name__}: {exc}"
    return result


def run_learning_curve(
    data: Dataset,
    fractions: Sequence[float] = DEFAULT_FRACTIONS,
    n_trials: int = 100,
    base_seed: int = 0,
    config: PipelineConfig | None = None,
) -> EvalReport:
    """Hybrid pipeline over ``n_trials`` random splits per training fraction.

    Trial (i, t) uses seed mix_seed(base_seed, i, t) for both its split
    and its FCM initialization. Failed trials stay in the report but are
    left out of the aggregates.
    """
    config = config or PipelineConfig()
    require_labels(data)
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    for f in fractions:
        if not 0.0 < f < 1.0:
            raise ValueError(f"fraction {f} outside (0, 1)")
    if config.standardize == "corpus":
        data, _ = standardize(data)
    trials = [
        run_trial(data, f, mix_seed(base_seed, i, t), config)
        for i, f in enumerate(fractions)
        for t in range(n_trials)
    ]
    return EvalReport(trials, base_seed, config.to_dict())


def export_curve(report: EvalReport, path: str | Path) -> None:
    """Write one CSV row of aggregates per fraction, fractions ascending."""
    rows = report.aggregates()
    if not rows:
        raise ValueError("empty report")
    cols = list(rows[0])
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for row in rows:
            w.writerow([repr(row[c]) if isinstance(row[c], float) else row[c] for c in cols])
