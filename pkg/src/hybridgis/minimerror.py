"""Minimerror: annealed hyperplane perceptron with a bias input."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

from .annealing import (
    AnnealingConfig,
    TrainDiagnostics,
    anneal,
    window_cost,
    window_slope,
)
from .dataset import Dataset, require_labels
from .rng import XorShift64Star


@dataclass
class Hyperplane:
    """Weights over the bias-augmented input (last component multiplies 1)."""

    w: np.ndarray

    @property
    def dim(self) -> int:
        return self.w.shape[0]

    def to_dict(self) -> dict:
        return {"w": self.w.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "Hyperplane":
        return cls(np.asarray(d["w"], dtype=float))


def augment(X: np.ndarray) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    return np.hstack([X, np.ones((X.shape[0], 1))])


def normalize(w: np.ndarray) -> np.ndarray:
    """Rescale to ||w|| = sqrt(len(w))."""
    return w * (math.sqrt(w.shape[0]) / np.linalg.norm(w))


def _hebb(Xa: np.ndarray, y: np.ndarray, seed: int) -> tuple[np.ndarray, bool]:
    w = y @ Xa
    if np.linalg.norm(w) > 0:
        return normalize(w), False
    return normalize(XorShift64Star(seed).normal(Xa.shape[1])), True


def hebb_init(data: Dataset, seed: int = 0) -> Hyperplane:
    """w = sum_mu tau^mu x~^mu, rescaled; random direction if the sum cancels."""
    y = require_labels(data)
    if len(data) < 1:
        raise ValueError("need at least one pattern")
    w, _ = _hebb(augment(data.X), y, seed)
    return Hyperplane(w)


def _gammas(w: np.ndarray, Xa: np.ndarray, y: np.ndarray) -> np.ndarray:
    return y * (Xa @ w) / math.sqrt(w.shape[0])


def stability(plane: Hyperplane, x: np.ndarray, label: int | None) -> float:
    """Signed normalized distance tau (w . x~) / sqrt(N+1); > 0 iff correct."""
    if label is None:
        raise ValueError("stability needs a labeled pattern")
    return float(_gammas(plane.w, augment(x), np.array([label]))[0])


def stabilities(plane: Hyperplane, data: Dataset) -> np.ndarray:
    return _gammas(plane.w, augment(data.X), require_labels(data))


def cost(
    data: Dataset, plane: Hyperplane, temperature: float, t_learned: float | None = None
) -> float:
    if not temperature > 0:
        raise ValueError("temperature must be > 0")
    return window_cost(stabilities(plane, data), temperature, t_learned)


def _grad(w, Xa, y, t_unlearned, t_learned):
    gamma = _gammas(w, Xa, y)
    coef = window_slope(gamma, t_unlearned, t_learned) * y / math.sqrt(w.shape[0])
    return coef @ Xa


def gradient(
    data: Dataset, plane: Hyperplane, t_unlearned: float, t_learned: float
) -> np.ndarray:
    """dE/dw with learned patterns (gamma > 0) taken at t_learned."""
    if not (t_unlearned > 0 and t_learned > 0):
        raise ValueError("temperatures must be > 0")
    return _grad(plane.w, augment(data.X), require_labels(data), t_unlearned, t_learned)


def _predict(w: np.ndarray, Xa: np.ndarray) -> np.ndarray:
    return np.where(Xa @ w >= 0, 1, -1)


def predict(plane: Hyperplane, x: np.ndarray) -> np.ndarray | int:
    """sign(w . x~) with sign(0) = +1; vectorized over rows."""
    x = np.asarray(x, dtype=float)
    out = _predict(plane.w, augment(x))
    return int(out[0]) if x.ndim == 1 else out


def train_minimerror(
    data: Dataset, config: AnnealingConfig | None = None, seed: int = 0
) -> tuple[Hyperplane, TrainDiagnostics]:
    config = config or AnnealingConfig()
    y = require_labels(data).astype(float)
    if len(data) < 1:
        raise ValueError("need at least one pattern")
    Xa = augment(data.X)
    w0, fallback = _hebb(Xa, y, seed)
    diag = TrainDiagnostics()
    if fallback:
        diag.notes.append("hebb sum vanished; random initial direction")

    w, diag = anneal(
        w0,
        cost=lambda w, t, tl: window_cost(_gammas(w, Xa, y), t, tl),
        grad=lambda w, t, tl: _grad(w, Xa, y, t, tl),
        project=normalize,
        n_errors=lambda w: int(np.sum(_predict(w, Xa) != y)),
        config=config,
        diag=diag,
    )
    diag.stabilities = _gammas(w, Xa, y)
    return Hyperplane(w), diag


def schema_hash(data: Dataset) -> str:
    blob = json.dumps(data.schema.to_dict(), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()


def plane_document(
    plane: Hyperplane, data: Dataset, config: AnnealingConfig, diag: TrainDiagnostics
) -> dict:
    return {
        "kind": "plane",
        "w": plane.w.tolist(),
        "schema_hash": schema_hash(data),
        "config": config.to_dict(),
        "diagnostics": diag.summary(),
    }
