"""Minimerror-S: annealed training of a hypersphere separator.

Patterns inside the sphere (boundary included) belong to class -1, the
rest to +1. The stability of a pattern is

    gamma_s = tau * (||x - w||^2 - rho^2) / (2 rho sqrt(N)),

which behaves like a signed distance to the surface near the boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .annealing import (
    AnnealingConfig,
    TrainDiagnostics,
    TrainingError,
    anneal,
    window_cost,
    window_slope,
)
from .dataset import Dataset, require_labels

RHO_MIN = 1e-6
MAX_CLAMPED_EPOCHS = 10


class DegenerateSphereError(TrainingError):
    """Radius stuck at its positivity floor."""


@dataclass
class SphereSeparator:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=float)
        self.radius = float(self.radius)
        if not self.radius > 0:
            raise ValueError("radius must be > 0")
        if not np.all(np.isfinite(self.center)):
            raise ValueError("center must be finite")

    def to_dict(self) -> dict:
        return {"center": self.center.tolist(), "radius": self.radius}

    @classmethod
    def from_dict(cls, d: dict) -> "SphereSeparator":
        return cls(np.asarray(d["center"], dtype=float), float(d["radius"]))


def _sq_dist(center: np.ndarray, X: np.ndarray) -> np.ndarray:
    diff = np.atleast_2d(X) - center
    return np.einsum("in,in->i", diff, diff)


def inside_scores(sphere: SphereSeparator, X: np.ndarray) -> np.ndarray:
    """(rho^2 - ||x - w||^2) / (2 rho sqrt(N)); positive strictly inside."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    rho = sphere.radius
    return (rho * rho - _sq_dist(sphere.center, X)) / (2.0 * rho * math.sqrt(X.shape[1]))


def nearest_sphere(spheres: list[SphereSeparator], X: np.ndarray) -> np.ndarray:
    """Index of the sphere with the largest inside score; ties go to the lowest."""
    scores = np.stack([inside_scores(s, X) for s in spheres], axis=1)
    return np.argmax(scores, axis=1)


def _gammas(theta: np.ndarray, X: np.ndarray, y: np.ndarray) -> np.ndarray:
    w, rho = theta[:-1], theta[-1]
    return y * (_sq_dist(w, X) - rho * rho) / (2.0 * rho * math.sqrt(X.shape[1]))


def _grad(theta, X, y, t_unlearned, t_learned):
    w, rho = theta[:-1], theta[-1]
    sqrt_n = math.sqrt(X.shape[1])
    diff = X - w
    d2 = np.einsum("in,in->i", diff, diff)
    slope = window_slope(_gammas(theta, X, y), t_unlearned, t_learned)
    dg_dw = -(y / (rho * sqrt_n))[:, None] * diff
    dg_drho = y * (-d2 / (rho * rho) - 1.0) / (2.0 * sqrt_n)
    return np.concatenate([slope @ dg_dw, [slope @ dg_drho]])


def _predict(theta: np.ndarray, X: np.ndarray) -> np.ndarray:
    w, rho = theta[:-1], theta[-1]
    return np.where(_sq_dist(w, X) <= rho * rho, -1, 1)


def spherical_stability(sphere: SphereSeparator, x: np.ndarray, label: int | None) -> float:
    if label is None:
        raise ValueError("spherical stability needs a labeled pattern")
    theta = np.append(sphere.center, sphere.radius)
    X = np.atleast_2d(np.asarray(x, dtype=float))
    return float(_gammas(theta, X, np.array([label], dtype=float))[0])


def spherical_stabilities(sphere: SphereSeparator, data: Dataset) -> np.ndarray:
    theta = np.append(sphere.center, sphere.radius)
    return _gammas(theta, data.X, require_labels(data).astype(float))


def sphere_cost(
    data: Dataset, sphere: SphereSeparator, temperature: float, t_learned: float | None = None
) -> float:
    return window_cost(spherical_stabilities(sphere, data), temperature, t_learned)


def sphere_gradient(
    data: Dataset, sphere: SphereSeparator, t_unlearned: float, t_learned: float
) -> np.ndarray:
    """Joint gradient: center components first, radius last."""
    theta = np.append(sphere.center, sphere.radius)
    return _grad(theta, data.X, require_labels(data).astype(float), t_unlearned, t_learned)


def sphere_predict(sphere: SphereSeparator, x: np.ndarray) -> np.ndarray | int:
    """-1 when ||x - w||^2 <= rho^2 (boundary is inside), else +1."""
    x = np.asarray(x, dtype=float)
    out = _predict(np.append(sphere.center, sphere.radius), np.atleast_2d(x))
    return int(out[0]) if x.ndim == 1 else out


def clamp_center(w: np.ndarray, bounds: np.ndarray) -> np.ndarray:
    """Clip each coordinate into its (min, max) row of ``bounds``."""
    bounds = np.asarray(bounds, dtype=float)
    return np.minimum(np.maximum(w, bounds[:, 0]), bounds[:, 1])


def train_minimerror_s(
    data: Dataset,
    init: SphereSeparator,
    config: AnnealingConfig | None = None,
    bounds: np.ndarray | None = None,
) -> tuple[SphereSeparator, TrainDiagnostics]:
    """Anneal (center, radius) jointly from ``init``.

    With ``bounds`` the center is kept inside the box after every step,
    until clamping costs more training errors than leaving the center
    free; from then on the box is ignored for this sphere.
    """
    config = config or AnnealingConfig()
    X = data.X
    y = require_labels(data).astype(float)
    if init.center.shape != (X.shape[1],):
        raise ValueError("init center dimension differs from the data")
    diag = TrainDiagnostics()
    state = {"box": bounds is not None, "stuck": 0}

    def n_errors(theta):
        return int(np.sum(_predict(theta, X) != y))

    def project(theta):
        theta = theta.copy()
        theta[-1] = max(theta[-1], RHO_MIN)
        if state["box"]:
            boxed = theta.copy()
            boxed[:-1] = clamp_center(theta[:-1], bounds)
            if n_errors(boxed) > n_errors(theta):
                state["box"] = False
                diag.notes.append(f"border constraint dropped at epoch {diag.epochs + 1}")
            else:
                theta = boxed
        return theta

    def on_epoch(theta, diag):
        state["stuck"] = state["stuck"] + 1 if theta[-1] <= RHO_MIN else 0
        if state["stuck"] > MAX_CLAMPED_EPOCHS:
            raise DegenerateSphereError(
                f"radius pinned at {RHO_MIN} for more than {MAX_CLAMPED_EPOCHS} epochs", diag
            )

    theta0 = project(np.append(init.center, max(init.radius, RHO_MIN)))
    theta, diag = anneal(
        theta0,
        cost=lambda th, t, tl: window_cost(_gammas(th, X, y), t, tl),
        grad=lambda th, t, tl: _grad(th, X, y, t, tl),
        project=project,
        n_errors=n_errors,
        config=config,
        diag=diag,
        on_epoch=on_epoch,
    )
    diag.stabilities = _gammas(theta, X, y)
    return SphereSeparator(theta[:-1], theta[-1]), diag
