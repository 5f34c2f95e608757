"""Unsupervised growing-kernel clustering with Minimerror-S spheres.

Each new class starts from the closest pair of still-unassigned patterns:
a kernel sphere is put at their midpoint with 1.5 times their distance as
radius, trained against every other unassigned pattern, then grown by
pulling in outside patterns that sit close to its surface and retraining.
Small classes are pruned at the end and their members handed to the
nearest surviving sphere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .annealing import AnnealingConfig
from .dataset import Dataset, from_arrays
from .fcm import squared_distances
from .sphere import (
    SphereSeparator,
    inside_scores,
    nearest_sphere,
    sphere_predict,
    train_minimerror_s,
)

RHO_FLOOR = 1e-6
# 1/cosh^2(x) > 1/2  <=>  |x| < arccosh(sqrt(2))
ABSORB_LIMIT = math.acosh(math.sqrt(2.0))
UNASSIGNED = 0
# kernel-relative schedule, in units of the sphere radius
GROWING_SCHEDULE = AnnealingConfig(
    learning_rate=0.02, t_initial=0.5, t_ratio=0.3, delta_t=0.0025, t_min=0.005, max_epochs=1000
)


class GrowingError(RuntimeError):
    def __init__(self, message: str, partial: "ClusterModel | None" = None):
        super().__init__(message)
        self.partial = partial


@dataclass(frozen=True)
class GrowingConfig:
    annealing: AnnealingConfig = field(default_factory=lambda: GROWING_SCHEDULE)
    prune_min_size: int = 3
    # (N, 2) array of per-attribute (min, max), "data" for the data's own box, or None
    border_bounds: np.ndarray | str | None = None
    max_classes: int | None = None
    seed: int = 0
    # rescale the schedule by the sphere radius before each training run
    relative_schedule: bool = True

    def __post_init__(self):
        if self.prune_min_size < 0:
            raise ValueError("prune_min_size must be >= 0")
        b = self.border_bounds
        if b is not None and not isinstance(b, str):
            b = np.asarray(b, dtype=float)
            if b.ndim != 2 or b.shape[1] != 2 or np.any(b[:, 0] > b[:, 1]):
                raise ValueError("border_bounds must be rows of (min, max) with min <= max")
        elif isinstance(b, str) and b != "data":
            raise ValueError(f"unknown border_bounds {b!r}")


@dataclass
class ClusterModel:
    spheres: list[SphereSeparator]
    # class id per pattern, 1..K; 0 while unassigned
    assignments: np.ndarray

    @property
    def n_classes(self) -> int:
        return len(self.spheres)

    def member_counts(self) -> list[int]:
        return [int(np.sum(self.assignments == k)) for k in range(1, self.n_classes + 1)]

    def predict(self, X: np.ndarray) -> np.ndarray:
        """Class id (1-based) of the sphere with the largest inside score."""
        return nearest_sphere(self.spheres, X) + 1

    def to_dict(self) -> list[dict]:
        return [
            {"center": s.center.tolist(), "radius": s.radius, "class_id": k, "member_count": n}
            for k, (s, n) in enumerate(zip(self.spheres, self.member_counts()), start=1)
        ]


def _X(data) -> np.ndarray:
    return data.X if isinstance(data, Dataset) else np.asarray(data, dtype=float)


def closest_unassigned_pair(data, assigned=()) -> tuple[int, int, float]:
    """Closest pair among patterns not in ``assigned``; ties by smallest (i, j)."""
    X = _X(data)
    taken = np.zeros(X.shape[0], dtype=bool)
    taken[list(assigned)] = True
    free = np.flatnonzero(~taken)
    if free.size < 2:
        raise ValueError("fewer than 2 unassigned patterns")
    d2 = squared_distances(X[free], X[free])
    d2[np.tril_indices(free.size)] = np.inf
    a, b = np.unravel_index(np.argmin(d2), d2.shape)
    return int(free[a]), int(free[b]), math.sqrt(d2[a, b])


def init_kernel(x_mu: np.ndarray, x_nu: np.ndarray) -> SphereSeparator:
    x_mu, x_nu = np.asarray(x_mu, dtype=float), np.asarray(x_nu, dtype=float)
    rho = float(np.linalg.norm(x_mu - x_nu))
    return SphereSeparator((x_mu + x_nu) / 2.0, max(1.5 * rho, RHO_FLOOR))


def label_by_sphere(data, sphere: SphereSeparator, eligible) -> np.ndarray:
    """-1 for eligible patterns inside or on the sphere, +1 elsewhere."""
    eligible = np.asarray(eligible, dtype=np.int64)
    if eligible.size == 0:
        raise ValueError("no eligible patterns")
    return sphere_predict(sphere, _X(data)[eligible])


def absorb_candidates(data, sphere: SphereSeparator, outside) -> np.ndarray:
    """Outside patterns with 1/cosh^2(gamma_s) > 1/2, i.e. close to the surface."""
    outside = np.asarray(outside, dtype=np.int64)
    if outside.size == 0:
        return outside
    gamma = np.abs(inside_scores(sphere, _X(data)[outside]))
    near = 1.0 / np.cosh(np.minimum(gamma, 300.0)) ** 2 > 0.5
    return outside[near]


def _resolve_bounds(config: GrowingConfig, X: np.ndarray) -> np.ndarray | None:
    if config.border_bounds is None:
        return None
    if isinstance(config.border_bounds, str):
        return np.stack([X.min(axis=0), X.max(axis=0)], axis=1)
    return np.asarray(config.border_bounds, dtype=float)


def _extent(sphere: SphereSeparator, inside: np.ndarray) -> float:
    """Length scale of a kernel: its radius or its farthest -1 pattern."""
    if inside.size == 0:
        return sphere.radius
    return max(sphere.radius, float(np.sqrt(np.max(np.sum((inside - sphere.center) ** 2, axis=1)))))


def _grow_one(X, elig, i, j, config, bounds):
    """Seed one sphere and grow it over ``elig``.

    Returns the sphere, its member indices and the final training labels
    over ``elig`` (absorbed patterns carry -1).
    """
    kernel = init_kernel(X[i], X[j])
    labels = label_by_sphere(X, kernel, elig)
    sphere = kernel
    for _ in range(elig.size):
        sub = from_arrays(X[elig], labels)
        schedule = config.annealing
        if config.relative_schedule:
            schedule = schedule.scaled(_extent(sphere, X[elig][labels == -1]))
        sphere, _ = train_minimerror_s(sub, sphere, schedule, bounds)
        pos = absorb_candidates(X[elig], sphere, np.flatnonzero(labels == 1))
        if pos.size == 0:
            break
        labels[pos] = -1
    inside = elig[sphere_predict(sphere, X[elig]) == -1]
    members = np.union1d(inside, [i, j])
    return sphere, members, labels


def grow_clusters(data, config: GrowingConfig | None = None) -> ClusterModel:
    config = config or GrowingConfig()
    X = _X(data)
    P = X.shape[0]
    if P < 2:
        raise ValueError("need at least 2 patterns")
    bounds = _resolve_bounds(config, X)
    cap = config.max_classes if config.max_classes is not None else P
    assign = np.full(P, UNASSIGNED, dtype=np.int64)
    spheres: list[SphereSeparator] = []

    while np.sum(assign == UNASSIGNED) >= 2:
        if len(spheres) >= cap:
            raise GrowingError(
                f"more than {cap} classes", ClusterModel(list(spheres), assign.copy())
            )
        i, j, _ = closest_unassigned_pair(X, np.flatnonzero(assign != UNASSIGNED))
        elig = np.flatnonzero(assign == UNASSIGNED)
        sphere, members, _ = _grow_one(X, elig, i, j, config, bounds)
        spheres.append(sphere)
        assign[members] = len(spheres)

    rest = np.flatnonzero(assign == UNASSIGNED)
    if rest.size:
        spheres.append(SphereSeparator(X[rest[0]], RHO_FLOOR))
        assign[rest] = len(spheres)

    return prune(ClusterModel(spheres, assign), config.prune_min_size, X)


def prune(model: ClusterModel, min_size: int, data) -> ClusterModel:
    """Drop classes under ``min_size`` members, reassign them, renumber 1..K."""
    X = _X(data)
    counts = np.array(model.member_counts())
    keep = np.flatnonzero(counts >= min_size)
    if keep.size == 0:
        raise GrowingError("pruning would remove every class", model)
    spheres = [model.spheres[k] for k in keep]
    new_id = np.zeros(model.n_classes + 1, dtype=np.int64)
    new_id[keep + 1] = np.arange(1, keep.size + 1)
    assign = new_id[model.assignments]
    orphans = np.flatnonzero(assign == UNASSIGNED)
    if orphans.size:
        assign[orphans] = nearest_sphere(spheres, X[orphans]) + 1
    return ClusterModel(spheres, assign)
