"""Fuzzy c-means labelling followed by one Minimerror-S sphere per class."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .annealing import AnnealingConfig
from .dataset import BARREN, DEPOSIT, LABEL_NAMES, Dataset, from_arrays
from .fcm import FcmConfig, FcmModel, fcm_fit, harden
from .sphere import SphereSeparator, nearest_sphere, train_minimerror_s

RHO_FLOOR = 1e-6


class HybridError(RuntimeError):
    pass


@dataclass
class HybridModel:
    spheres: list[SphereSeparator]
    fcm: FcmModel
    class_names: list[str] | None = None
    # cluster index -> +1 / -1, filled by map_clusters_to_labels
    mapping: dict[int, int] = field(default_factory=dict)

    @property
    def centroids(self) -> np.ndarray:
        return self.fcm.centroids

    @property
    def c(self) -> int:
        return len(self.spheres)

    def to_dict(self) -> dict:
        return {
            "fcm": self.fcm.to_dict(),
            "spheres": [s.to_dict() for s in self.spheres],
            "mapping": {str(k): LABEL_NAMES[v] for k, v in sorted(self.mapping.items())},
            "class_names": self.class_names,
        }


def _X(data) -> np.ndarray:
    return data.X if isinstance(data, Dataset) else np.asarray(data, dtype=float)


def hybrid_fit(
    data,
    c: int = 2,
    fcm_config: FcmConfig | None = None,
    annealing: AnnealingConfig | None = None,
) -> HybridModel:
    """Cluster with FCM, then fit a one-vs-rest sphere around each hardened class.

    Sphere k starts at centroid k with the radius reaching its farthest
    hardened member. Labels on ``data`` are ignored.
    """
    X = _X(data)
    fcm_config = replace(fcm_config or FcmConfig(), c=c)
    if not X.shape[0] > c:
        raise ValueError(f"need more patterns than classes (n={X.shape[0]}, c={c})")
    fcm_model, m = fcm_fit(X, fcm_config)
    hard = harden(m)

    spheres = []
    for k in range(c):
        members = X[hard == k]
        if members.shape[0] == 0:
            raise HybridError(f"class {k} has no hardened members")
        center = fcm_model.centroids[k]
        radius = max(float(np.sqrt(np.max(np.sum((members - center) ** 2, axis=1)))), RHO_FLOOR)
        tau = np.where(hard == k, -1, 1)
        sphere, _ = train_minimerror_s(
            from_arrays(X, tau), SphereSeparator(center, radius), annealing
        )
        spheres.append(sphere)
    return HybridModel(spheres, fcm_model)


def hybrid_predict(model: HybridModel, X: np.ndarray) -> np.ndarray | int:
    """Class index with the largest inside score; ties to the smallest index."""
    X = np.asarray(X, dtype=float)
    out = nearest_sphere(model.spheres, np.atleast_2d(X))
    return int(out[0]) if X.ndim == 1 else out


def map_clusters_to_labels(
    predicted: np.ndarray, truth: np.ndarray, n_clusters: int | None = None
) -> tuple[dict[int, int], list[int]]:
    """Majority truth label per cluster (ties to deposit).

    Returns the mapping and the clusters that received no patterns.
    """
    predicted = np.asarray(predicted)
    truth = np.asarray(truth)
    if predicted.shape != truth.shape or predicted.size == 0:
        raise ValueError("predicted and truth must be non-empty and of equal length")
    n_clusters = n_clusters if n_clusters is not None else int(predicted.max()) + 1
    mapping, unmapped = {}, []
    for k in range(n_clusters):
        t = truth[predicted == k]
        if t.size == 0:
            unmapped.append(k)
            continue
        mapping[k] = DEPOSIT if np.sum(t == DEPOSIT) >= np.sum(t == BARREN) else BARREN
    return mapping, unmapped


def predict_labels(model: HybridModel, X: np.ndarray) -> np.ndarray:
    """+-1 labels through ``model.mapping``; unmapped clusters count as deposit."""
    clusters = np.atleast_1d(hybrid_predict(model, np.atleast_2d(X)))
    return np.array([model.mapping.get(int(k), DEPOSIT) for k in clusters], dtype=np.int64)
