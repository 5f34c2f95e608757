"""Fuzzy c-means: objective, alternating updates and the fit loop."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .dataset import Dataset
from .rng import XorShift64Star

RANDOM_INIT = "random"
HARD_INIT = "hard"


class FcmError(RuntimeError):
    """Degenerate clustering state (e.g. a class losing all mass)."""

    def __init__(self, message: str, iteration: int | None = None):
        super().__init__(message if iteration is None else f"iteration {iteration}: {message}")
        self.iteration = iteration


@dataclass(frozen=True)
class FcmConfig:
    c: int = 2
    phi: float = 2.0
    stop_eps: float = 1e-3
    max_iter: int = 300
    init: str = RANDOM_INIT
    seed: int = 0

    def __post_init__(self):
        if self.c < 2:
            raise ValueError("c must be >= 2")
        if not self.phi > 1.0:
            raise ValueError("phi must be > 1")
        if not self.stop_eps > 0:
            raise ValueError("stop_eps must be > 0")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.init not in (RANDOM_INIT, HARD_INIT):
            raise ValueError(f"unknown init {self.init!r}")


@dataclass
class FcmModel:
    centroids: np.ndarray
    phi: float
    final_objective: float
    iterations: int
    converged: bool
    # J after every half step: J(C1, M0), J(C1, M1), J(C2, M1), ...
    objective_trace: list[float] = field(default_factory=list)

    @property
    def c(self) -> int:
        return self.centroids.shape[0]

    def to_dict(self) -> dict:
        return {
            "centroids": self.centroids.tolist(),
            "phi": self.phi,
            "c": self.c,
            "final_objective": self.final_objective,
            "iterations": self.iterations,
            "converged": self.converged,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FcmModel":
        return cls(
            np.asarray(d["centroids"], dtype=float),
            float(d["phi"]),
            float(d["final_objective"]),
            int(d["iterations"]),
            bool(d["converged"]),
        )


def _X(data) -> np.ndarray:
    return data.X if isinstance(data, Dataset) else np.asarray(data, dtype=float)


def squared_distances(X: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    centroids = np.asarray(centroids, dtype=float)
    if X.ndim != 2 or centroids.ndim != 2 or X.shape[1] != centroids.shape[1]:
        raise ValueError(f"dimension mismatch: patterns {X.shape}, centroids {centroids.shape}")
    diff = X[:, None, :] - centroids[None, :, :]
    return np.einsum("ikn,ikn->ik", diff, diff)


def fcm_objective(data, centroids: np.ndarray, m: np.ndarray, phi: float) -> float:
    """J = sum_i sum_k m_ik^phi ||x_i - c_k||^2."""
    d2 = squared_distances(_X(data), centroids)
    m = np.asarray(m, dtype=float)
    if m.shape != d2.shape:
        raise ValueError(f"membership shape {m.shape} != {d2.shape}")
    return float(np.sum(m**phi * d2))


def update_memberships(data, centroids: np.ndarray, phi: float) -> np.ndarray:
    """Optimal memberships for fixed centroids.

    m_ik = 1 / sum_j (d_ik / d_ij)^(2/(phi-1)), evaluated in log space.
    A pattern sitting on one or more centroids gets its full membership
    split equally between them.
    """
    d2 = squared_distances(_X(data), centroids)
    zero = d2 == 0.0
    with np.errstate(divide="ignore"):
        logw = -np.log(d2) / (phi - 1.0)
    hit = zero.any(axis=1)
    logw[hit] = 0.0
    logw -= logw.max(axis=1, keepdims=True)
    w = np.exp(logw)
    w[hit] = zero[hit].astype(float)
    return w / w.sum(axis=1, keepdims=True)


def update_centroids(data, m: np.ndarray, phi: float, iteration: int | None = None) -> np.ndarray:
    """c_k = sum_i m_ik^phi x_i / sum_i m_ik^phi."""
    X = _X(data)
    um = np.asarray(m, dtype=float) ** phi
    mass = um.sum(axis=0)
    if np.any(mass <= 0.0):
        k = int(np.flatnonzero(mass <= 0.0)[0])
        raise FcmError(f"class {k} has zero membership mass", iteration)
    return (um.T @ X) / mass[:, None]


def harden(m: np.ndarray) -> np.ndarray:
    """Row-wise argmax; ties go to the smallest class index."""
    return np.argmax(np.asarray(m), axis=1)


def random_memberships(n: int, c: int, seed: int) -> np.ndarray:
    rng = XorShift64Star(seed)
    u = rng.uniform((n, c)) + 1e-12
    return u / u.sum(axis=1, keepdims=True)


def fcm_fit(
    data,
    config: FcmConfig,
    init_labels: np.ndarray | None = None,
    init_memberships: np.ndarray | None = None,
) -> tuple[FcmModel, np.ndarray]:
    """Alternate centroid and membership updates until max|M_t - M_{t-1}| < stop_eps.

    The starting matrix is seeded random rows, a hard partition from
    ``init_labels`` (``config.init == "hard"``), or an explicit
    ``init_memberships``.
    """
    X = _X(data)
    n, c = X.shape[0], config.c
    if not n > c:
        raise ValueError(f"need more patterns than classes (n={n}, c={c})")

    if init_memberships is not None:
        M = np.asarray(init_memberships, dtype=float)
        if M.shape != (n, c):
            raise ValueError(f"init_memberships shape {M.shape} != {(n, c)}")
        M = M / M.sum(axis=1, keepdims=True)
    elif config.init == HARD_INIT:
        if init_labels is None:
            raise ValueError("hard init needs init_labels")
        labels = np.asarray(init_labels, dtype=np.int64)
        if labels.shape != (n,) or labels.min() < 0 or labels.max() >= c:
            raise ValueError("init_labels must be n class indices in 0..c-1")
        M = np.zeros((n, c))
        M[np.arange(n), labels] = 1.0
    else:
        M = random_memberships(n, c, config.seed)

    trace: list[float] = []
    converged = False
    C = None
    t = 0
    for t in range(1, config.max_iter + 1):
        C = update_centroids(X, M, config.phi, iteration=t)
        trace.append(fcm_objective(X, C, M, config.phi))
        M_new = update_memberships(X, C, config.phi)
        trace.append(fcm_objective(X, C, M_new, config.phi))
        delta = float(np.max(np.abs(M_new - M)))
        M = M_new
        if delta < config.stop_eps:
            converged = True
            break

    model = FcmModel(C, config.phi, trace[-1], t, converged, trace)
    return model, M


def config_to_dict(config: FcmConfig) -> dict:
    return asdict(config)
