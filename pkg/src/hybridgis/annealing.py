"""Two-temperature deterministic annealing loop shared by the trainers.

Each epoch takes one full-batch gradient step at the current pair of
temperatures (T for patterns not yet learned, T_L = ratio * T for learned
ones), projects the parameters back onto their feasible set, then cools
T by a fixed decrement. Once T reaches its floor a final descent runs at
T_L = T with step halving, so the cost never goes up in that phase.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace
from typing import Callable

import numpy as np

FINAL_TOL = 1e-8
MAX_HALVINGS = 30


@dataclass(frozen=True)
class AnnealingConfig:
    learning_rate: float = 0.02
    t_initial: float = 10.0
    t_ratio: float = 0.3
    delta_t: float = 0.05
    t_min: float = 0.01
    max_epochs: int = 1000

    def __post_init__(self):
        for name in ("learning_rate", "t_initial", "t_ratio", "delta_t", "t_min"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")
        if self.t_ratio > 1:
            raise ValueError("t_ratio must be <= 1")
        if not self.t_min < self.t_initial:
            raise ValueError("t_min must be below t_initial")
        if self.max_epochs < 1:
            raise ValueError("max_epochs must be >= 1")

    def to_dict(self) -> dict:
        return asdict(self)

    def scaled(self, length: float) -> "AnnealingConfig":
        """Same schedule for data measured in units of ``length``.

        Stabilities scale with length, so temperatures do too; the cost
        is dimensionless, so the learning rate scales with length squared.
        """
        return replace(
            self,
            learning_rate=self.learning_rate * length**2,
            t_initial=self.t_initial * length,
            delta_t=self.delta_t * length,
            t_min=self.t_min * length,
        )


@dataclass
class TrainDiagnostics:
    temperatures: list[float] = field(default_factory=list)
    costs: list[float] = field(default_factory=list)
    errors: list[int] = field(default_factory=list)
    final_phase_start: int | None = None
    best_epoch: int = 0
    stabilities: np.ndarray | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def epochs(self) -> int:
        return len(self.temperatures)

    def summary(self) -> dict:
        return {
            "epochs": self.epochs,
            "best_epoch": self.best_epoch,
            "final_phase_start": self.final_phase_start,
            "final_temperature": self.temperatures[-1] if self.temperatures else None,
            "best_errors": self.errors[self.best_epoch - 1] if self.best_epoch else None,
            "notes": list(self.notes),
        }


class TrainingError(RuntimeError):
    def __init__(self, message: str, diagnostics: TrainDiagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


def anneal(
    theta: np.ndarray,
    cost: Callable[[np.ndarray, float, float], float],
    grad: Callable[[np.ndarray, float, float], np.ndarray],
    project: Callable[[np.ndarray], np.ndarray],
    n_errors: Callable[[np.ndarray], int],
    config: AnnealingConfig,
    diag: TrainDiagnostics | None = None,
    on_epoch: Callable[[np.ndarray, TrainDiagnostics], None] | None = None,
) -> tuple[np.ndarray, TrainDiagnostics]:
    """Run the schedule from ``theta``; return the best snapshot.

    Best means fewest training errors, then lowest recorded cost. The
    starting point counts as epoch 0.
    """
    diag = diag or TrainDiagnostics()
    T = config.t_initial
    t_learned = config.t_ratio * T
    best = (n_errors(theta), cost(theta, T, t_learned))
    best_theta = theta.copy()
    final = False
    e_prev = None
    lr = config.learning_rate

    for epoch in range(1, config.max_epochs + 1):
        if not final:
            step = theta - config.learning_rate * grad(theta, T, t_learned)
            theta = project(step)
            e = cost(theta, T, t_learned)
        else:
            # T_L = T; halve the step until the cost does not increase
            g = grad(theta, T, T)
            lr = min(config.learning_rate, 2.0 * lr)
            for _ in range(MAX_HALVINGS):
                cand = project(theta - lr * g)
                e = cost(cand, T, T)
                if e <= e_prev:
                    break
                lr *= 0.5
            else:
                cand, e = theta, e_prev
            theta = cand

        errs = n_errors(theta)
        diag.temperatures.append(T)
        diag.costs.append(e)
        diag.errors.append(errs)
        if not np.isfinite(e) or not np.all(np.isfinite(theta)):
            raise TrainingError(f"non-finite cost at epoch {epoch}", diag)
        if on_epoch is not None:
            on_epoch(theta, diag)
        if (errs, e) < best:
            best = (errs, e)
            best_theta = theta.copy()
            diag.best_epoch = epoch

        if final:
            if abs(e_prev - e) < FINAL_TOL:
                break
            e_prev = e
        else:
            T = max(T - config.delta_t, config.t_min)
            t_learned = config.t_ratio * T
            if T <= config.t_min:
                final = True
                diag.final_phase_start = epoch + 1
                e_prev = cost(theta, T, T)
    return best_theta, diag


def sech2(x: np.ndarray) -> np.ndarray:
    return 1.0 / np.cosh(np.clip(x, -300.0, 300.0)) ** 2


def window_cost(gamma: np.ndarray, t_unlearned: float, t_learned: float | None = None) -> float:
    """1/2 sum (1 - tanh(gamma / 2T)), learned patterns (gamma > 0) at T_L."""
    temps = _temps(gamma, t_unlearned, t_learned)
    return 0.5 * float(np.sum(1.0 - np.tanh(gamma / (2.0 * temps))))


def window_slope(gamma: np.ndarray, t_unlearned: float, t_learned: float | None = None) -> np.ndarray:
    """dE/dgamma per pattern: -sech^2(gamma / 2T) / 4T."""
    temps = _temps(gamma, t_unlearned, t_learned)
    return -sech2(gamma / (2.0 * temps)) / (4.0 * temps)


def _temps(gamma, t_unlearned, t_learned):
    if t_learned is None:
        return np.full_like(gamma, t_unlearned, dtype=float)
    return np.where(gamma > 0, t_learned, t_unlearned)
