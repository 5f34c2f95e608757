"""Single-document run configuration for the command line driver."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any

from .annealing import AnnealingConfig
from .evaluation import DEFAULT_FRACTIONS, PipelineConfig
from .fcm import FcmConfig
from .growing import GROWING_SCHEDULE, GrowingConfig

MODES = ("plane", "sphere", "grow", "hybrid")


class ConfigError(ValueError):
    """Invalid or incomplete configuration (exit code 2)."""


def _build(cls, d: Any, where: str):
    if d is None:
        return cls()
    if not isinstance(d, dict):
        raise ConfigError(f"{where}: expected an object")
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(d) - known)
    if unknown:
        raise ConfigError(f"{where}: unknown key(s) {', '.join(unknown)}")
    try:
        return cls(**d)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc


@dataclass(frozen=True)
class GenerateSection:
    n_per_class: int | list[int] = 200
    n_quant: int = 17
    n_qual: int = 8
    separation: float = 4.0
    n_categories: int = 3


@dataclass(frozen=True)
class EvalSection:
    fractions: list[float] = field(default_factory=lambda: list(DEFAULT_FRACTIONS))
    n_trials: int = 100
    standardize: str = "train"


@dataclass(frozen=True)
class RunConfig:
    data: Path | None = None
    schema: Path | None = None
    preset: str | None = None
    seed: int = 0
    mode: str = "hybrid"
    c: int = 2
    standardize: bool = True
    out: Path | None = None
    fcm: FcmConfig = field(default_factory=FcmConfig)
    annealing: AnnealingConfig = field(default_factory=AnnealingConfig)
    growing: GrowingConfig = field(default_factory=GrowingConfig)
    eval: EvalSection = field(default_factory=EvalSection)
    generate: GenerateSection = field(default_factory=GenerateSection)

    def require(self, *keys: str) -> None:
        for k in keys:
            if getattr(self, k) is None:
                raise ConfigError(f"missing config key: {k}")

    def pipeline(self) -> PipelineConfig:
        return PipelineConfig(self.c, self.fcm, self.annealing, self.eval.standardize)


_TOP_KEYS = {f.name for f in fields(RunConfig)}


def parse_config(d: dict, base_dir: Path | None = None) -> RunConfig:
    """Validate a config mapping; relative paths resolve against ``base_dir``."""
    if not isinstance(d, dict):
        raise ConfigError("config must be a JSON object")
    unknown = sorted(set(d) - _TOP_KEYS)
    if unknown:
        raise ConfigError(f"unknown key(s) {', '.join(unknown)}")
    base_dir = base_dir or Path(".")

    def path(key):
        v = d.get(key)
        if v is None:
            return None
        p = Path(v)
        return p if p.is_absolute() else base_dir / p

    mode = d.get("mode", "hybrid")
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {', '.join(MODES)}")

    growing = dict(d.get("growing") or {})
    if "annealing" in growing:
        growing["annealing"] = _build(AnnealingConfig, growing["annealing"], "growing.annealing")
    else:
        growing["annealing"] = GROWING_SCHEDULE

    cfg = RunConfig(
        data=path("data"),
        schema=path("schema"),
        preset=d.get("preset"),
        seed=int(d.get("seed", 0)),
        mode=mode,
        c=int(d.get("c", 2)),
        standardize=bool(d.get("standardize", True)),
        out=path("out"),
        fcm=_build(FcmConfig, d.get("fcm"), "fcm"),
        annealing=_build(AnnealingConfig, d.get("annealing"), "annealing"),
        growing=_build(GrowingConfig, growing, "growing"),
        eval=_build(EvalSection, d.get("eval"), "eval"),
        generate=_build(GenerateSection, d.get("generate"), "generate"),
    )
    for key in ("data", "schema"):
        p = getattr(cfg, key)
        if p is not None and not p.exists():
            raise ConfigError(f"{key}: file not found: {p}")
    return cfg


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as fh:
            d = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return parse_config(d, path.parent)
