"""Command line driver: stats, train, eval, generate.

Exit codes: 0 success, 1 runtime failure, 2 configuration or usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .annealing import TrainingError
from .config import MODES, ConfigError, RunConfig, load_config, parse_config
from .dataset import (
    BARREN,
    DatasetError,
    class_mean_diff,
    generate_synthetic,
    load_csv,
    load_schema,
    save_schema,
    select_attributes,
    standardize,
    write_csv,
)
from .evaluation import export_curve, run_learning_curve
from .fcm import FcmError
from .growing import GrowingError, grow_clusters
from .hybrid import HybridError, hybrid_fit, hybrid_predict, map_clusters_to_labels
from .minimerror import plane_document, train_minimerror
from .sphere import SphereSeparator, train_minimerror_s

log = logging.getLogger("hybridgis")


def _dump(doc: dict, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _load_data(cfg: RunConfig):
    cfg.require("data", "schema")
    data = load_csv(cfg.data, load_schema(cfg.schema))
    if cfg.preset:
        data = select_attributes(data, cfg.preset)
    return data


def _config(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else parse_config({})
    overrides = {}
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "preset", None):
        overrides["preset"] = args.preset
    if getattr(args, "mode", None):
        overrides["mode"] = args.mode
    if getattr(args, "out", None):
        overrides["out"] = Path(args.out)
    for key in ("data", "schema"):
        if getattr(args, key, None):
            overrides[key] = Path(getattr(args, key))
    return replace(cfg, **overrides)


def cmd_stats(args) -> int:
    cfg = _config(args)
    data = _load_data(cfg)
    values = class_mean_diff(data)
    width = max(len(n) for n in data.schema.names)
    for name, v in zip(data.schema.names, values):
        print(f"{name:<{width}}  {float(v)!r}")
    return 0


def train_model(cfg: RunConfig) -> dict:
    """Train in ``cfg.mode`` and return the model document."""
    data = _load_data(cfg)
    params = None
    if cfg.standardize:
        data, params = standardize(data)
    doc: dict = {"mode": cfg.mode, "seed": cfg.seed, "attributes": data.schema.names}
    doc["standardization"] = params.to_dict() if params else None

    if cfg.mode == "plane":
        plane, diag = train_minimerror(data, cfg.annealing, seed=cfg.seed)
        doc["model"] = plane_document(plane, data, cfg.annealing, diag)
    elif cfg.mode == "sphere":
        # barren (-1) is the inside class; start from its mean and extent
        y = data.y
        if y is None:
            raise DatasetError("labels required")
        inside = data.X[y == BARREN]
        if inside.shape[0] == 0:
            raise DatasetError("sphere mode needs barren (-1) patterns")
        center = inside.mean(axis=0)
        radius = max(float(np.sqrt(np.max(np.sum((inside - center) ** 2, axis=1)))), 1e-6)
        sphere, diag = train_minimerror_s(data, SphereSeparator(center, radius), cfg.annealing)
        doc["model"] = {
            **sphere.to_dict(),
            "config": cfg.annealing.to_dict(),
            "diagnostics": diag.summary(),
        }
    elif cfg.mode == "grow":
        model = grow_clusters(data.unlabeled(), replace(cfg.growing, seed=cfg.seed))
        doc["model"] = model.to_dict()
    else:
        fcm = replace(cfg.fcm, c=cfg.c, seed=cfg.seed)
        model = hybrid_fit(data.unlabeled(), cfg.c, fcm, cfg.annealing)
        if data.y is not None:
            model.mapping, unmapped = map_clusters_to_labels(
                hybrid_predict(model, data.X), data.y, cfg.c
            )
            doc["unmapped_clusters"] = unmapped
        doc["model"] = model.to_dict()
    return doc


def cmd_train(args) -> int:
    cfg = _config(args)
    if cfg.mode not in MODES:
        raise ConfigError(f"mode must be one of {', '.join(MODES)}")
    out = cfg.out or Path("model.json")
    doc = train_model(cfg)
    _dump(doc, out)
    log.info("wrote %s model to %s", cfg.mode, out)
    return 0


def cmd_eval(args) -> int:
    cfg = _config(args)
    data = _load_data(cfg)
    report = run_learning_curve(
        data, cfg.eval.fractions, cfg.eval.n_trials, cfg.seed, cfg.pipeline()
    )
    out = cfg.out or Path("eval_out")
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(report.to_json() + "\n", encoding="utf-8")
    export_curve(report, out / "curve.csv")
    for row in report.aggregates():
        log.info(
            "fraction %.2f: accuracy %.4f +- %.4f (%d ok, %d failed)",
            row["fraction"], row["mean_accuracy"], row["std_accuracy"],
            row["n_trials"], row["n_failed"],
        )
    return 0


def cmd_generate(args) -> int:
    cfg = _config(args)
    g = cfg.generate
    n = g.n_per_class if isinstance(g.n_per_class, int) else tuple(g.n_per_class)
    data = generate_synthetic(n, g.n_quant, g.n_qual, g.separation, cfg.seed, g.n_categories)
    out = cfg.out or Path("synthetic")
    out.mkdir(parents=True, exist_ok=True)
    write_csv(data, out / "data.csv")
    save_schema(data.schema, out / "schema.json")
    log.info("wrote %d patterns to %s", len(data), out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hybridgis", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, *extra):
        sp.add_argument("--config", help="JSON run configuration")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--preset", help="attribute subset I..XI")
        sp.add_argument("--out")
        for flag in extra:
            sp.add_argument(flag)

    s = sub.add_parser("stats", help="per-attribute squared class-mean difference")
    common(s, "--data", "--schema")
    s.set_defaults(func=cmd_stats)

    s = sub.add_parser("train", help="train a plane, sphere, growing or hybrid model")
    common(s, "--data", "--schema")
    s.add_argument("--mode", choices=MODES)
    s.set_defaults(func=cmd_train)

    s = sub.add_parser("eval", help="learning curve over random holdout splits")
    common(s, "--data", "--schema")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("generate", help="write a synthetic deposit/barren dataset")
    common(s)
    s.set_defaults(func=cmd_generate)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DatasetError, FcmError, TrainingError, GrowingError, HybridError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
