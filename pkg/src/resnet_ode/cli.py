"""Command-line entry point: ``python -m resnet_ode --experiment ... --system ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .experiments import EXPERIMENTS, ExperimentConfig, run
from .systems import system_ids


def _arch(text: str) -> tuple[int, int]:
    try:
        layers, width = text.lower().split("x")
        return int(layers), int(width)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LAYERSxWIDTH, got {text!r}") from None


def _ints(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v]


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v]


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    # report bad flags through main's JSON error path instead of exiting
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="resnet-ode", description=__doc__)
    p.add_argument("--config", help="JSON experiment file; flags override its values")
    p.add_argument("--experiment", choices=EXPERIMENTS)
    p.add_argument("--system", dest="system_id", help=f"one of: {', '.join(system_ids())}")
    p.add_argument("--dt", type=float)
    p.add_argument("--pairs", dest="J", type=int)
    p.add_argument("--iterations", dest="K", type=int)
    p.add_argument("--lr", type=float)
    p.add_argument("--lr-decay", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--data-seed", type=int)
    p.add_argument("--runs", type=int)
    p.add_argument("--out", dest="output_dir")
    p.add_argument("--arch", type=_arch, help="e.g. 2x40")
    p.add_argument("--grid-layers", type=_ints)
    p.add_argument("--grid-widths", type=_ints)
    p.add_argument("--schemes", type=lambda s: [v for v in s.split(",") if v])
    p.add_argument("--density-pairs", dest="density_J", type=_ints)
    p.add_argument("--density-arch", type=_arch)
    p.add_argument("--density-scheme", choices=["euler", "rk2", "rk4", "reference"])
    p.add_argument("--budget", dest="update_budget", type=int)
    p.add_argument("--dts", dest="order_dts", type=_floats)
    p.add_argument("--x0", type=_floats)
    p.add_argument("--t0", type=float)
    p.add_argument("--final-time", dest="T", type=float)
    p.add_argument("--thin", type=int)
    p.add_argument("--substeps", type=int)
    p.add_argument("--jobs", type=int)
    p.add_argument("--engine", choices=["auto", "numpy", "numba"])
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    opts = {k: v for k, v in vars(args).items() if k not in ("config", "verbose") and v is not None}
    if args.config:
        return ExperimentConfig.from_file(args.config, **opts)
    missing = [f"--{n}" for n, k in (("experiment", "experiment"), ("system", "system_id"))
               if k not in opts]
    if missing:
        raise ValueError(f"missing required option(s) {', '.join(missing)} (or use --config)")
    return ExperimentConfig(**opts)


def _summary(result):
    if isinstance(result, list):
        return {"rows": len(result)}
    if isinstance(result, dict):
        return {k: (v if isinstance(v, (int, float, str, list)) else getattr(v, "source", str(v)))
                for k, v in result.items()}
    return str(result)


def _fail(exc: Exception) -> int:
    json.dump({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
    sys.stderr.write("\n")
    return 1


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        return _fail(exc)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
        result = run(cfg)
    except Exception as exc:
        return _fail(exc)
    json.dump({"experiment": cfg.experiment, "output_dir": cfg.output_dir,
               "result": _summary(result)}, sys.stdout)
    sys.stdout.write("\n")
    return 0
