"""Command-line entry point: ``gpindex {compute,ci,theory,simulate,verify}``.

Exit codes: 0 on success, 2 for usage errors (bad flags, bad values), 1 when
the computation itself fails.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass

import numpy as np

from .asymptotics import limit_law
from .engine import builtin_config, evaluate_gpi_sorted
from .inference import bootstrap_ci, plugin_ci
from .io import read_incomes_csv, write_report
from .models import DistributionModel, draw_sorted, parse_model_spec
from .montecarlo import SimulationPlan, run_simulation
from .quadrature import QuadratureError
from .sample import (
    GPI_FAMILY,
    INDEX_NAMES,
    IndexId,
    PovertyContext,
    closed_form_from_sorted,
    count_poor,
)

__all__ = ["RunConfig", "build_parser", "parse_config", "run_cli", "main"]

SUBCOMMANDS = ("compute", "ci", "theory", "simulate", "verify")
VERIFY_TOL = 1e-10


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    input: str | None
    model: DistributionModel | None
    Z: float | None
    y0: float
    indices: tuple
    n: int | None
    reps: int | None
    seed: int
    method: str | None
    level: float
    bootstrap_reps: int
    out: str | None
    format: str


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gpindex", description="Poverty indices, their limit laws and Monte Carlo checks.")
    sub = parser.add_subparsers(dest="subcommand", metavar="{" + ",".join(SUBCOMMANDS) + "}")

    def common(p):
        p.add_argument("--line", type=float, help="poverty line Z")
        p.add_argument("--y0", type=float, default=0.0, help="lower support endpoint (default 0)")
        p.add_argument("--index", default="fgt", help=f"one of {', '.join(INDEX_NAMES)} or 'all'")
        p.add_argument("--alpha", type=float)
        p.add_argument("--k", type=float)
        p.add_argument("--out", help="write the report here instead of stdout")
        p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("compute", help="index value(s) for a data file")
    common(p)
    p.add_argument("--input", required=True)

    p = sub.add_parser("ci", help="confidence interval for a data file")
    common(p)
    p.add_argument("--input", required=True)
    p.add_argument("--method", choices=("plugin", "bootstrap"), default="plugin")
    p.add_argument("--level", type=float, default=0.95)
    p.add_argument("--bootstrap-reps", type=int, default=999)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("theory", help="asymptotic center and variance under a model")
    common(p)
    p.add_argument("--model", required=True, help="e.g. uniform:0,1 or pareto:1,2")

    p = sub.add_parser("simulate", help="Monte Carlo check of the limit law")
    common(p)
    p.add_argument("--model", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--reps", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--method", choices=("plugin", "bootstrap"), default=None,
                   help="also audit interval coverage")
    p.add_argument("--level", type=float, default=0.95)
    p.add_argument("--bootstrap-reps", type=int, default=199)

    p = sub.add_parser("verify", help="generic evaluator against closed forms on generated samples")
    common(p)
    p.add_argument("--model", default="uniform:0,1")
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    return parser


def _indices(args, allowed) -> tuple:
    if args.index == "all":
        if args.alpha is not None or args.k is not None:
            raise UsageError("--alpha/--k cannot be combined with --index all")
        return tuple(IndexId(name) for name in allowed)
    try:
        idx = IndexId(args.index, alpha=args.alpha, k=args.k)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.alpha is not None and idx.alpha is None:
        raise UsageError(f"--alpha does not apply to {idx.name}")
    if args.k is not None and idx.name != "kakwani":
        raise UsageError(f"--k does not apply to {idx.name}")
    if idx.name not in allowed:
        raise UsageError(f"{idx} is not available for this subcommand")
    return (idx,)


def parse_config(argv) -> RunConfig:
    """Parse and validate ``argv``; raises :class:`UsageError` on bad input."""
    args = build_parser().parse_args(argv)
    if args.subcommand is None:
        raise UsageError(f"a subcommand is required: {', '.join(SUBCOMMANDS)}")
    cmd = args.subcommand
    if args.line is None:
        raise UsageError("--line is required")
    if not math.isfinite(args.line) or not math.isfinite(args.y0) or args.y0 < 0 or args.line <= args.y0:
        raise UsageError(f"need 0 <= y0 < line, got y0={args.y0}, line={args.line}")
    allowed = {
        "compute": INDEX_NAMES[1:],
        "ci": INDEX_NAMES[1:] if getattr(args, "method", None) == "bootstrap" else
        ("fgt", "sen", "kakwani", "shorrocks", "thon", "chu", "ray"),
        "theory": ("fgt", "sen", "kakwani", "shorrocks", "thon", "chu", "ray"),
        "simulate": ("fgt", "sen", "kakwani", "shorrocks", "thon", "chu", "ray"),
        "verify": GPI_FAMILY,
    }[cmd]
    if cmd in ("ci", "simulate") and args.index == "all":
        raise UsageError(f"{cmd} takes a single index")
    indices = _indices(args, allowed)
    model = None
    if getattr(args, "model", None) is not None:
        try:
            model = parse_model_spec(args.model)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    level = getattr(args, "level", 0.95)
    if not 0 < level < 1:
        raise UsageError(f"--level must lie in (0, 1), got {level}")
    n, reps = getattr(args, "n", None), getattr(args, "reps", None)
    if cmd == "simulate":
        if n < 50 or reps < 100:
            raise UsageError("simulate needs --n >= 50 and --reps >= 100")
    if cmd == "verify" and (n < 1 or reps < 1):
        raise UsageError("verify needs positive --n and --reps")
    seed = getattr(args, "seed", 0)
    if not 0 <= seed < 2 ** 64:
        raise UsageError("--seed must fit in 64 unsigned bits")
    boot = getattr(args, "bootstrap_reps", 999)
    if boot < 100 and (getattr(args, "method", None) == "bootstrap"):
        raise UsageError("--bootstrap-reps must be at least 100")
    return RunConfig(
        subcommand=cmd,
        input=getattr(args, "input", None),
        model=model,
        Z=args.line,
        y0=args.y0,
        indices=indices,
        n=n,
        reps=reps,
        seed=seed,
        method=getattr(args, "method", None),
        level=level,
        bootstrap_reps=boot,
        out=args.out,
        format=args.format,
    )


def _compute(cfg: RunConfig) -> dict:
    sample = read_incomes_csv(cfg.input, cfg.y0)
    ctx = PovertyContext(cfg.Z, cfg.y0)
    report = {}
    for idx in cfg.indices:
        report[str(idx)] = closed_form_from_sorted(idx, sample.incomes, ctx.Z)
    report["n"] = sample.n
    report["Q"] = count_poor(sample, ctx)
    return report


def _ci(cfg: RunConfig) -> dict:
    sample = read_incomes_csv(cfg.input, cfg.y0)
    ctx = PovertyContext(cfg.Z, cfg.y0)
    (idx,) = cfg.indices
    if cfg.method == "plugin":
        ci = plugin_ci(idx, sample, ctx, cfg.level)
    else:
        ci = bootstrap_ci(idx, sample, ctx, cfg.level, B=cfg.bootstrap_reps, seed=cfg.seed)
    return {"index": str(idx), **ci.to_dict()}


def _theory(cfg: RunConfig) -> dict:
    if len(cfg.indices) == 1:
        return limit_law(cfg.indices[0], cfg.model, cfg.Z).to_dict()
    report = {}
    for idx in cfg.indices:
        for key, value in limit_law(idx, cfg.model, cfg.Z).to_dict().items():
            report[f"{idx}.{key}"] = value
    return report


def _simulate(cfg: RunConfig) -> dict:
    (idx,) = cfg.indices
    plan = SimulationPlan(cfg.model, cfg.Z, idx, cfg.n, cfg.reps, cfg.seed, ci_method=cfg.method,
                          level=cfg.level, bootstrap_reps=cfg.bootstrap_reps)
    return run_simulation(plan).to_dict()


def _verify(cfg: RunConfig) -> dict:
    worst = 0.0
    mismatches = 0
    for idx in cfg.indices:
        gpi = builtin_config(idx)
        for r in range(1, cfg.reps + 1):
            y = draw_sorted(cfg.model, cfg.n, np.random.default_rng([cfg.seed, r]))
            a = closed_form_from_sorted(idx, y, cfg.Z)
            b = evaluate_gpi_sorted(gpi, y, cfg.Z)
            dev = abs(a - b) / max(abs(a), 1e-300) if a != b else 0.0
            worst = max(worst, dev)
            mismatches += dev > VERIFY_TOL
    return {
        "checked": len(cfg.indices) * cfg.reps,
        "indices": " ".join(str(i) for i in cfg.indices),
        "max_rel_deviation": worst,
        "mismatches": int(mismatches),
    }


_HANDLERS = {"compute": _compute, "ci": _ci, "theory": _theory, "simulate": _simulate, "verify": _verify}


def run_cli(argv=None, stdout=None, stderr=None):
    """Run one command; returns ``(exit_code, report_dict_or_None)``."""
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        cfg = parse_config(argv)
    except UsageError as exc:
        stderr.write(f"gpindex: usage error: {exc}\n")
        stderr.write(build_parser().format_usage())
        return 2, None
    except SystemExit as exc:  # --help
        return (0 if exc.code in (None, 0) else 2), None
    try:
        report = _HANDLERS[cfg.subcommand](cfg)
        text = write_report(report, cfg.format, cfg.out)
    except (ValueError, ArithmeticError, QuadratureError, OSError) as exc:
        stderr.write(f"gpindex: error: {exc}\n")
        return 1, None
    if cfg.out is None:
        stdout.write(text)
    if cfg.subcommand == "verify" and report["mismatches"]:
        stderr.write(f"gpindex: {report['mismatches']} engine/closed-form mismatches\n")
        return 1, report
    return 0, report


def main(argv=None) -> int:
    return run_cli(argv)[0]


if __name__ == "__main__":
    sys.exit(main())
