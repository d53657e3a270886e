"""Command-line surface.

Subcommands: ``adjust`` (apply a procedure to a CSV of p-values),
``schedule`` (print critical values), ``simulate`` (error rate sweep CSV)
and ``counterexample`` (closed-form 2-FDR violation bound). All outputs are
CSV with '#'-prefixed metadata comment lines and a mandatory header row.
Exit codes: 0 success, 1 validation error, 2 runtime/numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from typing import IO, Sequence

from . import engine
from .fk_models import FkModel, equicorrelated_fk, independent_fk, load_empirical_csv
from .schedules import CriticalValueSchedule, make_schedule
from .simulation import (
    SimulationConfig,
    counterexample_bound,
    figure_sweep,
    write_sweep_csv,
)

_MODEL_FREE = ("bh", "lehmann_romano")


class CliError(Exception):
    """Validation failure; maps to exit code 1."""


def _parse_model(spec: str, k: int) -> FkModel:
    if spec == "independent":
        return independent_fk(k)
    if spec.startswith("equicorrelated:"):
        try:
            rho = float(spec.split(":", 1)[1])
        except ValueError as exc:
            raise CliError(f"bad correlation in --model {spec!r}") from exc
        if not (0.0 <= rho < 1.0 or rho == 1.0):
            raise CliError(f"correlation must lie in [0, 1], got {rho}")
        return equicorrelated_fk(k, rho)
    if spec.startswith("empirical:"):
        path = spec.split(":", 1)[1]
        try:
            return load_empirical_csv(path, k)
        except OSError as exc:
            raise CliError(f"cannot read empirical model {path!r}: {exc}") from exc
        except ValueError as exc:
            raise CliError(str(exc)) from exc
    raise CliError(
        f"--model must be independent, equicorrelated:RHO or empirical:PATH, got {spec!r}"
    )


def _build_schedule(args: argparse.Namespace, n: int) -> CriticalValueSchedule:
    model = None
    if args.procedure not in _MODEL_FREE:
        model = _parse_model(args.model, args.k)
    try:
        return make_schedule(
            args.procedure, n=n, k=args.k, alpha=args.alpha, model=model
        )
    except ValueError as exc:
        raise CliError(str(exc)) from exc


def _schedule_comments(schedule: CriticalValueSchedule, model_spec: str | None) -> list[str]:
    lines = [
        f"# procedure={schedule.procedure}",
        f"# k={schedule.k}",
        f"# alpha={schedule.alpha_level}",
        f"# direction={schedule.direction}",
    ]
    if model_spec is not None:
        lines.append(f"# model={model_spec}")
    if schedule.warning is not None:
        lines.append(f"# warning={schedule.warning}")
    return lines


def _read_pvalues(path: str) -> list[float]:
    try:
        with open(path, newline="") as fh:
            raw = fh.read().splitlines()
    except OSError as exc:
        raise CliError(f"cannot read {path!r}: {exc}") from exc
    values: list[float] = []
    for lineno, line in enumerate(raw, start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        if lineno == 1 and text.lower() == "p":
            continue
        try:
            p = float(text)
        except ValueError as exc:
            raise CliError(f"{path}: malformed p-value on row {lineno}: {text!r}") from exc
        if not 0.0 <= p <= 1.0:
            raise CliError(f"{path}: p-value outside [0, 1] on row {lineno}: {p}")
        values.append(p)
    return values


def _open_output(path: str | None) -> IO[str]:
    if path is None or path == "-":
        return sys.stdout
    return open(path, "w", newline="")


def _cmd_adjust(args: argparse.Namespace) -> int:
    values = _read_pvalues(args.input)
    out = _open_output(args.output)
    try:
        if not values:
            print("index,p,critical,rejected", file=out)
            return 0
        schedule = _build_schedule(args, n=len(values))
        sample = engine.sample_from(values)
        outcome = engine.decide(sample, schedule)
        rejected = set(outcome.rejected)
        ranked = sorted(range(len(values)), key=lambda i: (values[i], i))
        critical_of = {idx: schedule.alphas[rank] for rank, idx in enumerate(ranked)}
        model_spec = args.model if args.procedure not in _MODEL_FREE else None
        for line in _schedule_comments(schedule, model_spec):
            print(line, file=out)
        print("index,p,critical,rejected", file=out)
        for i, p in enumerate(values):
            print(
                f"{i + 1},{p!r},{critical_of[i]!r},{str(i in rejected).lower()}",
                file=out,
            )
        return 0
    finally:
        if out is not sys.stdout:
            out.close()


def _cmd_schedule(args: argparse.Namespace) -> int:
    schedule = _build_schedule(args, n=args.n)
    out = _open_output(args.output)
    try:
        model_spec = args.model if args.procedure not in _MODEL_FREE else None
        for line in _schedule_comments(schedule, model_spec):
            print(line, file=out)
        print("index,f_target,alpha", file=out)
        for i, alpha_i in enumerate(schedule.alphas, start=1):
            target = "" if schedule.f_targets is None else repr(schedule.f_targets[i - 1])
            print(f"{i},{target},{alpha_i!r}", file=out)
        return 0
    finally:
        if out is not sys.stdout:
            out.close()


def _parse_grid(spec: str, k: int, n: int) -> list[int]:
    try:
        if ":" in spec:
            parts = [int(v) for v in spec.split(":")]
            if len(parts) != 3:
                raise ValueError("grid must be start:stop:step")
            start, stop, step = parts
            if step <= 0 or stop < start:
                raise ValueError("grid must satisfy start <= stop with step > 0")
            grid = list(range(start, stop + 1, step))
        else:
            grid = [int(v) for v in spec.split(",")]
    except ValueError as exc:
        raise CliError(f"bad --n0-grid {spec!r}: {exc}") from exc
    if not grid:
        raise CliError(f"--n0-grid {spec!r} is empty")
    for n0 in grid:
        if not k <= n0 <= n:
            raise CliError(f"--n0-grid value {n0} outside [k={k}, n={n}]")
    return grid


def _cmd_simulate(args: argparse.Namespace) -> int:
    procedures = tuple(name.strip() for name in args.procedures.split(",") if name.strip())
    if not procedures:
        raise CliError("--procedures must list at least one procedure")
    grid = _parse_grid(args.n0_grid, args.k, args.n)
    try:
        base = SimulationConfig(
            n=args.n,
            n0=grid[0],
            k=args.k,
            alpha=args.alpha,
            rho=args.rho,
            iterations=args.iterations,
            seed=args.seed,
            procedures=procedures,
            mu_alt=args.mu_alt,
            force_nonnull_zero=args.force_nonnull_zero,
        )
        summaries = figure_sweep(base, grid)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    out = _open_output(args.output)
    try:
        write_sweep_csv(summaries, out)
        return 0
    finally:
        if out is not sys.stdout:
            out.close()


def _cmd_counterexample(args: argparse.Namespace) -> int:
    try:
        alpha_crit, bound = counterexample_bound(args.n0, args.n1, args.alpha)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    print(f"alpha_crit = {alpha_crit:.4g}")
    print(f"bound = {bound:.4g}")
    return 0


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--k", type=int, default=1, help="error-rate order parameter")
    parser.add_argument("--alpha", type=float, default=0.05, help="target error level")
    parser.add_argument(
        "--model",
        default="independent",
        help="joint null model: independent, equicorrelated:RHO or empirical:PATH",
    )
    parser.add_argument("--output", default=None, help="output path (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kfdr",
        description="Stepwise multiple-testing procedures controlling k-FWER and k-FDR",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_adjust = sub.add_parser("adjust", help="apply a procedure to a CSV of p-values")
    p_adjust.add_argument("input", help="CSV with one p-value per row (optional header 'p')")
    p_adjust.add_argument("--procedure", default="bh", help="procedure name")
    _add_common_flags(p_adjust)
    p_adjust.set_defaults(func=_cmd_adjust)

    p_sched = sub.add_parser("schedule", help="print a critical-value schedule as CSV")
    p_sched.add_argument("--n", type=int, required=True, help="number of hypotheses")
    p_sched.add_argument("--procedure", default="bh", help="procedure name")
    _add_common_flags(p_sched)
    p_sched.set_defaults(func=_cmd_schedule)

    p_sim = sub.add_parser("simulate", help="run an error-rate sweep and emit CSV")
    p_sim.add_argument("--n", type=int, required=True)
    p_sim.add_argument("--k", type=int, default=2)
    p_sim.add_argument("--alpha", type=float, default=0.05)
    p_sim.add_argument("--rho", type=float, default=0.0)
    p_sim.add_argument("--iterations", type=int, default=5000)
    p_sim.add_argument(
        "--procedures",
        default="gen_bh,gen_hochberg,bh",
        help="comma-separated procedure names",
    )
    p_sim.add_argument(
        "--n0-grid",
        dest="n0_grid",
        required=True,
        help="true-null counts: start:stop:step (stop inclusive when aligned) or comma list",
    )
    p_sim.add_argument("--seed", type=int, default=20070523)
    p_sim.add_argument("--mu-alt", dest="mu_alt", type=float, default=2.0)
    p_sim.add_argument(
        "--force-nonnull-zero",
        dest="force_nonnull_zero",
        action="store_true",
        help="set nonnull p-values to exactly zero (violation study mode)",
    )
    p_sim.add_argument("--output", default=None)
    p_sim.set_defaults(func=_cmd_simulate)

    p_ce = sub.add_parser(
        "counterexample", help="closed-form 2-FDR lower bound for generalized Simes"
    )
    p_ce.add_argument("--n0", type=int, required=True, help="number of true nulls (>= 2)")
    p_ce.add_argument("--n1", type=int, required=True, help="number of false nulls (>= 0)")
    p_ce.add_argument("--alpha", type=float, default=0.05)
    p_ce.set_defaults(func=_cmd_counterexample)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags; report as validation failure.
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - map anything else to runtime failure
        print(f"failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
