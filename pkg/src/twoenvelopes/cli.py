"""Command-line front end.

    twoenvelopes analyze --p 0.5
    twoenvelopes table1 [--out table1.csv]
    twoenvelopes cv
    twoenvelopes density --x-hat 300 --a 550 [--grid 400] --out density.csv
    twoenvelopes simulate --config experiment.cfg [--out rounds.csv]

Exit codes: 0 success, 2 usage or config error, 3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from . import analytics
from .beliefs import (
    CV_CLOSED_FORM,
    NormalBelief,
    cv_residual,
    density,
    intermediate_amount,
    posterior,
    solve_cv,
)
from .numerics import TAIL_SIGMAS, BracketError, QuadratureError
from .simulation import (
    OrganizerModel,
    correct_probability_analytic,
    parse_organizer,
    run_experiment,
)
from .strategy import IAS, Strategy, parse_strategy

EXIT_USAGE = 2
EXIT_NUMERICAL = 3


class UsageError(Exception):
    pass


def _fmt(v: float) -> str:
    return f"{v:.12g}"


def _fmt_exact(v: float) -> str:
    # 17 significant digits round-trip any double.
    return f"{v:.17g}"


# ---------------------------------------------------------------------------
# Experiment config
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentConfig:
    organizer: OrganizerModel
    opener_strategy: Strategy
    observer_strategy: Strategy
    rounds: int
    seed: int
    workers: int = 1
    output_path: str | None = None


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise ValueError(f"must be a positive integer, got {value}")
    return value


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise ValueError(f"must be a 64-bit unsigned integer, got {value}")
    return value


_CONFIG_KEYS = {
    "organizer": parse_organizer,
    "opener_strategy": parse_strategy,
    "observer_strategy": parse_strategy,
    "rounds": _positive_int,
    "seed": _seed,
    "workers": _positive_int,
    "output_path": str,
}
_REQUIRED = ("organizer", "opener_strategy", "observer_strategy", "rounds", "seed")


def parse_config(text: str, source: str = "<config>") -> ExperimentConfig:
    """Parse ``key = value`` lines; ``#`` starts a comment.

    Every problem is reported as ``source:line: key 'k': reason``.
    """
    values: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise UsageError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        if key not in _CONFIG_KEYS:
            raise UsageError(f"{source}:{lineno}: key {key!r}: unknown key")
        if key in values:
            raise UsageError(f"{source}:{lineno}: key {key!r}: set more than once")
        try:
            values[key] = _CONFIG_KEYS[key](value)
        except ValueError as exc:
            raise UsageError(f"{source}:{lineno}: key {key!r}: {exc}") from None
    missing = [k for k in _REQUIRED if k not in values]
    if missing:
        raise UsageError(f"{source}: missing required key(s): {', '.join(missing)}")
    return ExperimentConfig(**values)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_analyze(p: float) -> str:
    if not 0.0 <= p <= 1.0:
        raise UsageError(f"--p must lie in [0, 1], got {p}")
    both_a, both_b = analytics.e_both_ias()
    rows = [
        ("e_initial", analytics.e_initial()),
        ("e_accepted", analytics.e_uniform_case1(True)),
        ("e_denied", analytics.e_uniform_case1(False)),
        ("e_keep", analytics.e_uniform_keep()),
        ("pregame_opener", analytics.e_pregame_opener(p)),
        ("pregame_observer", analytics.e_pregame_observer(p)),
        ("via_straddle", analytics.e_via_straddle()),
        ("both_ias_opener", both_a),
        ("both_ias_observer", both_b),
    ]
    width = max(len(name) for name, _ in rows)
    lines = [f"# expected amounts in multiples of X (p = {_fmt(p)})"]
    lines += [f"{name:<{width}} = {_fmt(v)}" for name, v in rows]
    return "\n".join(lines) + "\n"


TABLE1_COLUMNS = ("case", "ordering", "decision_a", "decision_b", "exchanged", "e_a", "e_b", "total", "e_a_exact", "e_b_exact")


def table1_csv() -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TABLE1_COLUMNS)
    for r in analytics.outcome_matrix():
        w.writerow([
            r.case,
            " < ".join(r.ordering),
            r.decision_a.value,
            r.decision_b.value,
            "yes" if r.exchanged else "no",
            _fmt_exact(float(r.e_a)),
            _fmt_exact(float(r.e_b)),
            _fmt_exact(float(r.total)),
            str(r.e_a),
            str(r.e_b),
        ])
    return buf.getvalue()


def cmd_table1() -> str:
    header = f"{'case':<5}{'ordering':<18}{'A':<9}{'B':<9}{'exchange':<10}{'E[A]':<7}{'E[B]':<7}total"
    lines = ["# both players on IAS; expectations in multiples of X", header]
    for r in analytics.outcome_matrix():
        lines.append(
            f"{r.case:<5}{' < '.join(r.ordering):<18}{r.decision_a.value:<9}{r.decision_b.value:<9}"
            f"{'yes' if r.exchanged else 'no':<10}{str(r.e_a):<7}{str(r.e_b):<7}{r.total}"
        )
    return "\n".join(lines) + "\n"


def cmd_cv() -> str:
    root = solve_cv()
    lines = [
        f"numeric_root = {_fmt_exact(root)}",
        f"closed_form  = {_fmt_exact(CV_CLOSED_FORM)}",
        f"difference   = {root - CV_CLOSED_FORM:.3e}",
        f"residual     = {cv_residual(root):.3e}",
    ]
    return "\n".join(lines) + "\n"


def density_grid(x_hat: float, a: float, grid: int, cv: float = CV_CLOSED_FORM) -> list[float]:
    """``grid`` even points on (0, 2 x_hat + 12 sigma(2 x_hat)], plus the landmarks
    x_hat, M, 2 x_hat and a when they fall inside."""
    top = 2 * x_hat * (1 + TAIL_SIGMAS * cv)
    points = {top * i / grid for i in range(1, grid + 1)}
    points.update(v for v in (x_hat, 1.5 * x_hat, 2 * x_hat, a) if 0 < v <= top)
    return sorted(points)


def cmd_density(x_hat: float, a: float, grid: int, out: str | None, cv: float = CV_CLOSED_FORM) -> str:
    if not x_hat > 0:
        raise UsageError(f"--x-hat must be positive, got {x_hat}")
    if not a > 0:
        raise UsageError(f"--a must be positive, got {a}")
    if grid < 2:
        raise UsageError(f"--grid must be at least 2, got {grid}")
    try:
        belief = NormalBelief(x_hat, cv)
    except ValueError as exc:
        raise UsageError(str(exc)) from None

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("x", "f_smaller", "f_larger"))
    for x in density_grid(x_hat, a, grid, cv):
        w.writerow((_fmt_exact(x), _fmt_exact(density(belief, x, x_hat)), _fmt_exact(density(belief, x, 2 * x_hat))))
    post = posterior(belief, a)
    m = intermediate_amount(belief)
    summary = f"# M={_fmt_exact(m)},a={_fmt_exact(a)},p_smaller={_fmt_exact(post.p_smaller)},p_larger={_fmt_exact(post.p_larger)}"
    buf.write(summary + "\n")

    if out is not None:
        try:
            with open(out, "w", encoding="utf-8", newline="") as fh:
                fh.write(buf.getvalue())
        except OSError as exc:
            raise UsageError(f"cannot write {out}: {exc.strerror}") from None
        return f"wrote {out}\n{summary}\n"
    return buf.getvalue()


def cmd_simulate(config: ExperimentConfig, out: str | None = None) -> str:
    path = out if out is not None else config.output_path
    if path is not None:
        try:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                report = run_experiment(
                    config.organizer, config.opener_strategy, config.observer_strategy,
                    config.rounds, config.seed, config.workers, rounds_csv=fh,
                )
        except OSError as exc:
            raise UsageError(f"cannot write {path}: {exc.strerror}") from None
    else:
        report = run_experiment(
            config.organizer, config.opener_strategy, config.observer_strategy,
            config.rounds, config.seed, config.workers,
        )

    lines = []
    for key, value in report.as_dict().items():
        lines.append(f"{key} = {_fmt(value) if isinstance(value, float) else value}")
    if isinstance(config.opener_strategy, IAS):
        analytic = correct_probability_analytic(config.organizer, config.opener_strategy.threshold)
        lines.append(f"analytic_correct_opener = {_fmt(analytic)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twoenvelopes", description="Intermediate Amount Strategy toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="closed-form expected amounts")
    p.add_argument("--p", type=float, required=True, help="probability that the other player requests an exchange")

    p = sub.add_parser("table1", help="outcome matrix for two IAS players")
    p.add_argument("--out", help="also write the matrix as CSV")

    sub.add_parser("cv", help="coefficient of variation: bisection vs closed form")

    p = sub.add_parser("density", help="export the two belief densities as CSV")
    p.add_argument("--x-hat", type=float, required=True)
    p.add_argument("--a", type=float, required=True, help="revealed amount for the posterior summary")
    p.add_argument("--grid", type=int, default=400)
    p.add_argument("--cv", type=float, default=CV_CLOSED_FORM)
    p.add_argument("--out", help="CSV path (default: stdout)")

    p = sub.add_parser("simulate", help="run a Monte Carlo experiment")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="write one CSV row per round")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "analyze":
            text = cmd_analyze(args.p)
        elif args.command == "table1":
            text = cmd_table1()
            if args.out:
                try:
                    Path(args.out).write_text(table1_csv(), encoding="utf-8", newline="")
                except OSError as exc:
                    raise UsageError(f"cannot write {args.out}: {exc.strerror}") from None
        elif args.command == "cv":
            text = cmd_cv()
        elif args.command == "density":
            text = cmd_density(args.x_hat, args.a, args.grid, args.out, args.cv)
        else:
            try:
                source = Path(args.config).read_text(encoding="utf-8")
            except OSError as exc:
                raise UsageError(f"cannot read {args.config}: {exc.strerror}") from None
            text = cmd_simulate(parse_config(source, args.config), args.out)
    except UsageError as exc:
        print(f"twoenvelopes: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (QuadratureError, BracketError) as exc:
        print(f"twoenvelopes: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    sys.stdout.write(text)
    return 0
