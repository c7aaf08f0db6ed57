"""Command-line front end: solve a problem file, dump coefficients and trajectories.

Usage:
    fracdelay solve PROBLEM [--out-coeffs PATH] [--out-traj PATH]
                    [--check-oracle] [--format {csv,json}]

Exit codes: 0 success, 1 validation/solve failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys as _sys
from dataclasses import dataclass
from fractions import Fraction

from .model import DelaySystem, SolverConfig, parse_problem
from .numeric import format_rational
from .oracle import abm_solve, abm_steps_for
from .recurrence import choose_alpha
from .series import nonzero_terms
from .steps import SegmentSolution, StepPlan, build_segment_problem, commensurate_step, solve

_ORACLE_TARGET_H = 1e-4
_ORACLE_SAMPLES = 50


@dataclass
class RunReport:
    plan: dict
    segments: list[dict]
    trajectory: dict
    oracle_max_abs_error: float | None = None


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def sample_times(plan: StepPlan, horizon: Fraction, step: Fraction) -> list[Fraction]:
    """Sample-grid times plus segment endpoints, each at most once, within [0, horizon]."""
    times = {Fraction(0), horizon}
    i = 1
    while i * step <= horizon:
        times.add(i * step)
        i += 1
    for j in range(1, plan.num_segments + 1):
        endpoint = j * plan.tau_star
        if endpoint <= horizon:
            times.add(endpoint)
    return sorted(times)


def owning_segment(t: Fraction, plan: StepPlan) -> int:
    """Index of the segment whose half-open interval contains t (t=0 belongs to segment 1)."""
    if t <= 0:
        return 1
    return min(math.ceil(t / plan.tau_star), plan.num_segments)


def sample_trajectory(
    segments: list[SegmentSolution], plan: StepPlan, horizon: Fraction, step: Fraction
) -> tuple[list[Fraction], list[list[float]]]:
    times = sample_times(plan, horizon, step)
    values = []
    for t in times:
        seg = segments[owning_segment(t, plan) - 1]
        values.append(seg.evaluate(float(t)))
    return times, values


def _coefficient_table(segments: list[SegmentSolution]) -> list[dict]:
    out = []
    for seg in segments:
        rows = []
        for comp_index, comp in enumerate(seg.components, start=1):
            for k, exponent, coeff in nonzero_terms(comp):
                rows.append({"component": comp_index, "k": k, "exponent": exponent, "coeff": coeff})
        out.append(
            {
                "index": seg.index,
                "t_left": format_rational(seg.t_left),
                "t_right": format_rational(seg.t_right),
                "coefficients": rows,
            }
        )
    return out


def run_oracle_check(
    sys_: DelaySystem, cfg: SolverConfig, segments: list[SegmentSolution]
) -> float:
    """Re-solve every segment with the ABM predictor-corrector; return max |difference|.

    The oracle receives only problem data (coefficient matrices, forcing term
    lists, seed values); it never calls into the series machinery.
    """
    choice = choose_alpha(sys_.nu)
    plan = commensurate_step(sys_.delays, sys_.horizon)
    worst = 0.0
    for seg in segments:
        prob = build_segment_problem(sys_, cfg, choice, plan, seg.index, segments[: seg.index - 1])
        terms = [
            [(coeff, float(seg.basis.alpha) * k) for k, c in enumerate(comp.coeff) if (coeff := float(c)) != 0.0]
            for comp in prob.forcing
        ]
        t0, t1 = float(seg.t_left), float(seg.t_right)
        steps = abm_steps_for(t1 - t0, _ORACLE_TARGET_H)
        times, states = abm_solve(sys_.A[0], terms, float(sys_.nu), prob.x0, t0, t1, (t1 - t0) / steps)
        picks = [round(i * steps / (_ORACLE_SAMPLES - 1)) for i in range(_ORACLE_SAMPLES)]
        for i in picks:
            mine = seg.evaluate(float(times[i]))
            worst = max(worst, max(abs(a - b) for a, b in zip(mine, states[i])))
    return worst


def _write_traj_csv(path: str, n: int, times: list[Fraction], values: list[list[float]]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("t," + ",".join(f"x{i}" for i in range(1, n + 1)) + "\n")
        for t, row in zip(times, values):
            fh.write(",".join([_fmt(float(t))] + [_fmt(v) for v in row]) + "\n")


def _write_coeffs_csv(path: str, table: list[dict]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("segment,component,k,exponent,coeff\n")
        for seg in table:
            for row in seg["coefficients"]:
                fh.write(f"{seg['index']},{row['component']},{row['k']},{row['exponent']},{_fmt(row['coeff'])}\n")


def _report_json(report: RunReport, times: list[Fraction], values: list[list[float]]) -> str:
    payload = {
        "plan": report.plan,
        "segments": report.segments,
        "trajectory": {
            "t": [_fmt(float(t)) for t in times],
            "x": [[_fmt(v) for v in row] for row in values],
        },
        "oracle_max_abs_error": report.oracle_max_abs_error,
    }
    return json.dumps(payload, indent=2)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fracdelay", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("solve", help="solve a delay problem file")
    run.add_argument("problem", help="path to the problem file")
    run.add_argument("--out-coeffs", metavar="PATH", help="write the nonzero-coefficient dump here")
    run.add_argument("--out-traj", metavar="PATH", help="write the sampled trajectory here")
    run.add_argument("--check-oracle", action="store_true", help="cross-check each segment with the ABM oracle")
    run.add_argument("--format", choices=("csv", "json"), default="csv", help="output format (default csv)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0

    try:
        with open(args.problem, "rb") as fh:
            text = fh.read()
        system, cfg = parse_problem(text)
        segments = solve(system, cfg)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return 1

    plan = commensurate_step(system.delays, system.horizon)
    times, values = sample_trajectory(segments, plan, system.horizon, cfg.sample_step)
    report = RunReport(
        plan={
            "tau_star": format_rational(plan.tau_star),
            "multipliers": list(plan.multipliers),
            "num_segments": plan.num_segments,
        },
        segments=_coefficient_table(segments),
        trajectory={},
    )
    if args.check_oracle:
        report.oracle_max_abs_error = run_oracle_check(system, cfg, segments)

    if args.format == "json":
        print(_report_json(report, times, values))
    else:
        print(f"step tau* = {report.plan['tau_star']}, multipliers = {report.plan['multipliers']}, "
              f"segments = {plan.num_segments}")
        for seg in report.segments:
            print(f"segment {seg['index']} on ({seg['t_left']}, {seg['t_right']}]:")
            for row in seg["coefficients"]:
                print(f"  x{row['component']}  k={row['k']:<4d} (t-t0)^{row['exponent']:<8s} {_fmt(row['coeff'])}")
        if report.oracle_max_abs_error is not None:
            print(f"oracle max abs error: {_fmt(report.oracle_max_abs_error)}")

    if args.out_traj:
        if args.format == "json":
            with open(args.out_traj, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(json.dumps(
                    {"t": [_fmt(float(t)) for t in times], "x": [[_fmt(v) for v in r] for r in values]},
                    indent=2,
                ))
        else:
            _write_traj_csv(args.out_traj, system.n, times, values)
    if args.out_coeffs:
        if args.format == "json":
            with open(args.out_coeffs, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(json.dumps(report.segments, indent=2))
        else:
            _write_coeffs_csv(args.out_coeffs, report.segments)
    return 0


def entry() -> None:
    _sys.exit(main())


if __name__ == "__main__":
    entry()
