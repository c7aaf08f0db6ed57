"""Method of steps: commensurability reduction and the segment solve loop.

Commensurate delays admit a uniform step tau_star with every delay an exact
integer multiple of it.  Segment j lives on ((j-1)*tau_star, j*tau_star];
inside it each delayed argument t - tau_i falls wholly inside one earlier
segment (or the prescribed history), which removes the delays and leaves a
sequence of delay-free problems for the recurrence engine.

Because the segment grid is uniform, a delayed series needs no numerical
re-expansion: the source segment's expansion point is exactly tau_i to the
left of the current one, so its coefficient arrays are reused bit-for-bit.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

from .model import DelaySystem, ProblemValidationError, SolverConfig, validate
from .recurrence import AlphaChoice, SegmentProblem, build_and_iterate, choose_alpha
from .series import (
    BasisMismatchError,
    FracSeries,
    Polynomial,
    SeriesBasis,
    cauchy_product,
    from_polynomial,
    linear_combine,
)


class SolveError(ValueError):
    """A series/recurrence failure, annotated with the segment where it happened."""

    def __init__(self, segment: int, cause: Exception):
        super().__init__(f"segment {segment}: {cause}")
        self.segment = segment


@dataclass(frozen=True)
class StepPlan:
    """Uniform step length, per-delay multipliers, and segment count."""

    tau_star: Fraction
    multipliers: tuple[int, ...]
    num_segments: int


@dataclass(frozen=True)
class SegmentSolution:
    """One segment: interval ((j-1)*tau_star, j*tau_star] and its n component series."""

    index: int
    t_left: Fraction
    t_right: Fraction
    basis: SeriesBasis
    components: tuple[FracSeries, ...]

    def evaluate(self, t: float) -> list[float]:
        return [c.evaluate(t) for c in self.components]


def commensurate_step(delays: tuple[Fraction, ...], horizon: Fraction) -> StepPlan:
    """Largest rational step dividing every delay, plus the segment count for horizon.

    Construction: with k_i = tau_i/tau_1, the step is tau_1 divided by the
    least common multiple of the k_i denominators; this equals the rational
    gcd of the delays.  With no delays at all the whole horizon is a single
    delay-free segment.
    """
    horizon = Fraction(horizon)
    if horizon <= 0:
        raise ValueError(f"horizon must be positive: {horizon}")
    if not delays:
        return StepPlan(tau_star=horizon, multipliers=(), num_segments=1)
    delays = tuple(Fraction(d) for d in delays)
    if delays[0] <= 0 or any(b <= a for a, b in zip(delays, delays[1:])):
        raise ValueError("delays must be positive and strictly increasing")
    ratios = [d / delays[0] for d in delays]
    k_star = math.lcm(*(r.denominator for r in ratios))
    tau_star = delays[0] / k_star
    multipliers = tuple(int(d / tau_star) for d in delays)
    num_segments = math.ceil(horizon / tau_star)
    return StepPlan(tau_star=tau_star, multipliers=multipliers, num_segments=num_segments)


def resolve_delayed_term(j: int, m_i: int) -> int | None:
    """Source of x(t - m_i*tau_star) on segment j: an earlier segment index, or
    None when the delayed argument falls in the prescribed history [-tau, 0]."""
    if j < 1 or m_i < 1:
        raise ValueError("segment index and multiplier must be >= 1")
    l = j - m_i
    return l if l >= 1 else None


def recenter_delayed_series(src: SegmentSolution, target_basis: SeriesBasis) -> tuple[FracSeries, ...]:
    """Re-read a source segment's series in the target segment's variable.

    The uniform grid makes (t - tau_i) - src.t0 identical to t - target.t0,
    so the coefficient arrays transfer unchanged; only the basis is swapped.
    """
    if src.basis.alpha != target_basis.alpha or src.basis.K != target_basis.K:
        raise BasisMismatchError(
            f"incompatible bases: source grid ({src.basis.alpha}, K={src.basis.K}) "
            f"vs target ({target_basis.alpha}, K={target_basis.K})"
        )
    return tuple(FracSeries(target_basis, c.coeff, c.reliable_k) for c in src.components)


def build_segment_problem(
    sys: DelaySystem,
    cfg: SolverConfig,
    choice: AlphaChoice,
    plan: StepPlan,
    j: int,
    prior: list[SegmentSolution],
) -> SegmentProblem:
    """Assemble the delay-free problem for segment j from history and prior segments."""
    t_left = (j - 1) * plan.tau_star
    basis = SeriesBasis(float(t_left), choice.alpha, cfg.K)

    a0_series = tuple(
        tuple(from_polynomial(sys.A[0].entry(row, col), basis) for col in range(sys.n))
        for row in range(sys.n)
    )

    # Polynomial contributions (history substitutions and B*u) are accumulated
    # exactly as polynomials and transformed once; series contributions from
    # earlier segments go through Cauchy products on the shared grid.
    poly_acc: list[Polynomial] = [Polynomial() for _ in range(sys.n)]
    series_acc: list[FracSeries | None] = [None for _ in range(sys.n)]

    for i, tau in enumerate(sys.delays):
        source = resolve_delayed_term(j, plan.multipliers[i])
        mat = sys.A[i + 1]
        if source is None:
            delayed = [phi.shifted(-float(tau)) for phi in sys.phi]
            for row in range(sys.n):
                for col in range(sys.n):
                    poly_acc[row] = poly_acc[row] + mat.entry(row, col) * delayed[col]
        else:
            delayed_series = recenter_delayed_series(prior[source - 1], basis)
            for row in range(sys.n):
                for col in range(sys.n):
                    entry = mat.entry(row, col)
                    if not entry:
                        continue
                    term = cauchy_product(from_polynomial(entry, basis), delayed_series[col])
                    acc = series_acc[row]
                    series_acc[row] = term if acc is None else linear_combine(1.0, acc, 1.0, term)

    for row in range(sys.n):
        for col in range(sys.m):
            poly_acc[row] = poly_acc[row] + sys.B.entry(row, col) * sys.u[col]

    forcing = []
    for row in range(sys.n):
        f = from_polynomial(poly_acc[row], basis)
        if series_acc[row] is not None:
            f = linear_combine(1.0, f, 1.0, series_acc[row])
        forcing.append(f)

    if j == 1:
        x0 = tuple(phi(0.0) for phi in sys.phi)
    else:
        t_join = float(t_left)
        x0 = tuple(c.evaluate(t_join) for c in prior[j - 2].components)

    return SegmentProblem(basis=basis, A0_series=a0_series, forcing=tuple(forcing), x0=x0)


def solve(sys: DelaySystem, cfg: SolverConfig) -> list[SegmentSolution]:
    """Solve the delay system segment by segment over [0, horizon].

    Each segment's series is expanded at its own left endpoint, with the
    fractional derivative restarted there, and seeded with the previous
    segment's endpoint value so the assembled solution is continuous.
    """
    violations = validate(sys)
    if violations:
        raise ProblemValidationError(violations)
    choice = choose_alpha(sys.nu)
    plan = commensurate_step(sys.delays, sys.horizon)

    deg_max = max(sys.max_degree(), 0)
    needed = deg_max + sys.nu * plan.num_segments
    if cfg.K * choice.alpha < needed:
        warnings.warn(
            f"truncation index K={cfg.K} gives grid reach {cfg.K * choice.alpha}, "
            f"below the suggested {needed}; high-order coefficients may be lost",
            stacklevel=2,
        )

    segments: list[SegmentSolution] = []
    for j in range(1, plan.num_segments + 1):
        try:
            prob = build_segment_problem(sys, cfg, choice, plan, j, segments)
            components = build_and_iterate(prob, choice)
        except ValueError as exc:
            raise SolveError(j, exc) from exc
        segments.append(
            SegmentSolution(
                index=j,
                t_left=(j - 1) * plan.tau_star,
                t_right=j * plan.tau_star,
                basis=prob.basis,
                components=components,
            )
        )
    return segments
