"""Per-segment recurrence engine for delay-free linear Caputo systems.

Once delays are resolved, each segment is  D^nu x = A0(t) x + forcing(t)
with a known state vector at the expansion point.  On the grid alpha = 1/q
(nu = p/q canonical) the transformed unknown satisfies

    X(k + p) = gamma(k/q + 1)/gamma((k+p)/q + 1)
               * ( sum_{l=0}^{k} A0(l) X(k-l) + forcing(k) ),

iterated for k = 0..K-p with seeds X(0) = x(t0), X(1..p-1) = 0.  The gamma
factor is applied as a reciprocal on the right-hand side, and all index
shifts are exact integers; no floating index arithmetic occurs anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .numeric import gamma_ratio
from .series import BasisMismatchError, FracSeries, SeriesBasis


@dataclass(frozen=True)
class AlphaChoice:
    """Grid order for nu = p/q: the largest alpha with nu and 1 both on the grid.

    alpha*p = nu and alpha*q = 1 hold exactly; p is the integer index shift of
    the fractional derivative and q is the grid index of t**1.
    """

    alpha: Fraction
    p: int
    q: int

    @property
    def nu(self) -> Fraction:
        return self.alpha * self.p


@dataclass(frozen=True)
class SegmentProblem:
    """Delay-free segment data, all series on one basis.

    ``forcing`` already contains every resolved delayed term multiplied by its
    coefficient matrix plus the control contribution, summed per component.
    """

    basis: SeriesBasis
    A0_series: tuple[tuple[FracSeries, ...], ...]
    forcing: tuple[FracSeries, ...]
    x0: tuple[float, ...]

    def __post_init__(self):
        n = len(self.forcing)
        if len(self.x0) != n or len(self.A0_series) != n or any(len(row) != n for row in self.A0_series):
            raise ValueError("inconsistent segment dimensions")
        for s in list(self.forcing) + [s for row in self.A0_series for s in row]:
            if s.basis != self.basis:
                raise BasisMismatchError("incompatible bases in segment problem")


def choose_alpha(nu: Fraction) -> AlphaChoice:
    """Pick alpha = 1/q for nu = p/q in canonical form."""
    nu = Fraction(nu)
    if not (0 < nu <= 1):
        raise ValueError(f"nu out of (0,1]: {nu}")
    return AlphaChoice(alpha=Fraction(1, nu.denominator), p=nu.numerator, q=nu.denominator)


def transform_initial_state(x0, choice: AlphaChoice) -> np.ndarray:
    """Seed coefficients (n, p): index 0 carries the state vector, 1..p-1 are zero.

    On the alpha = 1/q grid the only index below p where alpha*k is a natural
    number is k = 0, so the state vector lands there and the rest vanish.
    """
    x0 = np.asarray(x0, dtype=float)
    seeds = np.zeros((x0.size, choice.p))
    seeds[:, 0] = x0
    return seeds


def build_and_iterate(prob: SegmentProblem, choice: AlphaChoice) -> tuple[FracSeries, ...]:
    """Run the recurrence and return the n solution series on prob.basis."""
    basis = prob.basis
    if basis.alpha != choice.alpha:
        raise BasisMismatchError(f"incompatible bases: basis alpha {basis.alpha} vs chosen {choice.alpha}")
    K = basis.K
    p = choice.p
    nu = choice.nu
    n = len(prob.forcing)

    A0 = np.stack([np.stack([s.coeff for s in row]) for row in prob.A0_series])  # (n, n, K+1)
    F = np.stack([s.coeff for s in prob.forcing])  # (n, K+1)
    X = np.zeros((n, K + 1))
    X[:, :p] = transform_initial_state(prob.x0, choice)

    a0_is_zero = not np.any(A0)
    for k in range(K - p + 1):
        rhs = F[:, k].copy()
        if not a0_is_zero:
            rhs += np.einsum("ijl,jl->i", A0[:, :, : k + 1], X[:, k::-1])
        X[:, k + p] = rhs / gamma_ratio(choice.alpha, k, nu)

    inputs_reliable = min(
        min(s.reliable_k for s in prob.forcing),
        min(s.reliable_k for row in prob.A0_series for s in row),
    )
    reliable = min(K, inputs_reliable + p)
    return tuple(FracSeries(basis, X[c], reliable) for c in range(n))
