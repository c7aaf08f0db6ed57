"""Truncated fractional power series and their transformation algebra.

A series lives on the exponent grid {alpha*k : k = 0..K} centered at t0 and
represents u(t) ~ sum_k coeff[k] * (t - t0)**(alpha*k).  The operations below
are the coefficient-level rules for building such series from polynomials,
multiplying them, dividing by powers of (t - t0), and applying a Caputo
derivative of positive order -- everything the delay-free recurrence engine
needs.  All values are immutable; coefficient arrays are write-protected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .numeric import format_rational, gamma_ratio

# Absolute threshold under which a leading coefficient counts as zero when
# dividing by (t - t0)**r.  In-scope inputs produce exact zeros; the slack
# only absorbs float noise.
VANISH_TOL = 1e-12


class OffGridError(ValueError):
    """An exponent does not land on the series' alpha*k grid."""


class BasisMismatchError(ValueError):
    """Two series with different (t0, alpha, K) were combined."""


class Polynomial:
    """Real polynomial in one variable, ascending coefficients.

    Trailing zero coefficients are stripped so the degree is canonical; the
    zero polynomial has an empty coefficient array and degree -1.
    """

    __slots__ = ("coeff",)

    def __init__(self, coefficients=()):
        arr = np.asarray(coefficients, dtype=float)
        if arr.ndim == 0:
            arr = arr.reshape(1)
        n = arr.size
        while n > 0 and arr[n - 1] == 0.0:
            n -= 1
        arr = arr[:n].copy()
        arr.setflags(write=False)
        self.coeff = arr

    @property
    def degree(self) -> int:
        return self.coeff.size - 1

    def __bool__(self) -> bool:
        return self.coeff.size > 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.coeff.shape == other.coeff.shape and bool(np.all(self.coeff == other.coeff))

    def __hash__(self):
        return hash(self.coeff.tobytes())

    def __neg__(self) -> "Polynomial":
        return Polynomial(-self.coeff)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        n = max(self.coeff.size, other.coeff.size)
        out = np.zeros(n)
        out[: self.coeff.size] += self.coeff
        out[: other.coeff.size] += other.coeff
        return Polynomial(out)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            if not self or not other:
                return Polynomial()
            return Polynomial(np.convolve(self.coeff, other.coeff))
        return Polynomial(self.coeff * float(other))

    __rmul__ = __mul__

    def __call__(self, t: float) -> float:
        acc = 0.0
        for c in self.coeff[::-1]:
            acc = acc * t + c
        return acc

    def shifted(self, c: float) -> "Polynomial":
        """Coefficients of p(s + c), i.e. this polynomial re-read in s = t - c.

        Uses the exact binomial expansion b_r = sum_{j>=r} a_j * C(j, r) * c**(j-r);
        for polynomials this is the exact re-centering method (up to float
        rounding), no numerical differentiation involved.
        """
        cf = float(c)
        n = self.coeff.size
        out = np.zeros(n)
        for j in range(n):
            a = self.coeff[j]
            if a == 0.0:
                continue
            for r in range(j + 1):
                out[r] += a * math.comb(j, r) * cf ** (j - r)
        return Polynomial(out)

    def __repr__(self):
        return f"Polynomial({self.coeff.tolist()!r})"


@dataclass(frozen=True)
class SeriesBasis:
    """Expansion point, grid order and truncation index shared by a family of series."""

    t0: float
    alpha: Fraction
    K: int

    def __post_init__(self):
        if not (0 < self.alpha <= 1):
            raise ValueError(f"grid order must satisfy 0 < alpha <= 1, got {self.alpha}")
        if self.K < 0:
            raise ValueError(f"truncation index must be nonnegative, got {self.K}")

    def grid_index(self, exponent: Fraction) -> int:
        """Map an exponent to its grid index exponent/alpha, or raise OffGridError."""
        idx = Fraction(exponent) / self.alpha
        if idx.denominator != 1:
            raise OffGridError(f"off-grid exponent: {exponent} is not a multiple of alpha={self.alpha}")
        return idx.numerator


@dataclass(frozen=True)
class FracSeries:
    """Coefficients of a truncated fractional power series on a fixed basis.

    ``reliable_k`` marks the last index unaffected by truncation shortening:
    index-shifting operations discard high-order information, and callers
    (notably the per-segment recurrence) must know the last index they can
    still trust.  A freshly built series is reliable through K.
    """

    basis: SeriesBasis
    coeff: np.ndarray
    reliable_k: int = field(default=-1)

    def __post_init__(self):
        arr = np.asarray(self.coeff, dtype=float).copy()
        if arr.shape != (self.basis.K + 1,):
            raise ValueError(f"coefficient array must have length K+1={self.basis.K + 1}, got {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "coeff", arr)
        if self.reliable_k < 0:
            object.__setattr__(self, "reliable_k", self.basis.K)

    @classmethod
    def zeros(cls, basis: SeriesBasis) -> "FracSeries":
        return cls(basis, np.zeros(basis.K + 1))

    @property
    def shortened(self) -> bool:
        """True once truncation shortening makes some tail indices unreliable."""
        return self.reliable_k < self.basis.K

    def evaluate(self, t: float) -> float:
        """Truncated sum at t >= t0; powers are exp(alpha*k*log(t - t0))."""
        d = float(t) - self.basis.t0
        if d < 0.0:
            raise ValueError(f"evaluation left of expansion point: t={t} < t0={self.basis.t0}")
        if d == 0.0:
            return float(self.coeff[0])
        exponents = float(self.basis.alpha) * np.arange(self.basis.K + 1)
        return float(self.coeff @ np.power(d, exponents))

    def __eq__(self, other) -> bool:
        if not isinstance(other, FracSeries):
            return NotImplemented
        return (
            self.basis == other.basis
            and self.reliable_k == other.reliable_k
            and bool(np.all(self.coeff == other.coeff))
        )

    def __hash__(self):
        return hash((self.basis, self.coeff.tobytes(), self.reliable_k))


def from_polynomial(p: Polynomial, basis: SeriesBasis) -> FracSeries:
    """Exact transform of a polynomial onto the basis grid.

    The polynomial is first re-centered at t0 by binomial expansion; the
    coefficient of (t - t0)**r is then placed at grid index r/alpha (a
    Kronecker-delta spectrum).  Powers whose index exceeds K are discarded
    by truncation; a nonzero power that misses the grid is an error.
    """
    placed = p.shifted(basis.t0)
    coeff = np.zeros(basis.K + 1)
    for r in range(placed.coeff.size):
        b = placed.coeff[r]
        if b == 0.0:
            continue
        k = basis.grid_index(Fraction(r))
        if k <= basis.K:
            coeff[k] = b
    return FracSeries(basis, coeff)


def linear_combine(c1: float, s1: FracSeries, c2: float, s2: FracSeries) -> FracSeries:
    """c1*s1 + c2*s2 on a common basis."""
    _require_same_basis(s1, s2)
    return FracSeries(
        s1.basis,
        float(c1) * s1.coeff + float(c2) * s2.coeff,
        min(s1.reliable_k, s2.reliable_k),
    )


def cauchy_product(s1: FracSeries, s2: FracSeries) -> FracSeries:
    """Coefficient convolution; indices above K are discarded by truncation."""
    _require_same_basis(s1, s2)
    full = np.convolve(s1.coeff, s2.coeff)
    return FracSeries(s1.basis, full[: s1.basis.K + 1], min(s1.reliable_k, s2.reliable_k))


def shift_divide(s: FracSeries, r: Fraction) -> FracSeries:
    """Divide by (t - t0)**r, i.e. shift coefficients down by r/alpha indices.

    Requires the series to vanish (within VANISH_TOL) below index r/alpha.
    The result is truncation-shortened: indices above K - r/alpha are
    zero-filled and flagged unreliable.
    """
    r = Fraction(r)
    if r <= 0:
        raise OffGridError(f"off-grid exponent: shift power must be positive, got {r}")
    m = s.basis.grid_index(r)
    bad = np.nonzero(np.abs(s.coeff[:m]) > VANISH_TOL)[0]
    if bad.size:
        raise ValueError(
            f"division by (t-t0)^{r} of non-vanishing series: coefficient at index {bad[0]} is nonzero"
        )
    K = s.basis.K
    coeff = np.zeros(K + 1)
    coeff[: K + 1 - m] = s.coeff[m:]
    return FracSeries(s.basis, coeff, max(s.reliable_k - m, 0))


def caputo_transform(s: FracSeries, beta: Fraction) -> FracSeries:
    """Coefficients of the Caputo derivative of order beta > 0 taken at t0.

    Rule: out[k] = gamma(alpha*k + beta + 1)/gamma(alpha*k + 1) * coeff[k + beta/alpha].
    beta/alpha must be a positive integer, so the result stays on the grid;
    like shift_divide the output is truncation-shortened by beta/alpha indices.
    """
    beta = Fraction(beta)
    if beta <= 0:
        raise OffGridError(f"off-grid exponent: derivative order must be positive, got {beta}")
    b = s.basis.grid_index(beta)
    K = s.basis.K
    alpha = s.basis.alpha
    coeff = np.zeros(K + 1)
    for k in range(K + 1 - b):
        coeff[k] = gamma_ratio(alpha, k, beta) * s.coeff[k + b]
    return FracSeries(s.basis, coeff, max(s.reliable_k - b, 0))


def nonzero_terms(s: FracSeries) -> list[tuple[int, str, float]]:
    """(index, exponent as rational text, coefficient) for each nonzero entry."""
    out = []
    for k in range(s.basis.K + 1):
        c = float(s.coeff[k])
        if c != 0.0:
            out.append((k, format_rational(s.basis.alpha * k), c))
    return out


def _require_same_basis(s1: FracSeries, s2: FracSeries) -> None:
    if s1.basis != s2.basis:
        raise BasisMismatchError(f"incompatible bases: {s1.basis} vs {s2.basis}")
