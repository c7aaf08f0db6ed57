"""Exact rational arithmetic and real gamma evaluation.

Rational quantities (orders, delays, grid exponents) are represented by
:class:`fractions.Fraction`, which keeps every value in canonical form
(positive denominator, gcd(|num|, den) = 1) through all arithmetic.  The
module adds the text rendering used by problem files ("p/q" or "p") and
the two gamma entry points every other module relies on.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

Rational = Fraction

# Above this argument math.gamma overflows double precision (~171.62), so
# gamma ratios reduce their arguments with the recurrence before dividing.
_GAMMA_DIRECT_LIMIT = 170.0

# log(DBL_MAX); a ratio whose logarithm exceeds this cannot be a finite double
_LOG_DOUBLE_MAX = 709.0


class GammaDomainError(ValueError):
    """Gamma was requested outside the supported domain x > 0."""


def parse_rational(text: str) -> Fraction:
    """Parse "p/q" or "p" into a canonical Fraction.

    The sign attaches to the numerator; the denominator must be a positive
    integer.  Raises ValueError on malformed text or a zero denominator.
    """
    s = text.strip()
    if "/" in s:
        num_text, _, den_text = s.partition("/")
        try:
            num = int(num_text.strip())
            den = int(den_text.strip())
        except ValueError:
            raise ValueError(f"malformed rational literal: {text!r}") from None
        if den == 0:
            raise ValueError("zero denominator")
        if den < 0:
            raise ValueError(f"denominator must be positive: {text!r}")
        return Fraction(num, den)
    try:
        return Fraction(int(s))
    except ValueError:
        raise ValueError(f"malformed rational literal: {text!r}") from None


def format_rational(x: Fraction) -> str:
    """Render a Fraction as "p/q", or "p" when the denominator is 1."""
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def gamma(x: float) -> float:
    """Gamma function on the positive real axis.

    Delegates to the platform's double-precision implementation, which is
    accurate to well under 1e-13 relative error on (0, 50].  Arguments
    outside x > 0 never arise from valid solver inputs and are rejected.
    """
    xf = float(x)
    if not math.isfinite(xf) or xf <= 0.0:
        raise GammaDomainError(f"gamma domain: argument must be a finite positive real, got {x}")
    return math.gamma(xf)


def gamma_ratio(alpha: Fraction, k: int, beta: Fraction) -> float:
    """Return gamma(alpha*k + beta + 1) / gamma(alpha*k + 1).

    Arguments are combined exactly in rational arithmetic before any float
    conversion.  Moderate arguments use two direct gamma calls.  Large ones
    are reduced by the downward recurrence gamma(x) = (x-1) gamma(x-1) --
    shifting both arguments by the same integer keeps every factor exactly
    representable, which preserves far more accuracy than exponentiating a
    log-gamma difference.  A ratio too large for double precision is an
    error rather than an infinity.
    """
    if alpha <= 0 or beta <= 0:
        raise GammaDomainError(f"gamma ratio needs alpha > 0 and beta > 0, got {alpha}, {beta}")
    if k < 0:
        raise GammaDomainError(f"gamma ratio needs k >= 0, got {k}")
    top = float(alpha * k + beta + 1)
    bot = float(alpha * k + 1)
    if top <= _GAMMA_DIRECT_LIMIT:
        return math.gamma(top) / math.gamma(bot)
    if math.lgamma(top) - math.lgamma(bot) > _LOG_DOUBLE_MAX:
        raise OverflowError(f"gamma ratio overflows double precision for arguments {top}, {bot}")
    shift = max(1, math.ceil(top - _GAMMA_DIRECT_LIMIT))
    bot_small = alpha * k + 1 - shift
    if bot_small <= 0:
        # enormous beta relative to alpha*k: the recurrence cannot align the
        # arguments, so settle for the (slightly less accurate) log route
        return math.exp(math.lgamma(top) - math.lgamma(bot))
    # each factor is 1 + beta/(x - i); writing it this way keeps the large
    # argument magnitudes out of the rounding error entirely
    steps = np.arange(1.0, shift + 1.0)
    factor = float(np.prod(1.0 + float(beta) / (bot - steps)))
    return factor * math.gamma(float(bot_small + beta)) / math.gamma(float(bot_small))
