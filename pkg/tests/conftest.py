from fractions import Fraction

import pytest

from fracdelay.model import DelaySystem, PolyMatrix
from fracdelay.series import Polynomial


def make_two_delay_system(nu: Fraction, horizon: Fraction = Fraction(2, 3)) -> DelaySystem:
    """Two-dimensional system with delays 1/3 and 2/3, zero history, control 2t+1."""
    t = Polynomial([0, 1])
    one = Polynomial([1])
    zero = Polynomial()
    return DelaySystem(
        nu=nu,
        n=2,
        m=1,
        delays=(Fraction(1, 3), Fraction(2, 3)),
        A=(
            PolyMatrix.zeros(2, 2),
            PolyMatrix.from_rows([[t, one], [t, 2 * t]]),
            PolyMatrix.from_rows([[Polynomial([2]), t], [Polynomial([0, 0, 1]), zero]]),
        ),
        B=PolyMatrix.from_rows([[zero], [one]]),
        u=(Polynomial([1, 2]),),
        phi=(zero, zero),
        horizon=horizon,
    )


@pytest.fixture
def two_delay_system():
    return make_two_delay_system
