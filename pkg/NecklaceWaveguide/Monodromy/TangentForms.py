"""
Loop scalars in tangent half-angle variables x = tan(sigma * l1 / 2), y = tan(sigma * l2 / 2).

    m + n = c + f1,   f1 = num1 / den1
    m - n = c - f2,   f2 = num2 / den2

num2 and den2 are multiplied through by x * y so x = 0 or y = 0 stays finite.
Then n = 0 reads num1 * den2 + num2 * den1 = 0 (quartic in x, y)
and transparency m^2 - n^2 + 1 = 0 reads (c + f1)(c - f2) + 1 = 0.
"""

from typing import NamedTuple, Sequence


class TangentFractions(NamedTuple):
    num1: float
    den1: float
    num2: float
    den2: float

    @property
    def f1(self):
        return self.num1 / self.den1

    @property
    def f2(self):
        return self.num2 / self.den2


def tangent_fractions(entries: Sequence[float], x, y) -> TangentFractions:
    """
    :param entries: (a11, a12, a22, delta1, delta2, c)
    :param x: tan(sigma * l1 / 2)
    :param y: tan(sigma * l2 / 2)

    >>> tangent_fractions((0, 0, 0, 1, 0, 0), 1.0, 1.0)
    TangentFractions(num1=1.0, den1=1.0, num2=1.0, den2=1.0)
    """

    a11, a12, a22, d1, d2, _ = entries

    num1 = (y - a22) * d1 ** 2 + (x - a11) * d2 ** 2 + 2 * a12 * d1 * d2
    den1 = (x - a11) * (y - a22) - a12 ** 2

    # (1/y + a22) d1^2 + (1/x + a11) d2^2 - 2 a12 d1 d2 and (1/x + a11)(1/y + a22) - a12^2, times x * y
    num2 = x * d1 ** 2 + y * (a22 * x * d1 ** 2 + d2 ** 2 + a11 * x * d2 ** 2 - 2 * a12 * d1 * d2 * x)
    den2 = (1 + a11 * x) * (1 + a22 * y) - a12 ** 2 * x * y

    return TangentFractions(num1, den1, num2, den2)


def transparency_value(entries: Sequence[float], x, y) -> float:
    """
    (c + f1)(c - f2) + 1, equal to m^2 - n^2 + 1.
    """

    fractions = tangent_fractions(entries, x, y)
    c = entries[5]
    return (c + fractions.f1) * (c - fractions.f2) + 1


def pole_residual(entries: Sequence[float], x, y) -> float:
    """
    Relative residual of the n = 0 quartic. 0 on a pole, 1 when one term dominates.
    """

    fractions = tangent_fractions(entries, x, y)
    first = fractions.num1 * fractions.den2
    second = fractions.num2 * fractions.den1
    scale = max(abs(first), abs(second))

    if scale == 0:
        return 0.0

    return abs(first + second) / scale
