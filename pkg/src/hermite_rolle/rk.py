"""Fixed-step explicit Runge-Kutta integration.

The default tableau is the seventh-order member of Fehlberg's 7(8) pair
(NASA TR R-287, 1968).  Coefficients are kept as exact fractions so the
same stepper can run in float or in ``mpmath`` arithmetic; the latter is
how convergence order is measured below double-precision roundoff.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction as F
from typing import Callable, Iterator, Sequence


@dataclass(frozen=True)
class ButcherTableau:
    name: str
    order: int
    c: tuple
    a: tuple  # lower-triangular rows, a[i] has length i
    b: tuple

    @property
    def stages(self) -> int:
        return len(self.b)

    def check(self) -> None:
        """Row-sum consistency and first-order weight condition."""
        for i, row in enumerate(self.a):
            if sum(row, F(0)) != self.c[i]:
                raise ValueError(f"{self.name}: row {i} does not sum to c[{i}]")
        if sum(self.b, F(0)) != 1:
            raise ValueError(f"{self.name}: weights do not sum to 1")

    def truncated(self) -> "ButcherTableau":
        """Drop trailing stages with zero weight."""
        s = len(self.b)
        while s > 1 and self.b[s - 1] == 0:
            s -= 1
        return ButcherTableau(self.name, self.order, self.c[:s], self.a[:s], self.b[:s])


_FEHLBERG_A = (
    (),
    (F(2, 27),),
    (F(1, 36), F(1, 12)),
    (F(1, 24), 0, F(1, 8)),
    (F(5, 12), 0, F(-25, 16), F(25, 16)),
    (F(1, 20), 0, 0, F(1, 4), F(1, 5)),
    (F(-25, 108), 0, 0, F(125, 108), F(-65, 27), F(125, 54)),
    (F(31, 300), 0, 0, 0, F(61, 225), F(-2, 9), F(13, 900)),
    (F(2), 0, 0, F(-53, 6), F(704, 45), F(-107, 9), F(67, 90), F(3)),
    (F(-91, 108), 0, 0, F(23, 108), F(-976, 135), F(311, 54), F(-19, 60),
     F(17, 6), F(-1, 12)),
    (F(2383, 4100), 0, 0, F(-341, 164), F(4496, 1025), F(-301, 82),
     F(2133, 4100), F(45, 82), F(45, 164), F(18, 41)),
    (F(3, 205), 0, 0, 0, 0, F(-6, 41), F(-3, 205), F(-3, 41), F(3, 41),
     F(6, 41), 0),
    (F(-1777, 4100), 0, 0, F(-341, 164), F(4496, 1025), F(-289, 82),
     F(2193, 4100), F(51, 82), F(33, 164), F(12, 41), 0, F(1)),
)
_FEHLBERG_C = (0, F(2, 27), F(1, 9), F(1, 6), F(5, 12), F(1, 2), F(5, 6),
               F(1, 6), F(2, 3), F(1, 3), F(1), 0, F(1))
_B7 = (F(41, 840), 0, 0, 0, 0, F(34, 105), F(9, 35), F(9, 35), F(9, 280),
       F(9, 280), F(41, 840), 0, 0)
_B8 = (0, 0, 0, 0, 0, F(34, 105), F(9, 35), F(9, 35), F(9, 280),
       F(9, 280), 0, F(41, 840), F(41, 840))


def _frac(seq):
    return tuple(F(v) for v in seq)


FEHLBERG78_FULL = ButcherTableau(
    "fehlberg7(8)", 7, _frac(_FEHLBERG_C), tuple(_frac(r) for r in _FEHLBERG_A), _frac(_B7)
)
# the seventh-order weights never touch the last two stages
RKF7 = FEHLBERG78_FULL.truncated()
RKF8 = ButcherTableau(
    "fehlberg8", 8, _frac(_FEHLBERG_C), tuple(_frac(r) for r in _FEHLBERG_A), _frac(_B8)
)


class _Coefficients:
    """Tableau converted to a working number type, zero entries dropped."""

    def __init__(self, tab: ButcherTableau, convert: Callable):
        self.c = [convert(v) for v in tab.c]
        self.b = [(j, convert(v)) for j, v in enumerate(tab.b) if v != 0]
        self.a = [[(j, convert(v)) for j, v in enumerate(row) if v != 0] for row in tab.a]
        self.s = tab.stages


def _to_float(v):
    return v.numerator / v.denominator


def rk_steps(rhs: Callable, y0, h, steps: int, tableau: ButcherTableau = RKF7,
             convert: Callable = _to_float) -> Iterator[tuple[int, object]]:
    """Yield ``(i, y_i)`` for ``i = 1..steps`` of a fixed-step explicit RK run.

    ``rhs(i, j, y)`` is the slope at stage ``j`` of step ``i`` (the abscissa
    is ``x0 + (i + c[j]) * h``, left to the caller so it can cache
    x-dependent work).  Exceptions raised by ``rhs`` propagate; values
    already yielded stay valid.
    """
    co = _Coefficients(tableau, convert)
    y = y0
    k = [None] * co.s
    for i in range(steps):
        for j in range(co.s):
            yj = y
            for m, a in co.a[j]:
                yj = yj + h * a * k[m]
            k[j] = rhs(i, j, yj)
        incr = 0
        for m, bm in co.b:
            incr = incr + bm * k[m]
        y = y + h * incr
        yield i + 1, y


def integrate(f: Callable, x0, y0, h, steps: int, tableau: ButcherTableau = RKF7,
              convert: Callable = _to_float) -> list:
    """Solve ``y' = f(x, y)`` on a uniform grid; returns ``[y_0, ..., y_steps]``."""
    c = [convert(v) for v in tableau.c]
    ys = [y0]
    for i, y in rk_steps(lambda i, j, y: f(x0 + (i + c[j]) * h, y), y0, h, steps,
                         tableau, convert):
        ys.append(y)
    return ys


def observed_orders(errors: Sequence[float], ratio: float = 2.0) -> list[float]:
    """Log-ratio convergence orders between successive step refinements."""
    return [math.log(e0 / e1) / math.log(ratio) for e0, e1 in zip(errors, errors[1:])]
