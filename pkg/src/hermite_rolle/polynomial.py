"""Dense univariate polynomials with real coefficients.

Coefficients are stored in ascending order of power, so ``coeffs[k]``
multiplies ``x**k``.  Evaluation uses Horner's scheme and accepts either a
scalar or a numpy array.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


def _trim(coeffs: Sequence[float]) -> tuple[float, ...]:
    # exact-zero trimming only; no epsilon
    c = [float(v) for v in coeffs]
    if not c:
        raise ValueError("a polynomial needs at least one coefficient")
    while len(c) > 1 and c[-1] == 0.0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True, init=False)
class Polynomial:
    coeffs: tuple[float, ...]

    def __init__(self, coeffs: Iterable[float]):
        object.__setattr__(self, "coeffs", _trim(list(coeffs)))

    @classmethod
    def constant(cls, c: float) -> "Polynomial":
        return cls([c])

    @classmethod
    def from_roots(cls, roots: Iterable[float]) -> "Polynomial":
        """Monic polynomial with the given roots."""
        p = cls([1.0])
        for r in roots:
            p = p * cls([-float(r), 1.0])
        return p

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return self.coeffs == (0.0,)

    def __call__(self, x):
        return self.eval(x)

    def eval(self, x):
        """Horner evaluation at a scalar or an array of abscissae."""
        c = self.coeffs
        acc = c[-1] if np.ndim(x) == 0 else np.full(np.shape(x), c[-1])
        for k in range(len(c) - 2, -1, -1):
            acc = acc * x + c[k]
        return acc

    def derivative(self) -> "Polynomial":
        if self.degree == 0:
            return Polynomial([0.0])
        return Polynomial([k * self.coeffs[k] for k in range(1, len(self.coeffs))])

    def antiderivative(self) -> "Polynomial":
        """Antiderivative with zero constant term."""
        return Polynomial([0.0] + [c / (k + 1) for k, c in enumerate(self.coeffs)])

    def integrate(self, a: float, b: float) -> float:
        """Exact definite integral over ``[a, b]``."""
        P = self.antiderivative()
        return float(P.eval(b) - P.eval(a))

    def __add__(self, other) -> "Polynomial":
        other = _as_poly(other)
        m = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0.0,) * (m - len(self.coeffs))
        b = other.coeffs + (0.0,) * (m - len(other.coeffs))
        return Polynomial([u + v for u, v in zip(a, b)])

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial([-c for c in self.coeffs])

    def __sub__(self, other) -> "Polynomial":
        return self + (-_as_poly(other))

    def __rsub__(self, other) -> "Polynomial":
        return _as_poly(other) - self

    def __mul__(self, other) -> "Polynomial":
        other = _as_poly(other)
        a, b = self.coeffs, other.coeffs
        out = [0.0] * (len(a) + len(b) - 1)
        for i, u in enumerate(a):
            if u == 0.0:
                continue
            for j, v in enumerate(b):
                out[i + j] += u * v
        return Polynomial(out)

    __rmul__ = __mul__

    def compose_affine(self, alpha: float, beta: float) -> "Polynomial":
        """Return ``p(alpha*x + beta)`` in monomial form."""
        lin = Polynomial([beta, alpha])
        acc = Polynomial([self.coeffs[-1]])
        for k in range(len(self.coeffs) - 2, -1, -1):
            acc = acc * lin + self.coeffs[k]
        return acc

    def taylor_shift(self, x0):
        """Coefficients of ``p(x0 + t)`` in powers of ``t``.

        ``x0`` may be an array; the result then has shape ``(len(x0), deg+1)``.
        """
        x0 = np.asarray(x0, dtype=float)
        out = np.empty(x0.shape + (len(self.coeffs),))
        d = self
        fact = 1.0
        for k in range(len(self.coeffs)):
            out[..., k] = d.eval(x0) / fact
            d = d.derivative()
            fact *= k + 1
        return out

    def magnitude(self, x: float) -> float:
        """Sum of absolute term sizes at ``x``; a roundoff scale for ``eval``."""
        return float(sum(abs(c) * abs(x) ** k for k, c in enumerate(self.coeffs)))

    def __repr__(self) -> str:
        return f"Polynomial({list(self.coeffs)!r})"


def _as_poly(v) -> Polynomial:
    if isinstance(v, Polynomial):
        return v
    return Polynomial([float(v)])


# functional spellings of the core operations
def evaluate(p: Polynomial, x):
    return p.eval(x)


def derivative(p: Polynomial) -> Polynomial:
    return p.derivative()


def integrate_definite(p: Polynomial, a: float, b: float) -> float:
    return p.integrate(a, b)


def add(p: Polynomial, q: Polynomial) -> Polynomial:
    return p + q


def mul(p: Polynomial, q: Polynomial) -> Polynomial:
    return p * q
