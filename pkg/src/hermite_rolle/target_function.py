"""Target functions carrying a closed-form derivative stack."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ConfigError, OrderOutOfRangeError
from .polynomial import Polynomial

Deriv = Callable[[float], float]


@dataclass(frozen=True)
class DifferentiableFunction:
    """A real function with derivatives ``f^(0) .. f^(max_order)``.

    ``antiderivative`` is optional and only used for integration reports.
    """

    name: str
    derivs: tuple[Deriv, ...]
    antiderivative: Optional[Deriv] = None

    def __post_init__(self):
        if len(self.derivs) == 0:
            raise ValueError("need at least the function itself")

    @property
    def max_order(self) -> int:
        return len(self.derivs) - 1

    def deriv(self, k: int, x):
        if not 0 <= k <= self.max_order:
            raise OrderOutOfRangeError(k, self.max_order)
        return self.derivs[k](x)

    def __call__(self, x):
        return self.derivs[0](x)

    def require_order(self, order: int, why: str = "") -> None:
        if self.max_order < order:
            msg = f"{self.name}: max_order {self.max_order} < required {order}"
            raise ConfigError(msg + (f" ({why})" if why else ""))


def from_callbacks(derivs: Sequence[Deriv], name: str = "callback",
                   antiderivative: Optional[Deriv] = None) -> DifferentiableFunction:
    if len(derivs) == 0:
        raise ValueError("derivs must be non-empty")
    return DifferentiableFunction(name, tuple(derivs), antiderivative)


def _exp_sin_factors(k: int) -> tuple[int, int]:
    # d/dx e^x (p sin + q cos) = e^x ((p - q) sin + (p + q) cos)
    p, q = 1, 0
    for _ in range(k):
        p, q = p - q, p + q
    return p, q


def _exp_sin_deriv(k: int) -> Deriv:
    p, q = _exp_sin_factors(k)

    def d(x):
        if np.ndim(x) == 0:
            x = float(x)
            return math.exp(x) * (p * math.sin(x) + q * math.cos(x))
        x = np.asarray(x, dtype=float)
        return np.exp(x) * (p * np.sin(x) + q * np.cos(x))

    return d


def builtin_exp_sin(max_order: int = 12) -> DifferentiableFunction:
    """``f(x) = e^x sin x`` with exact integer-coefficient derivatives."""
    def anti(x):
        if np.ndim(x) == 0:
            x = float(x)
            return 0.5 * math.exp(x) * (math.sin(x) - math.cos(x))
        return 0.5 * np.exp(x) * (np.sin(x) - np.cos(x))

    return DifferentiableFunction(
        "exp-sin", tuple(_exp_sin_deriv(k) for k in range(max_order + 1)), anti
    )


def polynomial_function(coeffs: Sequence[float], name: str = "polynomial",
                        max_order: int = 16) -> DifferentiableFunction:
    """Wrap a polynomial as a target; derivatives past its degree are zero."""
    p = Polynomial(coeffs)
    stack = []
    for _ in range(max_order + 1):
        stack.append(p)
        p = p.derivative()
    P = Polynomial(coeffs).antiderivative()
    return DifferentiableFunction(name, tuple(q.eval for q in stack), P.eval)


def builtin_exp(max_order: int = 16) -> DifferentiableFunction:
    def e(x):
        return math.exp(x) if np.ndim(x) == 0 else np.exp(x)

    return DifferentiableFunction("exp", (e,) * (max_order + 1), e)


REGISTRY: dict[str, Callable[[], DifferentiableFunction]] = {
    "exp-sin": builtin_exp_sin,
    "exp": builtin_exp,
    "cube": lambda: polynomial_function([0, 0, 0, 1], "cube"),
    "quartic": lambda: polynomial_function([0, 0, 0, 0, 1], "quartic"),
}


def lookup(name: str) -> DifferentiableFunction:
    try:
        return REGISTRY[name]()
    except KeyError:
        known = ", ".join(sorted(REGISTRY))
        raise ConfigError(f"unknown function {name!r}; known: {known}") from None
