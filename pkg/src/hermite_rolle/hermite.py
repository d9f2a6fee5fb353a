"""Hermite interpolation and both sides of its remainder identity."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputDataError, NodeSetError
from .polynomial import Polynomial
from .target_function import DifferentiableFunction

MAX_N = 80


@dataclass(frozen=True, init=False)
class NodeSet:
    nodes: tuple[float, ...]

    def __init__(self, nodes):
        xs = tuple(float(v) for v in nodes)
        if len(xs) < 2:
            raise NodeSetError("need at least two nodes")
        if not all(math.isfinite(v) for v in xs):
            raise NodeSetError("nodes must be finite")
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise NodeSetError(f"nodes must be strictly increasing: {xs}")
        object.__setattr__(self, "nodes", xs)

    @property
    def n(self) -> int:
        """Index of the last node; there are ``n + 1`` nodes."""
        return len(self.nodes) - 1

    @property
    def lo(self) -> float:
        return self.nodes[0]

    @property
    def hi(self) -> float:
        return self.nodes[-1]

    def __iter__(self):
        return iter(self.nodes)

    def __len__(self):
        return len(self.nodes)


@dataclass(frozen=True)
class HermiteInterpolant:
    poly: Polynomial
    nodes: NodeSet
    f_values: tuple[float, ...]
    df_values: tuple[float, ...]

    def __call__(self, x):
        return self.poly.eval(x)

    def check(self) -> list[tuple[float, float, float]]:
        """Per-node ``(x_k, value residual, slope residual)``."""
        dp = self.poly.derivative()
        return [
            (x, abs(self.poly.eval(x) - fv), abs(dp.eval(x) - dfv))
            for x, fv, dfv in zip(self.nodes, self.f_values, self.df_values)
        ]


def divided_differences(z, values, slopes) -> list[float]:
    """Newton coefficients on the doubled node sequence ``z``.

    Where two consecutive entries of ``z`` coincide, the first divided
    difference is taken from ``slopes`` instead.
    """
    m = len(z)
    table = list(values)
    coef = [table[0]]
    for level in range(1, m):
        nxt = []
        for i in range(m - level):
            if level == 1 and z[i + 1] == z[i]:
                nxt.append(slopes[i // 2])
            else:
                nxt.append((table[i + 1] - table[i]) / (z[i + level] - z[i]))
        table = nxt
        coef.append(table[0])
    return coef


def build_hermite(f: DifferentiableFunction, nodes) -> HermiteInterpolant:
    """Interpolant of degree ``<= 2n+1`` matching ``f`` and ``f'`` at every node."""
    if not isinstance(nodes, NodeSet):
        nodes = NodeSet(nodes)
    f.require_order(1, "Hermite data needs f'")
    fv = tuple(float(f.deriv(0, x)) for x in nodes)
    dfv = tuple(float(f.deriv(1, x)) for x in nodes)
    if not all(math.isfinite(v) for v in fv + dfv):
        raise InputDataError(f"non-finite function data at nodes {nodes.nodes}")

    z = [x for x in nodes for _ in (0, 1)]
    vals = [v for v in fv for _ in (0, 1)]
    coef = divided_differences(z, vals, dfv)

    # Newton form -> monomial, innermost factor first
    p = Polynomial([coef[-1]])
    for k in range(len(coef) - 2, -1, -1):
        p = p * Polynomial([-z[k], 1.0]) + coef[k]
    return HermiteInterpolant(p, nodes, fv, dfv)


def q_poly(nodes) -> Polynomial:
    """Node polynomial ``prod_k (x - x_k)``."""
    return Polynomial.from_roots(nodes)


def remainder_factorial(n: int) -> float:
    if n > MAX_N:
        raise InputDataError(f"n={n} exceeds supported maximum {MAX_N}")
    out = 1.0
    for k in range(2, 2 * n + 3):
        out *= k
    return out


def delta_true(f: DifferentiableFunction, H: HermiteInterpolant, x):
    return f.deriv(0, x) - H.poly.eval(x)


def delta_model(f: DifferentiableFunction, nodes, xi, x):
    """Remainder formula ``f^(2n+2)(xi) / (2n+2)! * Q(x)^2``."""
    if not isinstance(nodes, NodeSet):
        nodes = NodeSet(nodes)
    n = nodes.n
    f.require_order(2 * n + 2, "remainder term")
    q = q_poly(nodes).eval(x)
    return f.deriv(2 * n + 2, xi) / remainder_factorial(n) * q * q


def max_abs_delta(f: DifferentiableFunction, H: HermiteInterpolant, xs) -> float:
    return float(np.max(np.abs(delta_true(f, H, np.asarray(xs, dtype=float)))))
