"""Error-corrected approximants ``H + E`` and the reports built on them.

``E(x) = H_xi(x) Q(x)^2 / (2n+2)!`` where ``H_xi`` approximates
``f^(2n+2)(xi(x))``.  With a polynomial ``H_xi`` the correction is a
single polynomial; with a spline it is kept as the product.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import SplineDomainError
from .fitting import CubicSpline
from .hermite import HermiteInterpolant, NodeSet, delta_model, delta_true, q_poly, remainder_factorial
from .polynomial import Polynomial
from .target_function import DifferentiableFunction

NODE_TOL = 1e-9


def error_polynomial(h_xi: Polynomial, nodes, n: Optional[int] = None) -> Polynomial:
    if not isinstance(nodes, NodeSet):
        nodes = NodeSet(nodes)
    n = nodes.n if n is None else n
    Q = q_poly(nodes)
    return h_xi * (Q * Q) * (1.0 / remainder_factorial(n))


@dataclass(frozen=True)
class CorrectedApproximant:
    H: HermiteInterpolant
    kind: str  # "polynomial" or "spline"
    E_poly: Optional[Polynomial] = None
    spline: Optional[CubicSpline] = None
    Q2: Polynomial = field(default=None)
    factorial_scale: float = 1.0

    @property
    def nodes(self) -> NodeSet:
        return self.H.nodes

    def _check_domain(self, x):
        if self.kind != "spline":
            return
        x = np.asarray(x)
        lo, hi = self.nodes.lo, self.nodes.hi
        if np.any(x < lo) or np.any(x > hi):
            raise SplineDomainError(f"spline correction is defined on [{lo}, {hi}] only")

    def E(self, x):
        self._check_domain(x)
        if self.kind == "polynomial":
            return self.E_poly.eval(x)
        return self.spline(x) * self.Q2.eval(x) * self.factorial_scale

    def dE(self, x):
        self._check_domain(x)
        if self.kind == "polynomial":
            return self.E_poly.derivative().eval(x)
        Q2 = self.Q2
        return (self.spline(x, 1) * Q2.eval(x)
                + self.spline(x) * Q2.derivative().eval(x)) * self.factorial_scale

    def __call__(self, x):
        return self.H.poly.eval(x) + self.E(x)


def corrected_polynomial(H: HermiteInterpolant, h_xi: Polynomial) -> CorrectedApproximant:
    nodes = H.nodes
    Q = q_poly(nodes)
    return CorrectedApproximant(
        H, "polynomial", E_poly=error_polynomial(h_xi, nodes), Q2=Q * Q,
        factorial_scale=1.0 / remainder_factorial(nodes.n),
    )


def corrected_spline(H: HermiteInterpolant, spline: CubicSpline) -> CorrectedApproximant:
    nodes = H.nodes
    Q = q_poly(nodes)
    return CorrectedApproximant(
        H, "spline", spline=spline, Q2=Q * Q,
        factorial_scale=1.0 / remainder_factorial(nodes.n),
    )


def corrected_eval(ca: CorrectedApproximant, x):
    return ca(x)


def max_error(ca: CorrectedApproximant, f: DifferentiableFunction, xs) -> float:
    xs = np.asarray(xs, dtype=float)
    return float(np.max(np.abs(f.deriv(0, xs) - ca(xs))))


@dataclass
class NodeReport:
    rows: list  # (x_k, value error, slope error, value tol, slope tol)
    passed: bool

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "nodes": [
                {"x": x, "value_error": ev, "slope_error": ed} for x, ev, ed, _, _ in self.rows
            ],
        }


def node_consistency_check(ca: CorrectedApproximant, f: DifferentiableFunction,
                           tol: float = NODE_TOL) -> NodeReport:
    """Does ``H + E`` still match ``f`` and ``f'`` at every node?"""
    dH = ca.H.poly.derivative()
    rows = []
    ok = True
    for x in ca.nodes:
        fv, dfv = float(f.deriv(0, x)), float(f.deriv(1, x))
        ev = abs(float(ca(x)) - fv)
        ed = abs(float(dH.eval(x) + ca.dE(x)) - dfv)
        tv, td = tol * (1 + abs(fv)), tol * (1 + abs(dfv))
        ok = ok and ev <= tv and ed <= td
        rows.append((x, ev, ed, tv, td))
    return NodeReport(rows, ok)


def _integrate_spline_product(ca: CorrectedApproximant) -> float:
    """Exact integral of ``spline * Q^2 / (2n+2)!`` over ``[x_0, x_n]``.

    Each piece is expanded in its local variable into a polynomial of
    degree ``2n+5`` and integrated in closed form; the end pieces also
    cover the gaps between the outer knots and the nodes.
    """
    sp = ca.spline
    knots = sp.knots
    lo = np.concatenate([[ca.nodes.lo], knots[1:-1]])
    hi = np.concatenate([knots[1:-1], [ca.nodes.hi]])
    base = knots[:-1]
    t_lo, t_hi = lo - base, hi - base

    s = sp.piece_coefficients()                # (m, 4)
    q = ca.Q2.taylor_shift(base)               # (m, deg Q2 + 1)
    prod = np.zeros((len(base), s.shape[1] + q.shape[1] - 1))
    for j in range(s.shape[1]):
        prod[:, j:j + q.shape[1]] += s[:, [j]] * q
    total = np.zeros(len(base))
    for k in range(prod.shape[1]):
        total += prod[:, k] * (t_hi ** (k + 1) - t_lo ** (k + 1)) / (k + 1)
    return math.fsum(total.tolist()) * ca.factorial_scale


def integrate_corrected(ca: CorrectedApproximant) -> tuple[float, float]:
    """``(integral of H, integral of H + E)`` over ``[x_0, x_n]``."""
    a, b = ca.nodes.lo, ca.nodes.hi
    iH = ca.H.poly.integrate(a, b)
    if ca.kind == "polynomial":
        iE = ca.E_poly.integrate(a, b)
    else:
        iE = _integrate_spline_product(ca)
    return iH, iH + iE


def integration_report(ca: CorrectedApproximant, f_exact_integral: float) -> dict:
    iH, iHE = integrate_corrected(ca)
    return {
        "kind": ca.kind,
        "integral_f": f_exact_integral,
        "integral_H": iH,
        "integral_H_plus_E": iHE,
        "error_H": abs(f_exact_integral - iH),
        "error_H_plus_E": abs(f_exact_integral - iHE),
    }


def error_curves(f: DifferentiableFunction, H: HermiteInterpolant, xs, xis):
    """Columns ``x, delta_true, delta_model, difference`` along a trajectory."""
    xs = np.asarray(xs, dtype=float)
    dt = np.asarray(delta_true(f, H, xs), dtype=float)
    dm = np.asarray(delta_model(f, H.nodes, np.asarray(xis, dtype=float), xs), dtype=float)
    return xs, dt, dm, dt - dm
