"""Approximating ``g(x) = f^(2n+2)(xi(x))`` from Rolle-trajectory samples.

Two surrogates are offered: a least-squares polynomial of chosen degree
and a clamped cubic spline through every sample.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    CapabilityError,
    FitError,
    InputDataError,
    SingularDenominatorError,
    SlopeEstimationError,
)
from .polynomial import Polynomial
from .rolle import RolleProblem, RolleTrajectory, ode_rhs
from .target_function import DifferentiableFunction


@dataclass(frozen=True)
class FitResult:
    h_xi: Polynomial
    degree: int
    V: float
    residual_max: float
    n_samples: int

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "coefficients": [float(f"{c:.17g}") for c in self.h_xi.coeffs],
            "V": self.V,
            "residual_max": self.residual_max,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def rolle_samples(traj: RolleTrajectory, prob: RolleProblem) -> np.ndarray:
    """``f^(2n+2)(xi_i)`` along the trajectory."""
    return np.asarray(prob.f.deriv(prob.top, traj.xis), dtype=float)


def fit_polynomial_ls(xs, ys, degree: int) -> FitResult:
    """Least-squares polynomial of ``degree`` through ``(xs, ys)``.

    Solved by Householder QR on a Vandermonde matrix in coordinates mapped
    to ``[-1, 1]``; the solution is mapped back to monomials in ``x``.
    ``V`` is ``sqrt(RSS) / N``.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise InputDataError("xs and ys must be 1-d arrays of equal length")
    if not 0 <= degree < len(xs):
        raise InputDataError(f"need len(xs) > degree >= 0, got {len(xs)} and {degree}")

    a, b = float(xs.min()), float(xs.max())
    if b == a:
        raise FitError("all abscissae coincide")
    alpha, beta = 2.0 / (b - a), -(a + b) / (b - a)
    t = alpha * xs + beta
    A = np.vander(t, degree + 1, increasing=True)
    Qm, R = np.linalg.qr(A)
    diag = np.abs(np.diag(R))
    if diag.min() <= 1e-13 * diag.max():
        raise FitError(f"rank-deficient design for degree {degree}")
    c = np.linalg.solve(R, Qm.T @ ys)

    h_xi = Polynomial(c).compose_affine(alpha, beta)
    resid = ys - h_xi.eval(xs)
    V = math.sqrt(float(np.sum(resid * resid))) / len(xs)
    return FitResult(h_xi, degree, V, float(np.max(np.abs(resid))), len(xs))


@dataclass(frozen=True)
class CubicSpline:
    """Piecewise cubic; on interval ``i`` the value is
    ``a[i] + b[i] t + c[i] t^2 + d[i] t^3`` with ``t = x - knots[i]``.

    Evaluation outside the knot range extends the end pieces.
    """

    knots: np.ndarray
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray
    s0: float
    s1: float

    def _locate(self, x):
        x = np.asarray(x, dtype=float)
        i = np.clip(np.searchsorted(self.knots, x, side="right") - 1, 0, len(self.knots) - 2)
        return i, x - self.knots[i]

    def __call__(self, x, nu: int = 0):
        i, t = self._locate(x)
        a, b, c, d = self.a[i], self.b[i], self.c[i], self.d[i]
        if nu == 0:
            out = a + t * (b + t * (c + t * d))
        elif nu == 1:
            out = b + t * (2 * c + 3 * t * d)
        elif nu == 2:
            out = 2 * c + 6 * t * d
        else:
            raise ValueError("only derivatives up to order 2")
        return out if np.ndim(out) else float(out)

    def piece_coefficients(self) -> np.ndarray:
        """``(intervals, 4)`` local coefficients, ascending in ``t``."""
        return np.stack([self.a, self.b, self.c, self.d], axis=1)


def _thomas(sub, diag, sup, rhs):
    """Tridiagonal solve by forward elimination and back substitution."""
    m = len(diag)
    cp = [0.0] * m
    dp = [0.0] * m
    cp[0] = sup[0] / diag[0]
    dp[0] = rhs[0] / diag[0]
    for i in range(1, m):
        den = diag[i] - sub[i] * cp[i - 1]
        cp[i] = sup[i] / den if i < m - 1 else 0.0
        dp[i] = (rhs[i] - sub[i] * dp[i - 1]) / den
    out = [0.0] * m
    out[-1] = dp[-1]
    for i in range(m - 2, -1, -1):
        out[i] = dp[i] - cp[i] * out[i + 1]
    return np.array(out)


def clamped_moment_system(xs, ys, s0: float, s1: float):
    """Tridiagonal system for the knot second derivatives of a clamped spline.

    Returns ``(sub, diag, sup, rhs)``; ``sub[0]`` and ``sup[-1]`` are unused.
    """
    h = np.diff(xs)
    slope = np.diff(ys) / h
    m = len(xs)
    sub = np.zeros(m)
    diag = np.zeros(m)
    sup = np.zeros(m)
    rhs = np.zeros(m)
    diag[0], sup[0], rhs[0] = 2 * h[0], h[0], 6 * (slope[0] - s0)
    diag[-1], sub[-1], rhs[-1] = 2 * h[-1], h[-1], 6 * (s1 - slope[-1])
    sub[1:-1] = h[:-1]
    diag[1:-1] = 2 * (h[:-1] + h[1:])
    sup[1:-1] = h[1:]
    rhs[1:-1] = 6 * (slope[1:] - slope[:-1])
    return sub, diag, sup, rhs


def spline_from_moments(xs, ys, M, s0: float, s1: float) -> CubicSpline:
    h = np.diff(xs)
    a = ys[:-1].copy()
    b = np.diff(ys) / h - h * (2 * M[:-1] + M[1:]) / 6
    c = M[:-1] / 2
    d = np.diff(M) / (6 * h)
    return CubicSpline(xs.copy(), a, b, c, d, float(s0), float(s1))


def fit_clamped_spline(xs, ys, s0: float, s1: float) -> CubicSpline:
    """Clamped cubic spline through ``(xs, ys)`` with end slopes ``s0``, ``s1``."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or len(xs) < 3:
        raise InputDataError("need at least three matching samples")
    if np.any(np.diff(xs) <= 0):
        raise InputDataError("spline knots must be strictly increasing")
    sub, diag, sup, rhs = clamped_moment_system(xs, ys, s0, s1)
    M = _thomas(sub.tolist(), diag.tolist(), sup.tolist(), rhs.tolist())
    return spline_from_moments(xs, ys, M, s0, s1)


def one_sided_slope(xs, ys, end: str) -> float:
    """Four-point one-sided first derivative at the ``"left"`` or ``"right"`` end."""
    if len(xs) < 4:
        raise SlopeEstimationError("finite differences need four samples")
    if end == "left":
        y, h = ys[:4], xs[1] - xs[0]
        return float((-11 * y[0] + 18 * y[1] - 9 * y[2] + 2 * y[3]) / (6 * h))
    y, h = ys[-4:], xs[-1] - xs[-2]
    return float((11 * y[3] - 18 * y[2] + 9 * y[1] - 2 * y[0]) / (6 * h))


def spline_end_slopes(traj: RolleTrajectory, prob: RolleProblem) -> tuple[float, float]:
    """``d/dx f^(2n+2)(xi(x))`` at both trajectory ends.

    Chain rule ``f^(2n+3)(xi) * dxi/dx`` with the slope from the ODE; if the
    ODE is singular there, or the end is a truncation point, a one-sided
    finite difference of the samples is used instead.
    """
    g = rolle_samples(traj, prob)

    def at(idx, end):
        if not (end == "right" and traj.truncated):
            x, xi = float(traj.xs[idx]), float(traj.xis[idx])
            try:
                return float(prob.f.deriv(prob.top + 1, xi)) * ode_rhs(prob, x, xi)
            except SingularDenominatorError:
                pass
        return one_sided_slope(traj.xs, g, end)

    return at(0, "left"), at(-1, "right")


def spline_error_bound(f: DifferentiableFunction, traj: RolleTrajectory,
                       prob: RolleProblem) -> float:
    """``5 max_i |f^(2n+6)(x_i)| h^4 / 384`` over the trajectory samples."""
    order = prob.top + 4
    if f.max_order < order:
        raise CapabilityError(f"spline bound needs f^({order}); max_order is {f.max_order}")
    peak = float(np.max(np.abs(f.deriv(order, traj.xs))))
    return 5.0 * peak / 384.0 * traj.h ** 4
