"""The Rolle function of a Hermite interpolant, found by integrating an IVP.

Differentiating ``(2n+2)! (f - H) = f^(2n+2)(xi(x)) Q(x)^2`` in ``x`` gives

    dxi/dx = [(2n+2)! (f' - H') - 2 f^(2n+2)(xi) Q Q'] / [Q^2 f^(2n+3)(xi)]

An initial value ``xi(x_z)`` comes from solving the remainder identity
algebraically at an off-node point ``x_z``; every root is integrated and
branches leaving ``(x_0, x_n)`` are discarded.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .errors import (
    AllBranchesInvalidError,
    AmbiguousBranchError,
    DegenerateProblemError,
    InputDataError,
    NoRootError,
    SingularDenominatorError,
)
from .hermite import (
    HermiteInterpolant,
    NodeSet,
    build_hermite,
    delta_true,
    q_poly,
    remainder_factorial,
)
from .polynomial import Polynomial
from .rk import RKF7, ButcherTableau, rk_steps
from .target_function import DifferentiableFunction

log = logging.getLogger(__name__)

SING_REL = 1e-12
DEFAULT_SAMPLES = 100_000
DEFAULT_MARGIN = 1e-5
DEFAULT_XZ_OFFSET = 1e-5
DEFAULT_GRID = 10_000
BISECT_TOL = 1e-13


@dataclass(frozen=True)
class RolleProblem:
    f: DifferentiableFunction
    H: HermiteInterpolant
    nodes: NodeSet
    n: int
    Q: Polynomial
    Qprime: Polynomial
    Hprime: Polynomial
    factorial: float

    @classmethod
    def build(cls, f: DifferentiableFunction, nodes) -> "RolleProblem":
        if not isinstance(nodes, NodeSet):
            nodes = NodeSet(nodes)
        n = nodes.n
        f.require_order(2 * n + 3, "the Rolle ODE needs f^(2n+3)")
        H = build_hermite(f, nodes)
        Q = q_poly(nodes)
        return cls(f, H, nodes, n, Q, Q.derivative(), H.poly.derivative(),
                   remainder_factorial(n))

    @property
    def top(self) -> int:
        """Order of the derivative in the remainder term, ``2n+2``."""
        return 2 * self.n + 2

    def inside(self, xi: float) -> bool:
        return self.nodes.lo < xi < self.nodes.hi


def _singular(prob: RolleProblem, x, xi, num, den) -> Optional[SingularDenominatorError]:
    if abs(den) >= SING_REL * max(1.0, abs(num)):
        return None
    d = prob.f.deriv(prob.top + 1, xi)
    cause = "derivative" if abs(d) <= math.sqrt(SING_REL) else "node"
    return SingularDenominatorError(x, xi, den, cause)


def ode_terms(prob: RolleProblem, x: float, xi: float) -> tuple[float, float]:
    """Numerator and denominator of ``dxi/dx``, kept apart for monitoring."""
    f = prob.f
    q = prob.Q.eval(x)
    num = (prob.factorial * (f.deriv(1, x) - prob.Hprime.eval(x))
           - 2.0 * f.deriv(prob.top, xi) * q * prob.Qprime.eval(x))
    den = q * q * f.deriv(prob.top + 1, xi)
    return float(num), float(den)


def ode_rhs(prob: RolleProblem, x: float, xi: float) -> float:
    num, den = ode_terms(prob, x, xi)
    err = _singular(prob, x, xi, num, den)
    if err is not None:
        raise err
    return num / den


def sample_grid(nodes, x_z: float, samples: int = DEFAULT_SAMPLES) -> tuple[int, float]:
    """``(steps, margin)`` for ``samples`` RK values spaced ``(x_n - x_0)/samples``.

    The grid is the uniform partition of ``[x_0, x_n]`` shifted right by
    ``x_z - x_0``, so it stops ``h - (x_z - x_0)`` short of the last node.
    """
    if not isinstance(nodes, NodeSet):
        nodes = NodeSet(nodes)
    h = (nodes.hi - nodes.lo) / samples
    offset = x_z - nodes.lo
    if not 0 < offset < h:
        raise InputDataError(f"x_z offset {offset!r} must lie in (0, h={h!r})")
    return samples - 1, h - offset


def _array_deriv(f: DifferentiableFunction, k: int, xs: np.ndarray) -> np.ndarray:
    try:
        out = np.asarray(f.deriv(k, xs), dtype=float)
        if out.shape == xs.shape:
            return out
    except TypeError:
        pass
    return np.array([float(f.deriv(k, v)) for v in xs.ravel()]).reshape(xs.shape)


def mismatch(prob: RolleProblem, x_z: float, xis) -> np.ndarray:
    """``delta_model(xi) - delta_true`` at ``x_z`` for an array of ``xi``."""
    xis = np.asarray(xis, dtype=float)
    q = prob.Q.eval(x_z)
    model = _array_deriv(prob.f, prob.top, xis) / prob.factorial * q * q
    return model - float(delta_true(prob.f, prob.H, x_z))


def _bisect(g, a: float, b: float, ga: float, tol: float) -> float:
    while b - a > tol:
        m = 0.5 * (a + b)
        gm = g(m)
        if gm == 0.0:
            return m
        if (gm < 0) == (ga < 0):
            a, ga = m, gm
        else:
            b = m
    return 0.5 * (a + b)


def bootstrap_xi(prob: RolleProblem, x_z: float, grid: int = DEFAULT_GRID) -> list[float]:
    """All ``xi`` in ``(x_0, x_n)`` satisfying the remainder identity at ``x_z``.

    Uniform sign-change scan over ``grid`` points, refined by bisection.
    """
    lo, hi = prob.nodes.lo, prob.nodes.hi
    if not lo < x_z < hi or x_z in prob.nodes.nodes:
        raise InputDataError(f"x_z={x_z!r} must lie strictly between nodes")
    if grid < 100:
        raise InputDataError("bootstrap grid must have at least 100 points")

    xs = np.linspace(lo, hi, grid)
    gs = mismatch(prob, x_z, xs)
    q = prob.Q.eval(x_z)
    scale = (np.max(np.abs(gs + float(delta_true(prob.f, prob.H, x_z))))
             + abs(float(delta_true(prob.f, prob.H, x_z))))
    if np.ptp(gs) <= 1e-12 * scale or q == 0.0:
        raise DegenerateProblemError(
            f"remainder identity at x_z={x_z!r} does not depend on xi "
            f"(spread {np.ptp(gs):.3e}, scale {scale:.3e})"
        )

    def g(v):
        return float(mismatch(prob, x_z, [v])[0])

    roots = []
    for i in range(grid - 1):
        a, b = xs[i], xs[i + 1]
        if gs[i] == 0.0:
            roots.append(float(a))
        elif gs[i] * gs[i + 1] < 0:
            roots.append(_bisect(g, float(a), float(b), float(gs[i]), BISECT_TOL))
    roots = [r for r in roots if lo < r < hi]
    if not roots:
        raise NoRootError(
            f"no sign change of the remainder mismatch at x_z={x_z!r}; "
            "x_z may be too close to a node"
        )
    return sorted(roots)


@dataclass(frozen=True)
class RolleTrajectory:
    xs: np.ndarray
    xis: np.ndarray
    h: float
    x_start: float
    x_end: float
    xi_z: float
    min_denominator_seen: float
    truncated: bool = False
    invalid: bool = False
    note: str = ""
    accepted_xi_z: Optional[float] = None
    rejected_roots: tuple[float, ...] = field(default_factory=tuple)

    @property
    def valid(self) -> bool:
        return not self.invalid

    def __len__(self):
        return len(self.xs)


class _StageCache:
    """x-dependent pieces of the ODE at every RK stage, built in blocks."""

    def __init__(self, prob: RolleProblem, x0: float, h: float, c, steps: int,
                 block: int = 2048):
        self.prob, self.x0, self.h, self.block = prob, x0, h, block
        self.steps = steps
        self.c = np.array([float(v) for v in c])
        self.start = -2 * block

    def load(self, i: int):
        start = (i // self.block) * self.block
        steps = np.arange(start, min(start + self.block, self.steps), dtype=float)
        X = self.x0 + (steps[:, None] + self.c[None, :]) * self.h
        p = self.prob
        q = p.Q.eval(X)
        num0 = p.factorial * (_array_deriv(p.f, 1, X) - p.Hprime.eval(X))
        self.num0 = num0.tolist()
        self.qq2 = (2.0 * q * p.Qprime.eval(X)).tolist()
        self.q2 = (q * q).tolist()
        self.X = X.tolist()
        self.start = start


def solve_rolle(prob: RolleProblem, x_z: float, xi_z: float, steps: Optional[int] = None,
                margin: Optional[float] = None,
                tableau: ButcherTableau = RKF7) -> RolleTrajectory:
    """Integrate ``dxi/dx`` from ``x_z`` to ``x_n - margin`` in ``steps`` fixed steps.

    With neither ``steps`` nor ``margin`` given, the grid from
    :func:`sample_grid` with ``DEFAULT_SAMPLES`` values is used; otherwise
    the missing one defaults to 100000 steps or a 1e-5 margin.

    Integration stops early if ``xi`` leaves ``(x_0, x_n)`` (the trajectory
    is marked invalid, escaped sample included) or if the denominator
    becomes singular (marked truncated at the last good step).
    """
    if steps is None and margin is None:
        steps, margin = sample_grid(prob.nodes, x_z)
    steps = 100_000 if steps is None else steps
    margin = DEFAULT_MARGIN if margin is None else margin
    if steps < 10:
        raise InputDataError("steps must be >= 10")
    if not prob.inside(xi_z):
        raise InputDataError(f"xi_z={xi_z!r} outside ({prob.nodes.lo}, {prob.nodes.hi})")
    x_end = prob.nodes.hi - margin
    if not prob.nodes.lo < x_z < x_end:
        raise InputDataError(f"x_z={x_z!r} not inside the integration range")
    h = (x_end - x_z) / steps

    cache = _StageCache(prob, x_z, h, tableau.c, steps)
    f4 = prob.f.derivs[prob.top]
    f5 = prob.f.derivs[prob.top + 1]
    min_den = [math.inf]

    def rhs(i, j, xi):
        if not cache.start <= i < cache.start + cache.block:
            cache.load(i)
        r = i - cache.start
        num = cache.num0[r][j] - cache.qq2[r][j] * f4(xi)
        den = cache.q2[r][j] * f5(xi)
        if abs(den) < min_den[0]:
            min_den[0] = abs(den)
        if abs(den) < SING_REL * max(1.0, abs(num)):
            raise _singular(prob, cache.X[r][j], xi, num, den)
        return num / den

    xis = [float(xi_z)]
    truncated = invalid = False
    note = ""
    lo, hi = prob.nodes.lo, prob.nodes.hi
    try:
        for i, xi in rk_steps(rhs, float(xi_z), h, steps, tableau):
            xis.append(xi)
            if not (lo < xi < hi) or not math.isfinite(xi):
                invalid = True
                note = f"xi={xi!r} left ({lo}, {hi}) at x={x_z + i * h!r}"
                break
    except SingularDenominatorError as exc:
        truncated = True
        note = str(exc)
    if note:
        log.info("Rolle solve from xi_z=%r: %s", xi_z, note)

    xs = x_z + h * np.arange(len(xis))
    if not truncated and not invalid:
        xs[-1] = x_end
    return RolleTrajectory(
        xs=xs, xis=np.array(xis), h=h, x_start=x_z, x_end=float(xs[-1]), xi_z=float(xi_z),
        min_denominator_seen=min_den[0], truncated=truncated, invalid=invalid, note=note,
    )


def select_branch(prob: RolleProblem, x_z: float, candidates: Sequence[float],
                  steps: Optional[int] = None,
                  margin: Optional[float] = None) -> RolleTrajectory:
    """Integrate every candidate and keep the single branch staying inside the nodes."""
    if len(candidates) == 0:
        raise InputDataError("no candidate initial values")
    good, bad = [], []
    for xi_z in candidates:
        if not prob.inside(xi_z):
            bad.append(float(xi_z))
            continue
        traj = solve_rolle(prob, x_z, xi_z, steps, margin)
        (good if traj.valid else bad).append(traj if traj.valid else float(xi_z))
    if not good:
        raise AllBranchesInvalidError(
            f"every candidate left ({prob.nodes.lo}, {prob.nodes.hi}): {list(candidates)}")
    if len(good) > 1:
        raise AmbiguousBranchError([t.xi_z for t in good])
    return replace(good[0], accepted_xi_z=good[0].xi_z, rejected_roots=tuple(bad))
