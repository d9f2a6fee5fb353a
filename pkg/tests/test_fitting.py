import json
import math
from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest
import scipy.interpolate
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from hermite_rolle.errors import CapabilityError, FitError, InputDataError
from hermite_rolle.fitting import (
    clamped_moment_system,
    fit_clamped_spline,
    fit_polynomial_ls,
    one_sided_slope,
    spline_end_slopes,
    spline_error_bound,
)
from hermite_rolle.polynomial import Polynomial
from hermite_rolle.rolle import RolleProblem, RolleTrajectory
from hermite_rolle.target_function import builtin_exp_sin, from_callbacks

X1 = 3 * math.pi / 2


def rss(p, xs, ys):
    r = ys - p(xs)
    return float(np.sum(r * r))


def normal_equations_exact(xs, ys, degree):
    """Normal equations solved in rational arithmetic (oracle)."""
    X = [Fraction(v) for v in xs]
    Y = [Fraction(v) for v in ys]
    m = degree + 1
    M = [[sum(x ** (i + j) for x in X) for j in range(m)] for i in range(m)]
    r = [sum(y * x**i for x, y in zip(X, Y)) for i in range(m)]
    for k in range(m):
        for i in range(k + 1, m):
            t = M[i][k] / M[k][k]
            M[i] = [a - t * b for a, b in zip(M[i], M[k])]
            r[i] -= t * r[k]
    c = [Fraction(0)] * m
    for i in reversed(range(m)):
        c[i] = (r[i] - sum(M[i][j] * c[j] for j in range(i + 1, m))) / M[i][i]
    return [float(v) for v in c]


# least squares


def test_exact_cubic_recovery():
    xs = np.linspace(0, X1, 500)
    ys = 1 - 2 * xs + 0.5 * xs**2 + 0.25 * xs**3
    fr = fit_polynomial_ls(xs, ys, 3)
    assert fr.residual_max <= 1e-9
    assert fr.V <= 1e-12
    assert np.allclose(fr.h_xi.coeffs, [1, -2, 0.5, 0.25], atol=1e-10)


def test_degree_two_matches_normal_equations_oracle():
    xs = [0.0, 0.5, 1.0, 1.5, 2.0]
    ys = [1.0, 0.2, -0.3, 0.9, 2.5]
    fr = fit_polynomial_ls(xs, ys, 2)
    assert np.allclose(fr.h_xi.coeffs, normal_equations_exact(xs, ys, 2), rtol=1e-8, atol=1e-8)


def test_V_is_rss_root_over_count():
    xs = np.array([0.0, 1.0, 2.0, 3.0])
    ys = np.array([0.0, 1.0, 0.0, 1.0])
    fr = fit_polynomial_ls(xs, ys, 1)
    assert fr.V == pytest.approx(math.sqrt(rss(fr.h_xi, xs, ys)) / 4, rel=1e-12)


def test_rank_deficiency_and_bad_input():
    with pytest.raises(FitError):
        fit_polynomial_ls([1.0, 1.0, 1.0], [1.0, 2.0, 3.0], 1)
    with pytest.raises(FitError):
        fit_polynomial_ls([0.0, 0.0, 0.0, 1.0, 1.0, 1.0], np.arange(6.0), 3)
    with pytest.raises(InputDataError):
        fit_polynomial_ls([0.0, 1.0], [0.0, 1.0], 2)
    with pytest.raises(InputDataError):
        fit_polynomial_ls([0.0, 1.0, 2.0], [0.0, 1.0], 1)


def test_worked_example_degree_nine_V(worked):
    fr = fit_polynomial_ls(worked.traj.xs, worked.g, 9)
    assert 9.6e-9 / 3 <= fr.V <= 9.6e-9 * 3


def test_V_non_increasing_with_degree(worked):
    Vs = [fit_polynomial_ls(worked.traj.xs, worked.g, d).V for d in (5, 7, 9, 11)]
    assert all(b <= a for a, b in zip(Vs, Vs[1:])), Vs


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 6), st.integers(0, 2**32 - 1))
def test_least_squares_optimality(degree, seed):
    rng = np.random.default_rng(seed)
    xs = np.sort(rng.uniform(-1, 2, 40))
    ys = np.sin(3 * xs) + rng.normal(0, 0.1, 40)
    fr = fit_polynomial_ls(xs, ys, degree)
    base = rss(fr.h_xi, xs, ys)
    c = np.array(fr.h_xi.coeffs + (0.0,) * (degree + 1 - len(fr.h_xi.coeffs)))
    for k in range(degree + 1):
        for step in (1e-6, -1e-6):
            e = c.copy()
            e[k] += step
            assert rss(Polynomial(e), xs, ys) >= base * (1 - 1e-12)


def test_fit_result_json():
    fr = fit_polynomial_ls([0.0, 1.0, 2.0, 3.0], [1.0, 3.0, 5.0, 7.1], 1)
    d = json.loads(fr.to_json())
    assert set(d) == {"degree", "coefficients", "V", "residual_max"}
    assert d["degree"] == 1
    assert d["coefficients"] == [float(f"{c:.17g}") for c in fr.h_xi.coeffs]


# clamped spline


def test_spline_reproduces_cubic():
    p = Polynomial([0.3, -1.0, 2.0, 0.7])
    xs = np.array([0.0, 0.4, 1.1, 1.5, 2.3, 3.0])
    dp = p.derivative()
    sp = fit_clamped_spline(xs, p(xs), dp(xs[0]), dp(xs[-1]))
    for i, x0 in enumerate(xs[:-1]):
        local = p.taylor_shift(np.array([x0]))[0]
        assert np.allclose(sp.piece_coefficients()[i], local, atol=1e-10)


def _c2_jumps(sp):
    """(left limit, right value) pairs for value, slope and curvature at interior knots."""
    h = np.diff(sp.knots)[:-1]
    a, b, c, d = sp.a[:-1], sp.b[:-1], sp.c[:-1], sp.d[:-1]
    v = a + h * (b + h * (c + h * d))
    d1 = b + h * (2 * c + 3 * h * d)
    d2 = 2 * c + 6 * h * d
    return [(v, sp.a[1:]), (d1, sp.b[1:]), (d2, 2 * sp.c[1:])]


def test_spline_c2_and_clamp_on_worked_data(worked, prob):
    s0, s1 = spline_end_slopes(worked.traj, prob)
    sp = fit_clamped_spline(worked.traj.xs, worked.g, s0, s1)
    for lhs, rhs in _c2_jumps(sp):
        scale = np.maximum(np.abs(rhs), np.max(np.abs(rhs)) * 1e-8)
        assert np.all(np.abs(lhs - rhs) <= 1e-8 * scale)
    assert sp(sp.knots[0], 1) == pytest.approx(s0, abs=1e-10)
    assert sp(sp.knots[-1], 1) == pytest.approx(s1, abs=1e-10 * max(1, abs(s1)))
    assert np.allclose(sp(worked.traj.xs), worked.g, rtol=0, atol=1e-12)


def test_spline_against_banded_oracle(rng):
    xs = np.sort(np.concatenate([[0.0, 5.0], rng.uniform(0, 5, 38)]))
    ys = np.cos(xs) * np.exp(-xs / 3)
    s0, s1 = 0.3, -0.2
    sp = fit_clamped_spline(xs, ys, s0, s1)
    # the same moment system solved by LAPACK's banded LU
    sub, diag, sup, rhs = clamped_moment_system(xs, ys, s0, s1)
    ab = np.zeros((3, len(xs)))
    ab[0, 1:], ab[1], ab[2, :-1] = sup[:-1], diag, sub[1:]
    M = scipy.linalg.solve_banded((1, 1), ab, rhs)
    ref = scipy.interpolate.CubicSpline(xs, ys, bc_type=((1, s0), (1, s1)))
    t = np.sort(rng.uniform(0, 5, 1000))
    t = t[~np.isin(t, xs)]
    assert np.allclose(sp(t), ref(t), rtol=1e-10, atol=1e-12)
    assert np.allclose(sp(xs, 2), M, rtol=1e-10, atol=1e-10)


def test_spline_rejects_bad_knots():
    with pytest.raises(InputDataError):
        fit_clamped_spline([0.0, 1.0, 1.0], [0.0, 1.0, 2.0], 0.0, 0.0)
    with pytest.raises(InputDataError):
        fit_clamped_spline([0.0, 1.0], [0.0, 1.0], 0.0, 0.0)


# end slopes


def test_left_slope_chain_rule_matches_fd(worked, prob):
    s0, _ = spline_end_slopes(worked.traj, prob)
    fd = one_sided_slope(worked.traj.xs, worked.g, "left")
    assert s0 == pytest.approx(fd, rel=1e-4)


def test_constant_samples_give_zero_slopes():
    # f^(4) constant means g is constant whatever xi does; f^(5) = 0 kills the chain rule too
    f = from_callbacks([lambda x: x**4 / 24, lambda x: x**3 / 6, lambda x: x**2 / 2,
                        lambda x: x, lambda x: 1.0 + 0 * x, lambda x: 0 * x])
    p = RolleProblem.build(f, [0.0, 1.0])
    xs = np.linspace(0.01, 0.99, 50)
    traj = RolleTrajectory(xs, np.full(50, 0.5), xs[1] - xs[0], xs[0], xs[-1], 0.5, 1.0,
                           truncated=False, invalid=False)
    assert spline_end_slopes(traj, p) == (0.0, 0.0)


def test_truncated_end_uses_finite_differences(worked, prob):
    t = worked.traj
    cut = replace(t, xs=t.xs[:5000], xis=t.xis[:5000], truncated=True)
    s0, s1 = spline_end_slopes(cut, prob)
    g = worked.g[:5000]
    assert s1 == one_sided_slope(cut.xs, g, "right")
    assert s0 != one_sided_slope(cut.xs, g, "left")


def test_one_sided_slope_exact_on_cubics():
    xs = np.linspace(1, 2, 10)
    ys = xs**3
    assert one_sided_slope(xs, ys, "left") == pytest.approx(3.0, rel=1e-10)
    assert one_sided_slope(xs, ys, "right") == pytest.approx(12.0, rel=1e-10)


# error bound


def test_bound_worked_example(worked):
    b = spline_error_bound(worked.f, worked.traj, worked.prob)
    assert 1.14e-16 / 2 <= b <= 1.14e-16 * 2


def test_bound_scales_with_h4(worked):
    t = worked.traj
    b1 = spline_error_bound(worked.f, t, worked.prob)
    b2 = spline_error_bound(worked.f, replace(t, h=2 * t.h), worked.prob)
    assert b2 / b1 == pytest.approx(16, rel=1e-12)


def test_bound_sample_max_matches_dense_max(worked):
    # |f^(8)| = 16 e^x |sin x| peaks inside [x_0, x_n] far from the ends
    dense = np.linspace(worked.traj.xs[0], worked.traj.xs[-1], 1_000_000)
    peak = np.max(np.abs(worked.f.deriv(8, dense)))
    b = spline_error_bound(worked.f, worked.traj, worked.prob)
    assert b == pytest.approx(5 * peak / 384 * worked.traj.h**4, rel=1e-6)


def test_bound_needs_derivatives(worked):
    short = builtin_exp_sin(max_order=7)
    with pytest.raises(CapabilityError):
        spline_error_bound(short, worked.traj, worked.prob)
