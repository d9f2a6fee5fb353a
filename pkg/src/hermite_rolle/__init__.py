"""Rolle functions of Hermite interpolants and the error corrections they enable."""

from .corrector import (
    CorrectedApproximant,
    corrected_eval,
    corrected_polynomial,
    corrected_spline,
    error_polynomial,
    integration_report,
    node_consistency_check,
)
from .fitting import CubicSpline, FitResult, fit_clamped_spline, fit_polynomial_ls
from .hermite import NodeSet, build_hermite, delta_model, delta_true, q_poly
from .polynomial import Polynomial
from .rolle import RolleProblem, RolleTrajectory, bootstrap_xi, ode_rhs, select_branch, solve_rolle
from .target_function import DifferentiableFunction, builtin_exp_sin, from_callbacks

__version__ = "0.1.0"
