"""Nabla fractional boundary value problems on a finite integer grid.

Taylor monomials and fractional sums/differences, the closed-form Green's
function of a two-point problem with mixed boundary conditions, its sign and
bound properties, a dense oracle solver and a Lyapunov-type inequality.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .calculus import GridFunction, frac_diff, frac_sum, nabla
from .errors import (DomainError, HypothesisViolation, NablaError, NoSignChange, PoleError,
                     SingularProblem, SingularSystem)
from .green import BoundaryParams, GreenTable, Problem, green, green_table, lambda_bound, omega, xi
from .lyapunov import LyapunovVerdict, evaluate_potential, find_constant_eigenpotential, lyapunov_threshold
from .monomials import Grid, gamma_ratio, monomial, monomial_ratio, rising, taylor
from .solver import BvpInstance, assemble_dense, solve_dense, solve_via_green

__all__ = [
    "BoundaryParams", "BvpInstance", "DomainError", "Grid", "GreenTable", "GridFunction",
    "HypothesisViolation", "LyapunovVerdict", "NablaError", "NoSignChange", "PoleError", "Problem",
    "SingularProblem", "SingularSystem", "assemble_dense", "evaluate_potential",
    "find_constant_eigenpotential", "frac_diff", "frac_sum", "gamma_ratio", "green", "green_table",
    "lambda_bound", "lyapunov_threshold", "monomial", "monomial_ratio", "nabla", "omega", "rising",
    "solve_dense", "solve_via_green", "taylor", "xi",
]
