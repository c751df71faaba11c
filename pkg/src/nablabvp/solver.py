"""Solving the forced boundary value problem two independent ways.

``solve_via_green`` sums the closed-form Green's function against the
forcing.  ``assemble_dense`` / ``solve_dense`` build and factor the square
linear system straight from the fractional-difference weights and the two
boundary rows; it never touches the Green's function and serves as the
oracle for it.

The difference operator in the dense rows acts on ``u - u(a)``:

    (L u)(t) = sum_k w_k(t) (u(a+k) - u(a)),     t = a+2..b,

which equals the fractional difference of ``nabla u`` of order nu - 1 and
reduces to the classical second difference at nu = 2.  This is the operator
whose homogeneous problem is trivial exactly when ``xi != 0`` and for which
the closed-form G is the impulse response.  ``anchored=False`` drops the
``u(a)`` terms and gives the operator that ignores u(a) altogether.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .calculus import GridFunction, weight_matrix
from .errors import DomainError, SingularSystem
from .green import Problem, green_table

log = logging.getLogger(__name__)

PIVOT_THRESHOLD = 1e-13
RESIDUAL_THRESHOLD = 1e-10


@dataclass(frozen=True)
class BvpInstance:
    problem: Problem
    forcing: GridFunction

    def __post_init__(self):
        if self.forcing.grid.n != self.problem.n:
            raise DomainError("forcing grid does not match the problem grid")
        if self.forcing.start_offset != 1:
            raise DomainError("forcing must be given on offsets 1..n")

    @classmethod
    def from_values(cls, problem: Problem, h) -> BvpInstance:
        return cls(problem, GridFunction(problem.grid, 1, h))


@dataclass(frozen=True)
class DenseSystem:
    """Square system over u(a), ..., u(b).

    Rows 0..n-2 are the equations at t = a+2..b, row n-1 the left boundary
    condition, row n the right one.
    """

    problem: Problem
    matrix: np.ndarray
    rhs: np.ndarray

    @property
    def n(self) -> int:
        return self.problem.n

    def residual_norm(self, x: np.ndarray) -> float:
        r = np.max(np.abs(self.matrix @ x - self.rhs), initial=0.0)
        b = np.max(np.abs(self.rhs), initial=0.0)
        return float(r / b) if b > 0 else float(r)

    def with_potential(self, q: np.ndarray) -> DenseSystem:
        """Subtract q(t) from the u(t) entry of every equation row (q on offsets 1..n)."""
        q = np.asarray(q, dtype=float)
        if q.shape != (self.n,):
            raise DomainError(f"potential needs {self.n} values, got shape {q.shape}")
        M = self.matrix.copy()
        t = np.arange(2, self.n + 1)
        M[t - 2, t] -= q[t - 1]
        return DenseSystem(self.problem, M, self.rhs.copy())


def operator_matrix(problem: Problem, anchored: bool = True) -> np.ndarray:
    """(n-1) x (n+1) matrix of -L over u(a..b) for the rows t = a+2..b."""
    n = problem.n
    W = weight_matrix(problem.nu, n)
    A = np.zeros((n - 1, n + 1))
    A[:, 1:] = -W
    if anchored:
        A[:, 0] = W.sum(axis=1)
    return A


def boundary_rows(problem: Problem) -> np.ndarray:
    """Left and right boundary conditions as two rows over u(a..b)."""
    n = problem.n
    al, be, ga, de = problem.bc.as_tuple()
    B = np.zeros((2, n + 1))
    # alpha u(a+1) - beta (u(a+1) - u(a))
    B[0, 0], B[0, 1] = be, al - be
    # gamma u(b) + delta (u(b) - u(b-1))
    B[1, n] += ga + de
    B[1, n - 1] += -de
    return B


def assemble_dense(instance: BvpInstance, anchored: bool = True) -> DenseSystem:
    problem = instance.problem
    n = problem.n
    M = np.vstack([operator_matrix(problem, anchored), boundary_rows(problem)])
    rhs = np.zeros(n + 1)
    rhs[: n - 1] = instance.forcing.values[1:]
    return DenseSystem(problem, M, rhs)


def _equilibrate(M: np.ndarray) -> np.ndarray:
    scale = np.max(np.abs(M), axis=1)
    scale[scale == 0] = 1.0
    return scale


def solve_dense(system: DenseSystem) -> GridFunction:
    """LU with partial pivoting on the row-equilibrated system."""
    scale = _equilibrate(system.matrix)
    A = system.matrix / scale[:, None]
    b = system.rhs / scale
    lu, piv = linalg.lu_factor(A, check_finite=True)
    pivots = np.abs(np.diag(lu))
    if pivots.min() < PIVOT_THRESHOLD:
        k = int(pivots.argmin())
        raise SingularSystem(f"pivot {pivots[k]:.3e} at step {k} is below {PIVOT_THRESHOLD:g}")
    x = linalg.lu_solve((lu, piv), b)
    res = system.residual_norm(x)
    if res > RESIDUAL_THRESHOLD:
        log.warning("dense solve residual %.3e exceeds %.0e", res, RESIDUAL_THRESHOLD)
    else:
        log.debug("dense solve residual %.3e", res)
    return GridFunction(system.problem.grid, 0, x)


def scaled_determinant(matrix: np.ndarray) -> float:
    """det(M) divided by the product of the row 2-norms, so |value| <= 1."""
    norms = np.linalg.norm(matrix, axis=1)
    if np.any(norms == 0):
        return 0.0
    sign, logdet = np.linalg.slogdet(matrix)
    if sign == 0:
        return 0.0
    return float(sign * np.exp(logdet - np.sum(np.log(norms))))


def solve_via_green(instance: BvpInstance) -> GridFunction:
    """u(t) = sum_{s=a+1}^{b} G(t, s) h(s) on offsets 0..n."""
    table = green_table(instance.problem)
    return GridFunction(instance.problem.grid, 0, table.entries @ instance.forcing.values)


@dataclass(frozen=True)
class ResidualReport:
    interior: float
    left_boundary: float
    right_boundary: float

    @property
    def max(self) -> float:
        return max(self.interior, self.left_boundary, self.right_boundary)


def residual(instance: BvpInstance, u: GridFunction, anchored: bool = True) -> ResidualReport:
    """Largest defect of u in the difference equation and in each boundary condition."""
    problem = instance.problem
    if u.start_offset != 0 or u.grid.n != problem.n:
        raise DomainError("candidate solution must be given on offsets 0..n")
    A = operator_matrix(problem, anchored)
    interior = A @ u.values - instance.forcing.values[1:]
    left, right = boundary_rows(problem) @ u.values
    return ResidualReport(float(np.max(np.abs(interior), initial=0.0)), abs(float(left)), abs(float(right)))
