"""Lyapunov-type inequality for the problem perturbed by a potential q.

If ``nabla_a^nu u + q u = 0`` with the two boundary conditions has a
nontrivial solution, then ``sum |q| > 1/omega``.  Nontriviality is detected
on the dense system through its determinant scaled by the determinant of the
unperturbed system (nonzero whenever xi is), i.e. det(I - K) with K the
Green's operator times q.  Constant potentials that make the system singular
are located by bisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .calculus import GridFunction
from .errors import DomainError, NoSignChange
from .green import Problem, omega, require_theorem_mode
from .solver import BvpInstance, DenseSystem, assemble_dense

DET_THRESHOLD = 1e-10
BISECTION_WIDTH = 1e-10
SCAN_POINTS = 200


@dataclass(frozen=True)
class LyapunovVerdict:
    l1_norm: float
    threshold: float
    scaled_det: float
    nontrivial_solution_exists: bool

    @property
    def inequality_holds(self) -> bool:
        return self.l1_norm > self.threshold

    @property
    def consistent(self) -> bool:
        """A nontrivial solution must come with sum |q| above the threshold."""
        return self.inequality_holds or not self.nontrivial_solution_exists

    def as_dict(self) -> dict:
        return {
            "l1_norm": self.l1_norm,
            "threshold": self.threshold,
            "scaled_det": self.scaled_det,
            "nontrivial_solution_exists": self.nontrivial_solution_exists,
            "inequality_holds": self.inequality_holds,
        }


def lyapunov_threshold(problem: Problem) -> float:
    """1/omega; the potential must exceed this in l1 norm to admit a nontrivial solution."""
    om = omega(problem)
    if not (om > 0 and math.isfinite(om)):
        raise DomainError(f"omega = {om} is degenerate")
    return 1.0 / om


def homogeneous_system(problem: Problem) -> DenseSystem:
    return assemble_dense(BvpInstance.from_values(problem, np.zeros(problem.n)))


def relative_determinant(base: DenseSystem, q: np.ndarray) -> float:
    """det(M_q) / det(M_0) for the homogeneous system ``base``."""
    s0, l0 = np.linalg.slogdet(base.matrix)
    if s0 == 0:
        raise DomainError("unperturbed system is singular")
    s1, l1 = np.linalg.slogdet(base.with_potential(q).matrix)
    if s1 == 0:
        return 0.0
    return float(s1 * s0 * np.exp(l1 - l0))


def _potential_values(problem: Problem, q) -> np.ndarray:
    if isinstance(q, GridFunction):
        q = q.restrict(1).values
    q = np.asarray(q, dtype=float)
    if q.shape != (problem.n,):
        raise DomainError(f"potential needs values on offsets 1..{problem.n}, got shape {q.shape}")
    return q


def evaluate_potential(problem: Problem, q, base: DenseSystem | None = None) -> LyapunovVerdict:
    """Verdict for a potential q on offsets 1..n (a GridFunction or a plain sequence)."""
    require_theorem_mode(problem)
    q = _potential_values(problem, q)
    base = base if base is not None else homogeneous_system(problem)
    d = relative_determinant(base, q)
    return LyapunovVerdict(
        l1_norm=float(np.sum(np.abs(q))),
        threshold=lyapunov_threshold(problem),
        scaled_det=d,
        nontrivial_solution_exists=abs(d) < DET_THRESHOLD,
    )


def default_bracket(problem: Problem) -> tuple[float, float]:
    return 0.0, 10.0 * problem.n ** problem.nu


def find_constant_eigenpotential(problem: Problem, search_min: float | None = None,
                                 search_max: float | None = None,
                                 scan_points: int = SCAN_POINTS) -> float:
    """Smallest constant lambda in the bracket at which q = lambda makes the system singular.

    The bracket is sampled at ``scan_points`` equally spaced values plus as
    many geometrically spaced ones above ``search_min``.  The first sampled
    sign change of the determinant is bisected until the bracket is narrower
    than ``BISECTION_WIDTH`` and then on down to floating-point resolution, so
    the returned value registers as singular at ``DET_THRESHOLD``.
    """
    require_theorem_mode(problem)
    lo0, hi0 = default_bracket(problem)
    lo = lo0 if search_min is None else float(search_min)
    hi = hi0 if search_max is None else float(search_max)
    if not hi > lo:
        raise DomainError(f"empty bracket [{lo}, {hi}]")
    base = homogeneous_system(problem)
    ones = np.ones(problem.n)

    def det(lam: float) -> float:
        return relative_determinant(base, lam * ones)

    m = max(int(scan_points), 2)
    # geometric samples resolve eigenvalues crowded near the low end
    grid = np.unique(np.concatenate([np.linspace(lo, hi, m), lo + np.geomspace(1e-9 * (hi - lo), hi - lo, m)]))
    vals = [det(x) for x in grid]
    for i in range(len(grid) - 1):
        if vals[i] == 0:
            return float(grid[i])
        if np.sign(vals[i]) != np.sign(vals[i + 1]):
            a, b, fa = grid[i], grid[i + 1], vals[i]
            break
    else:
        if vals[-1] == 0:
            return float(grid[-1])
        raise NoSignChange(f"determinant keeps its sign on [{lo}, {hi}]")
    fb = det(b)
    while True:
        m = 0.5 * (a + b)
        if b - a <= BISECTION_WIDTH and (m <= a or m >= b):
            break
        fm = det(m)
        if fm == 0:
            return float(m)
        if np.sign(fm) == np.sign(fa):
            a, fa = m, fm
        else:
            b, fb = m, fm
    return float(a if abs(fa) <= abs(fb) else b)
