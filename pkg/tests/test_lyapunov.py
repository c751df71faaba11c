from __future__ import annotations

import numpy as np
import pytest

from nablabvp.calculus import GridFunction
from nablabvp.errors import DomainError, HypothesisViolation, NoSignChange
from nablabvp.green import Problem, green_table, omega
from nablabvp.lyapunov import (default_bracket, evaluate_potential, find_constant_eigenpotential,
                               homogeneous_system, lyapunov_threshold, relative_determinant)
from nablabvp.monomials import taylor
from nablabvp.verify import real_eigenpotentials

REF = Problem.make(10, 1.5, 1, 2, 1, 1)


def test_threshold_examples():
    for n, nu in ((4, 1.3), (9, 1.8)):
        p = Problem.make(n, nu, 0, 1, 1, 0)
        assert lyapunov_threshold(p) == pytest.approx(1 / taylor(nu - 1, n), rel=1e-14)
    t = lyapunov_threshold(REF)
    assert 0 < t < 1 / green_table(REF).entries.max()
    assert np.isfinite(t)


def test_threshold_is_finite_across_theorem_mode():
    rng = np.random.default_rng(0)
    for _ in range(200):
        al = rng.uniform(0, 2)
        p = Problem.make(int(rng.integers(1, 40)), rng.uniform(1.05, 1.95), al, al + rng.uniform(0, 2),
                         rng.uniform(0.01, 2), rng.uniform(0, 2))
        om = omega(p)
        assert np.isfinite(om) and om > 0


def test_threshold_needs_theorem_mode():
    with pytest.raises(HypothesisViolation):
        lyapunov_threshold(Problem.make(5, 1.5, 2, 1, 1, 1))


def test_zero_potential_is_trivial():
    v = evaluate_potential(REF, np.zeros(REF.n))
    assert not v.nontrivial_solution_exists and v.scaled_det == 1.0 and v.l1_norm == 0
    assert v.consistent


def test_potential_below_threshold_is_trivial():
    rng = np.random.default_rng(1)
    for _ in range(50):
        q = rng.uniform(-1, 1, REF.n)
        q *= lyapunov_threshold(REF) / np.sum(np.abs(q))
        v = evaluate_potential(REF, q)
        assert not v.nontrivial_solution_exists and v.consistent


def test_potential_accepts_grid_functions_and_checks_shape():
    q = GridFunction(REF.grid, 0, np.zeros(REF.n + 1))
    assert not evaluate_potential(REF, q).nontrivial_solution_exists
    with pytest.raises(DomainError):
        evaluate_potential(REF, np.zeros(REF.n - 1))


def test_located_eigenpotential_is_singular_and_above_threshold():
    lam = find_constant_eigenpotential(REF, 0, 50)
    assert lam > 0
    v = evaluate_potential(REF, np.full(REF.n, lam))
    assert v.nontrivial_solution_exists and v.inequality_holds and v.consistent
    assert REF.n * lam > lyapunov_threshold(REF)


def test_verdict_flips_off_the_eigenpotential():
    for p in (REF, Problem.make(20, 1.2, 0, 1, 1, 1), Problem.make(5, 1.9, 1, 1, 2, 0)):
        lam = find_constant_eigenpotential(p)
        assert evaluate_potential(p, np.full(p.n, lam)).nontrivial_solution_exists
        for off in (-1e-6, 1e-6):
            assert not evaluate_potential(p, np.full(p.n, lam + off)).nontrivial_solution_exists


def test_eigenpotential_is_the_smallest_generalized_eigenvalue():
    for p in (REF, Problem.make(16, 1.3, 0.5, 3, 1, 0.2)):
        lam = find_constant_eigenpotential(p)
        ev = real_eigenpotentials(p)
        lo, hi = default_bracket(p)
        first = ev[(ev >= lo) & (ev <= hi)].min()
        assert lam == pytest.approx(first, rel=1e-8)


def test_eigenpotential_grows_as_the_grid_shrinks():
    for bc in ((1, 2, 1, 1), (0, 1, 1, 0), (1, 1, 1, 1)):
        lams = [find_constant_eigenpotential(Problem.make(n, 1.5, *bc)) for n in (16, 8, 4)]
        assert lams[0] < lams[1] < lams[2]


def test_no_sign_change_raises():
    with pytest.raises(NoSignChange):
        find_constant_eigenpotential(REF, 0, 1e-3)
    with pytest.raises(DomainError):
        find_constant_eigenpotential(REF, 5, 5)


def test_relative_determinant_of_unperturbed_system_is_one():
    base = homogeneous_system(REF)
    assert relative_determinant(base, np.zeros(REF.n)) == 1.0
