"""Batch verification of identities, Green's function properties and the inequality.

Each ``check_*`` function returns a :class:`CheckResult`; ``run_suite`` runs
them all in a fixed order.  Witness lists are capped so a report stays
readable when a property fails across a whole lattice.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .calculus import GridFunction, frac_diff, frac_sum
from .errors import HypothesisViolation, NoSignChange, SingularProblem, SingularSystem
from .green import Problem, green_table, omega, verify_sign_and_monotonicity
from .lyapunov import (default_bracket, evaluate_potential, find_constant_eigenpotential,
                       homogeneous_system, lyapunov_threshold)
from .monomials import Grid, is_pole, rising, taylor
from .solver import BvpInstance, assemble_dense, solve_dense, solve_via_green

IDENTITY_MUS = (-0.9, -0.5, 0.0, 0.3, 1.0, 1.7, 2.5)
POWER_MUS = (0.0, 0.4, 1.0, 1.6, 2.5)
POWER_NUS = (0.3, 0.5, 1.2, 1.5, 1.9)
LATTICE_NUS = (1.1, 1.3, 1.5, 1.7, 1.9)
LATTICE_NS = (2, 5, 10, 20, 32)
LATTICE_BCS = (
    (1, 2, 1, 1), (1, 3, 2, 1), (0.5, 1, 1, 2), (2, 5, 3, 0.5), (3, 4, 1, 2),
    (0, 1, 1, 0), (0, 1, 1, 1), (0, 2, 1, 3),      # alpha = 0
    (1, 1, 1, 1), (2, 2, 1, 0), (1, 1, 0, 1),      # beta = alpha
    (1, 2, 1, 0), (1, 2, 2, 0.5),                  # delta = 0 / small
    (1, 2, 0, 1), (0.5, 3, 0, 2),                  # gamma = 0, delta > 0, alpha > 0
    (2, 3, 0.5, 4),
)
MAX_WITNESSES = 8


@dataclass
class CheckResult:
    name: str
    passed: bool
    checked: int = 0
    detail: str = ""
    witnesses: list = field(default_factory=list)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name} checked={self.checked} {self.detail}".rstrip()


def lattice(nus=LATTICE_NUS, ns=LATTICE_NS, bcs=LATTICE_BCS):
    for nu, n, bc in itertools.product(nus, ns, bcs):
        yield Problem.make(n, nu, *bc)


def _close(x: float, y: float, rtol: float, atol: float = 1e-12) -> bool:
    return abs(x - y) <= rtol * max(abs(x), abs(y)) + atol


class _Tally:
    def __init__(self):
        self.checked = 0
        self.bad: list = []
        self.worst = 0.0

    def record(self, ok: bool, witness, err: float = 0.0) -> None:
        self.checked += 1
        self.worst = max(self.worst, err)
        if not ok:
            self.bad.append(witness)

    def result(self, name: str, detail: str = "") -> CheckResult:
        detail = (detail + f" failures={len(self.bad)}").strip()
        return CheckResult(name, not self.bad, self.checked, detail, self.bad[:MAX_WITNESSES])


def _rel(x: float, y: float, rtol: float, atol: float = 1e-12) -> float:
    """Relative error with the absolute floor of :func:`_close` (values near 0 are judged by atol)."""
    return abs(x - y) / (max(abs(x), abs(y)) + atol / rtol)


def check_monomial_identities(max_n: int = 48, mus=IDENTITY_MUS, rtol: float = 1e-10) -> CheckResult:
    """Rising-function composition, backward difference, both telescoping sums, shift identity."""
    tally = _Tally()
    # composition t^(nu) (t+nu)^(mu) = t^(nu+mu) on t = 1..max_n
    for nu, mu in itertools.product(mus, repeat=2):
        for t in range(1, max_n + 1):
            if any(is_pole(x) for x in (t + nu, t + nu + mu)):
                continue
            lhs = rising(t, nu) * rising(t + nu, mu)
            rhs = rising(t, nu + mu)
            tally.record(_close(lhs, rhs, rtol), ("composition", t, nu, mu), _rel(lhs, rhs, rtol))
    for mu in mus:
        H = [taylor(mu, k) for k in range(max_n + 1)]
        Hm1 = [taylor(mu - 1, k) for k in range(max_n + 1)]
        Hp1 = [taylor(mu + 1, k) for k in range(max_n + 1)]
        for k in range(1, max_n + 1):
            # H_0(a, a) = 0^(0) is not defined, so skip the one point that needs it
            if not (k == 1 and mu == 0):
                d = H[k] - H[k - 1]
                tally.record(_close(d, Hm1[k], rtol), ("backward_difference", k, mu), _rel(d, Hm1[k], rtol))
            s7 = math.fsum(H[1:k + 1])
            tally.record(_close(s7, Hp1[k], rtol), ("sum_over_s", k, mu), _rel(s7, Hp1[k], rtol))
            s8 = math.fsum(H[k - j + 1] for j in range(1, k + 1))
            tally.record(_close(s8, Hp1[k], rtol), ("sum_over_rho_s", k, mu), _rel(s8, Hp1[k], rtol))
            if mu > 0:
                lhs = H[k] - Hm1[k]
                tally.record(_close(lhs, H[k - 1], rtol), ("shift", k, mu), _rel(lhs, H[k - 1], rtol))
    return tally.result("monomial_identities", f"worst_rel={tally.worst:.2e}")


def power_rule_pairs(mus=POWER_MUS, nus=POWER_NUS):
    for mu, nu in itertools.product(mus, nus):
        d = mu - nu
        if d > -1 or not float(d).is_integer():
            yield mu, nu


def check_power_rules(max_n: int = 48, rtol: float = 1e-9) -> CheckResult:
    """Fractional sum raises and fractional difference lowers the monomial order."""
    tally = _Tally()
    grid = Grid(0.0, max_n)
    for mu, nu in power_rule_pairs():
        u = GridFunction.from_callable(grid, lambda k: taylor(mu, k))
        up = frac_sum(u, nu)
        for k, v in zip(up.offsets, up.values):
            want = taylor(mu + nu, k)
            tally.record(_close(v, want, rtol), ("sum", mu, nu, k), _rel(v, want, rtol))
        down = frac_diff(u, nu)
        for k, v in zip(down.offsets, down.values):
            want = taylor(mu - nu, k)
            tally.record(_close(v, want, rtol), ("difference", mu, nu, k), _rel(v, want, rtol))
    return tally.result("power_rules", f"worst_rel={tally.worst:.2e}")


def random_theorem_problem(rng: np.random.Generator, max_n: int = 40) -> Problem:
    n = int(rng.integers(1, max_n + 1))
    nu = float(rng.uniform(1.05, 1.95))
    al = float(rng.uniform(0, 2))
    return Problem.make(n, nu, al, al + float(rng.uniform(0, 2)),
                        float(rng.uniform(0, 2)), float(rng.uniform(0, 2)))


def check_oracle_equivalence(instances: int = 100, seed: int = 0, tol: float = 1e-8,
                             max_n: int = 40, problems=None) -> CheckResult:
    """Green-summation solution against the dense solve on random forced problems.

    With ``problems`` given, the instances cycle through them instead of
    drawing random coefficients.
    """
    rng = np.random.default_rng(seed)
    problems = list(problems) if problems is not None else None
    tally = _Tally()
    worst_rest = 0.0
    for i in range(instances):
        p = problems[i % len(problems)] if problems else random_theorem_problem(rng, max_n)
        h = rng.uniform(-1, 1, p.n)
        inst = BvpInstance.from_values(p, h)
        ug = solve_via_green(inst).values
        ud = solve_dense(assemble_dense(inst)).values
        scale = max(1.0, np.max(np.abs(ud)))
        gap = np.max(np.abs(ug - ud)) / scale
        # the same gap once the s = a+1 term of the sum is left out
        rest = ug - green_table(p).column(1) * h[0]
        worst_rest = max(worst_rest, np.max(np.abs(rest - ud)) / scale)
        tally.record(gap <= tol, (i, p.n, round(p.nu, 4), p.bc.as_tuple(), float(gap)), float(gap))
    return tally.result("oracle_equivalence",
                        f"worst_gap={tally.worst:.2e} worst_gap_without_first_column={worst_rest:.2e}")


def check_green_lattice(problems=None) -> list[CheckResult]:
    """Sign, strict bounds and monotonicity over the coefficient lattice."""
    problems = list(problems) if problems is not None else list(lattice())
    sign, bounds, mono = _Tally(), _Tally(), _Tally()
    hyp = []
    for p in problems:
        key = (p.n, p.nu, p.bc.as_tuple())
        try:
            r = verify_sign_and_monotonicity(p)
        except (HypothesisViolation, SingularProblem) as exc:
            hyp.append((key, str(exc)))
            continue
        sign.record(r.nonnegative and r.xi_positive, (key, r.min_entry))
        # excess over the bound relative to it; about 1e-16 means attained, not exceeded
        excess = max((r.max_entry - r.omega) / r.omega, (r.max_row_sum - r.lambda_bound) / r.lambda_bound)
        bounds.record(r.max_below_omega and r.rows_below_lambda,
                      (key, r.max_entry, r.omega, r.max_row_sum, r.lambda_bound), excess)
        mono.record(not r.u_decreasing and not r.v_increasing,
                    (key, r.u_decreasing[:1], r.v_increasing[:1]))
    out = [sign.result("green_nonnegative"),
           bounds.result("green_strict_bounds", f"worst_relative_excess={bounds.worst:.1e}"),
           mono.result("green_monotonicity")]
    if hyp:
        out.insert(0, CheckResult("hypotheses", False, len(hyp), f"violations={len(hyp)}",
                                  hyp[:MAX_WITNESSES]))
    return out


def real_eigenpotentials(problem: Problem) -> np.ndarray:
    """Real constant lambda making the q = lambda system singular (generalized eigenvalues)."""
    A = homogeneous_system(problem).matrix
    D = np.zeros_like(A)
    t = np.arange(2, problem.n + 1)
    D[t - 2, t] = 1.0
    ev = linalg.eigvals(A, D)
    ev = ev[np.isfinite(ev)]
    return np.sort(ev[np.abs(ev.imag) <= 1e-9 * np.maximum(1.0, np.abs(ev.real))].real)


def check_lyapunov(problems=None, random_potentials: int = 200, seed: int = 0) -> CheckResult:
    """Located eigenpotentials exceed 1/omega; potentials below it leave the system nonsingular."""
    problems = list(problems) if problems is not None else list(lattice())
    rng = np.random.default_rng(seed)
    tally = _Tally()
    vacuous = 0
    for p in problems:
        key = (p.n, p.nu, p.bc.as_tuple())
        lo, hi = default_bracket(p)
        try:
            lam = find_constant_eigenpotential(p, lo, hi)
        except NoSignChange:
            ev = real_eigenpotentials(p)
            has_root = bool(np.any((ev >= lo) & (ev <= hi)))
            tally.record(not has_root, (key, "missed eigenpotential", ev.tolist()))
            vacuous += not has_root
            continue
        v = evaluate_potential(p, np.full(p.n, lam))
        ok = v.nontrivial_solution_exists and p.n * abs(lam) > lyapunov_threshold(p)
        tally.record(ok, (key, lam, v.l1_norm, v.threshold, v.scaled_det))
    for _ in range(random_potentials):
        p = problems[int(rng.integers(len(problems)))]
        q = rng.uniform(-1, 1, p.n)
        q *= rng.uniform(0, 0.99) / omega(p) / max(np.sum(np.abs(q)), 1e-300)
        v = evaluate_potential(p, q)
        tally.record(not v.nontrivial_solution_exists,
                     ((p.n, p.nu, p.bc.as_tuple()), "small potential", v.l1_norm, v.scaled_det))
    return tally.result("lyapunov_necessity", f"no_eigenpotential_in_bracket={vacuous}")


def run_suite(problems=None, seed: int = 0, tol: float = 1e-8, oracle_instances: int = 100,
              identities: bool = True) -> list[CheckResult]:
    """All checks in a fixed order.

    Explicit ``problems`` also drive the oracle comparison; otherwise it draws
    random theorem-mode problems and the Green checks run on the lattice.
    """
    explicit = problems is not None
    problems = list(problems) if explicit else list(lattice())
    results = []
    if identities:
        results += [check_monomial_identities(), check_power_rules()]
    try:
        results.append(check_oracle_equivalence(oracle_instances, seed, tol,
                                                problems=problems if explicit else None))
    except (SingularProblem, SingularSystem) as exc:
        results.append(CheckResult("oracle_equivalence", False, 0, f"singular: {exc}"))
    results += check_green_lattice(problems)
    ok = [p for p in problems if p.bc.sign_hypotheses_hold]
    if ok:
        try:
            results.append(check_lyapunov(ok, seed=seed))
        except HypothesisViolation as exc:
            results.append(CheckResult("lyapunov_necessity", False, 0, str(exc)))
    return results
