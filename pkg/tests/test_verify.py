from __future__ import annotations

from nablabvp.green import Problem
from nablabvp.verify import (LATTICE_BCS, CheckResult, check_green_lattice, check_oracle_equivalence,
                             lattice, power_rule_pairs, run_suite)


def test_lattice_covers_the_boundary_cases():
    bcs = set(LATTICE_BCS)
    assert len(bcs) >= 12
    assert any(al == 0 for al, _, _, _ in bcs)
    assert any(al == be for al, be, _, _ in bcs)
    assert any(de == 0 for _, _, _, de in bcs)
    assert any(ga == 0 and de > 0 and al > 0 for al, _, ga, de in bcs)
    assert all(min(bc) >= 0 and bc[1] >= bc[0] for bc in bcs)
    assert len(list(lattice())) == 25 * len(LATTICE_BCS)


def test_power_rule_pairs_skip_negative_integer_results():
    pairs = list(power_rule_pairs())
    for mu, nu in pairs:
        d = mu - nu
        assert d > -1 or not float(d).is_integer()
    assert len(pairs) == 25
    assert list(power_rule_pairs(mus=(0.5, 1.0), nus=(1.5, 2.0))) == [(0.5, 2.0), (1.0, 1.5)]


def test_check_result_line():
    assert CheckResult("x", True, 3, "a=1").line() == "PASS x checked=3 a=1"
    assert CheckResult("y", False).line() == "FAIL y checked=0"


def test_oracle_equivalence_is_exact_when_beta_equals_alpha():
    probs = [Problem.make(n, nu, 1, 1, 1, 0.5) for n, nu in ((5, 1.2), (17, 1.7), (30, 1.95))]
    r = check_oracle_equivalence(30, seed=2, problems=probs)
    assert r.passed and r.checked == 30


def test_lattice_check_flags_violated_hypotheses():
    res = check_green_lattice([Problem.make(5, 1.5, 2, 1, 1, 1), Problem.make(5, 1.5, 1, 2, 1, 1)])
    assert res[0].name == "hypotheses" and not res[0].passed and res[0].checked == 1
    assert all(r.passed for r in res[1:]) and res[1].checked == 1


def test_single_instance_suite_is_deterministic():
    p = [Problem.make(9, 1.45, 0.5, 2, 1, 1)]
    a = [r.line() for r in run_suite(p, seed=3, oracle_instances=5, identities=False)]
    b = [r.line() for r in run_suite(p, seed=3, oracle_instances=5, identities=False)]
    assert a == b
    assert [ln.split()[1] for ln in a] == ["oracle_equivalence", "green_nonnegative", "green_strict_bounds",
                                          "green_monotonicity", "lyapunov_necessity"]
