"""Command-line front end.

Data goes to standard output (or ``--out``) with 17 significant digits;
summaries go to standard error.  Exit codes: 0 success, 2 parse or domain
error, 3 singular problem or system, 4 verification failure or violated
sign hypotheses, 5 no sign change in a bisection bracket.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import DomainError, HypothesisViolation, NoSignChange, SingularProblem, SingularSystem
from .green import green_table, green_table_csv
from .io import ParseError, fmt, format_grid_function, read_grid_function, read_problem
from .lyapunov import (default_bracket, evaluate_potential, find_constant_eigenpotential,
                       lyapunov_threshold)
from .monomials import taylor
from .solver import BvpInstance, assemble_dense, residual, solve_dense, solve_via_green
from .verify import lattice, run_suite

EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_SINGULAR = 3
EXIT_VERIFY = 4
EXIT_SEARCH = 5

log = logging.getLogger("nablabvp")


class VerificationFailed(Exception):
    pass


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _note(msg: str) -> None:
    print(msg, file=sys.stderr)


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None


def _load_problem(path: str):
    _read_text(path)
    return read_problem(path)


def _load_grid_function(path: str, grid):
    _read_text(path)
    return read_grid_function(path, grid)


def parse_bracket(raw: str) -> tuple[float, float]:
    lo, sep, hi = raw.partition(":")
    try:
        if not sep:
            raise ValueError
        return float(lo), float(hi)
    except ValueError:
        raise ParseError(f"--bracket expects LO:HI, got {raw!r}") from None


def cmd_monomial(args) -> int:
    if args.k < 0:
        raise DomainError(f"--k must be nonnegative, got {args.k}")
    print(fmt(taylor(args.mu, args.k)))
    return EXIT_OK


def cmd_green(args) -> int:
    problem = _load_problem(args.spec)
    table = green_table(problem)
    _emit(green_table_csv(table), args.out)
    _note(f"n={problem.n} nu={fmt(problem.nu)} xi={fmt(table.xi)} "
          f"min={fmt(table.entries.min())} max={fmt(table.entries.max())}")
    return EXIT_OK


def cmd_solve(args) -> int:
    problem = _load_problem(args.spec)
    h = _load_grid_function(args.forcing, problem.grid)
    if h.start_offset != 1:
        raise ParseError(f"forcing must start at offset 1, got {h.start_offset}")
    inst = BvpInstance(problem, h)
    if args.method == "green":
        u = solve_via_green(inst)
    else:
        u = solve_dense(assemble_dense(inst))
    _emit(format_grid_function(u), args.out)
    rep = residual(inst, u)
    hmax = float(np.max(np.abs(h.values)))
    _note(f"residual={fmt(rep.max)} interior={fmt(rep.interior)} left={fmt(rep.left_boundary)} "
          f"right={fmt(rep.right_boundary)} forcing_sup={fmt(hmax)}")
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.spec:
        problems = [_load_problem(args.spec)]
        results = run_suite(problems, seed=args.seed, tol=args.tol,
                            oracle_instances=args.instances, identities=False)
    else:
        results = run_suite(None, seed=args.seed, tol=args.tol, oracle_instances=args.instances)
    sys.stdout.write("check,status,checked,detail\n")
    for r in results:
        sys.stdout.write(f"{r.name},{'PASS' if r.passed else 'FAIL'},{r.checked},{r.detail}\n")
        for w in r.witnesses:
            log.info("%s witness %s", r.name, w)
        if not r.passed and r.witnesses:
            _note(f"{r.name}: first witness {r.witnesses[0]}")
    failed = [r.name for r in results if not r.passed]
    _note(f"{len(results) - len(failed)}/{len(results)} checks passed"
          + (f"; failed: {', '.join(failed)}" if failed else ""))
    return EXIT_VERIFY if failed else EXIT_OK


def _verdict_lines(pairs) -> str:
    out = []
    for k, v in pairs:
        if isinstance(v, bool):
            v = str(v).lower()
        elif isinstance(v, float):
            v = fmt(v)
        out.append(f"{k}={v}\n")
    return "".join(out)


def _bracket_search(problem, bracket):
    lo, hi = bracket if bracket else default_bracket(problem)
    lam = find_constant_eigenpotential(problem, lo, hi)
    v = evaluate_potential(problem, np.full(problem.n, lam))
    return lam, v


def cmd_lyapunov(args) -> int:
    bracket = parse_bracket(args.bracket) if args.bracket else None
    if args.lattice:
        return _lyapunov_sweep(bracket)
    if not args.spec:
        raise ParseError("lyapunov needs --spec or --lattice")
    problem = _load_problem(args.spec)
    threshold = lyapunov_threshold(problem)
    if args.potential is None and bracket is None:
        print(fmt(threshold))
        return EXIT_OK
    ok = True
    lines = []
    if args.potential is not None:
        q = _load_grid_function(args.potential, problem.grid)
        if q.start_offset != 1:
            raise ParseError(f"potential must start at offset 1, got {q.start_offset}")
        v = evaluate_potential(problem, q)
        lines += list(v.as_dict().items())
        ok &= v.consistent
    if bracket is not None:
        lam, v = _bracket_search(problem, bracket)
        n_lam = problem.n * abs(lam)
        lines += [("lambda_star", lam), ("n_abs_lambda_star", n_lam), ("threshold", threshold),
                  ("scaled_det", v.scaled_det),
                  ("nontrivial_solution_exists", v.nontrivial_solution_exists),
                  ("inequality_holds", n_lam > threshold)]
        ok &= v.nontrivial_solution_exists and n_lam > threshold
    sys.stdout.write(_verdict_lines(lines))
    if not ok:
        _note("inequality violated by a potential admitting a nontrivial solution")
    return EXIT_OK if ok else EXIT_VERIFY


def _lyapunov_sweep(bracket) -> int:
    sys.stdout.write("n,nu,alpha,beta,gamma,delta,threshold,lambda_star,n_abs_lambda_star,inequality_holds\n")
    bad = 0
    for p in lattice():
        if not p.bc.sign_hypotheses_hold:
            continue
        row = [str(p.n), fmt(p.nu), *map(fmt, p.bc.as_tuple()), fmt(lyapunov_threshold(p))]
        try:
            lam, v = _bracket_search(p, bracket)
        except NoSignChange:
            sys.stdout.write(",".join(row + ["", "", ""]) + "\n")
            continue
        holds = v.nontrivial_solution_exists and p.n * abs(lam) > v.threshold
        bad += not holds
        row += [fmt(lam), fmt(p.n * abs(lam)), str(holds).lower()]
        sys.stdout.write(",".join(row) + "\n")
    _note(f"sweep done, violations={bad}")
    return EXIT_VERIFY if bad else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nablabvp",
        description="Nabla fractional boundary value problems: monomials, Green's tables, solves, checks.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log witnesses and solver details")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("monomial", help="print H_mu(a+k, a)")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=cmd_monomial)

    p = sub.add_parser("green", help="write the Green's function table as CSV")
    p.add_argument("--spec", required=True, help="problem file")
    p.add_argument("--out", help="output CSV (default: stdout)")
    p.set_defaults(func=cmd_green)

    p = sub.add_parser("solve", help="solve the forced problem")
    p.add_argument("--spec", required=True)
    p.add_argument("--forcing", required=True, help="forcing on offsets 1..n")
    p.add_argument("--out", help="solution file (default: stdout)")
    p.add_argument("--method", choices=("dense", "green"), default="dense",
                   help="dense linear solve or Green's function summation")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="run the verification suite")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--spec", help="check this single problem only")
    g.add_argument("--lattice", action="store_true", help="full coefficient lattice (the default)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-8, help="oracle gap tolerance")
    p.add_argument("--instances", type=int, default=100, help="forced oracle instances")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("lyapunov", help="threshold, potential verdicts and eigenpotential search")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--spec")
    g.add_argument("--lattice", action="store_true", help="sweep the lattice, CSV out")
    p.add_argument("--potential", help="potential on offsets 1..n")
    p.add_argument("--bracket", help="search bracket LO:HI for a constant eigenpotential")
    p.set_defaults(func=cmd_lyapunov)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (SingularProblem, SingularSystem) as exc:
        _note(f"singular: {exc}")
        return EXIT_SINGULAR
    except HypothesisViolation as exc:
        _note(f"hypothesis violation: {exc}")
        return EXIT_VERIFY
    except NoSignChange as exc:
        _note(f"search failed: {exc}")
        return EXIT_SEARCH
    except DomainError as exc:
        _note(f"error: {exc}")
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
