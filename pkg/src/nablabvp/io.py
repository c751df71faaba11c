"""Text formats shared by the library and the command line.

Grid functions are stored one record per line as ``offset,value`` with
contiguous offsets.  Problem files are ``key = value`` lines with the keys
``a, n, nu, alpha, beta, gamma, delta``; ``#`` starts a comment.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .calculus import GridFunction
from .errors import DomainError
from .green import BoundaryParams, Problem
from .monomials import Grid

PROBLEM_KEYS = ("a", "n", "nu", "alpha", "beta", "gamma", "delta")


class ParseError(DomainError):
    """Malformed input file; the message names the offending field or line."""


def fmt(x: float) -> str:
    return f"{float(x):.17g}"


def format_grid_function(u: GridFunction) -> str:
    return "".join(f"{k},{fmt(v)}\n" for k, v in zip(u.offsets, u.values))


def parse_grid_function(text: str, grid: Grid | None = None) -> GridFunction:
    """Parse ``offset,value`` records; the grid span is inferred when not given."""
    offsets, values = [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 2:
            raise ParseError(f"line {lineno}: expected 'offset,value', got {raw!r}")
        try:
            offsets.append(int(parts[0]))
            values.append(float(parts[1]))
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
    if not offsets:
        raise ParseError("grid function file has no records")
    start = offsets[0]
    if offsets != list(range(start, start + len(offsets))):
        raise ParseError("offsets must be contiguous and increasing")
    last = offsets[-1]
    if grid is None:
        grid = Grid(0.0, last)
    elif last != grid.n:
        raise ParseError(f"grid function ends at offset {last}, problem span is n = {grid.n}")
    if not np.all(np.isfinite(values)):
        raise ParseError("grid function values must be finite")
    return GridFunction(grid, start, values)


def read_grid_function(path: str | Path, grid: Grid | None = None) -> GridFunction:
    return parse_grid_function(Path(path).read_text(encoding="utf-8"), grid)


def write_grid_function(path: str | Path, u: GridFunction) -> None:
    Path(path).write_text(format_grid_function(u), encoding="utf-8")


def parse_problem(text: str) -> Problem:
    fields: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep:
            key, sep, val = line.partition(":")
        key = key.strip().lower()
        if not sep or key not in PROBLEM_KEYS:
            raise ParseError(f"line {lineno}: unrecognized entry {raw!r}")
        fields[key] = val.strip()
    parsed: dict[str, float] = {}
    for key in PROBLEM_KEYS:
        if key not in fields:
            if key == "a":
                parsed["a"] = 0.0
                continue
            raise ParseError(f"missing field '{key}'")
        try:
            parsed[key] = float(fields[key])
        except ValueError:
            raise ParseError(f"field '{key}': cannot parse {fields[key]!r} as a number") from None
    n = parsed["n"]
    if not float(n).is_integer() or n < 1:
        raise ParseError(f"field 'n': must be a positive integer, got {fields['n']!r}")
    if not 1 < parsed["nu"] < 2:
        raise ParseError(f"field 'nu': must lie in (1, 2), got {fields['nu']!r}")
    try:
        bc = BoundaryParams(parsed["alpha"], parsed["beta"], parsed["gamma"], parsed["delta"])
    except DomainError as exc:
        which = "alpha/beta" if "alpha" in str(exc) else "gamma/delta"
        raise ParseError(f"fields '{which}': {exc}") from None
    return Problem(Grid(parsed["a"], int(n)), parsed["nu"], bc)


def format_problem(problem: Problem) -> str:
    al, be, ga, de = problem.bc.as_tuple()
    vals = (problem.grid.a, problem.n, problem.nu, al, be, ga, de)
    return "".join(f"{k} = {v if k == 'n' else fmt(v)}\n" for k, v in zip(PROBLEM_KEYS, vals))


def read_problem(path: str | Path) -> Problem:
    return parse_problem(Path(path).read_text(encoding="utf-8"))
