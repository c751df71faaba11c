"""Green's function of the two-point nabla fractional boundary value problem.

The problem is

    -(nabla_a^nu u)(t) = h(t),        t = a+2, ..., b,
    alpha u(a+1) - beta (nabla u)(a+1) = 0,
    gamma u(b)   + delta (nabla u)(b) = 0,

with 1 < nu < 2.  ``xi`` is the solvability constant, ``G(t, s)`` the
closed-form kernel, and ``omega`` / ``lambda_bound`` the upper bounds on its
maximum entry and on its row sums.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, HypothesisViolation, SingularProblem
from .monomials import Grid, taylor, taylor_table

XI_RELATIVE_THRESHOLD = 1e-12
NONNEG_SLACK = 1e-12
STRICT_SLACK = 1e-12


@dataclass(frozen=True)
class BoundaryParams:
    alpha: float
    beta: float
    gamma: float
    delta: float

    def __post_init__(self):
        if self.alpha == 0 and self.beta == 0:
            raise DomainError("alpha^2 + beta^2 must be positive")
        if self.gamma == 0 and self.delta == 0:
            raise DomainError("gamma^2 + delta^2 must be positive")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.alpha, self.beta, self.gamma, self.delta)

    def scaled(self, c: float) -> BoundaryParams:
        return BoundaryParams(*(c * x for x in self.as_tuple()))

    @property
    def sign_hypotheses_hold(self) -> bool:
        return min(self.as_tuple()) >= 0 and self.beta >= self.alpha


@dataclass(frozen=True)
class Problem:
    grid: Grid
    nu: float
    bc: BoundaryParams

    def __post_init__(self):
        if not 1 < self.nu < 2:
            raise DomainError(f"order nu must lie strictly in (1, 2), got {self.nu}")

    @classmethod
    def make(cls, n: int, nu: float, alpha: float, beta: float, gamma: float, delta: float,
             a: float = 0.0) -> Problem:
        return cls(Grid(a, n), nu, BoundaryParams(alpha, beta, gamma, delta))

    @property
    def n(self) -> int:
        return self.grid.n


def _xi_terms(problem: Problem) -> tuple[float, float, float]:
    al, be, ga, de = problem.bc.as_tuple()
    n, nu = problem.n, problem.nu
    return ((be - al) * ga, al * ga * taylor(nu - 1, n), al * de * taylor(nu - 2, n))


def xi(problem: Problem) -> float:
    """Solvability constant; the homogeneous problem is trivial iff it is nonzero."""
    return math.fsum(_xi_terms(problem))


def checked_xi(problem: Problem) -> float:
    """xi, raising :class:`SingularProblem` when it is zero relative to its terms."""
    terms = _xi_terms(problem)
    value = math.fsum(terms)
    scale = max(abs(x) for x in terms)
    if scale == 0 or abs(value) < XI_RELATIVE_THRESHOLD * scale:
        raise SingularProblem(f"xi = {value!r} vanishes for {problem.bc}")
    return value


def require_theorem_mode(problem: Problem) -> float:
    """Check alpha, beta, gamma, delta >= 0, beta >= alpha, xi > 0; return xi."""
    if not problem.bc.sign_hypotheses_hold:
        raise HypothesisViolation(
            f"need alpha, beta, gamma, delta >= 0 and beta >= alpha, got {problem.bc.as_tuple()}"
        )
    x = checked_xi(problem)
    if x <= 0:
        raise HypothesisViolation(f"xi = {x} is not positive")
    return x


def _check_ts(problem: Problem, t_offset: int, s_offset: int) -> None:
    n = problem.n
    if not 0 <= t_offset <= n:
        raise DomainError(f"t_offset {t_offset} outside 0..{n}")
    if not 1 <= s_offset <= n:
        raise DomainError(f"s_offset {s_offset} outside 1..{n}")


def green_u(problem: Problem, t_offset: int, s_offset: int) -> float:
    """The branch of G used for t <= s - 1 (evaluated at any (t, s))."""
    _check_ts(problem, t_offset, s_offset)
    x = checked_xi(problem)
    al, be, ga, de = problem.bc.as_tuple()
    n, nu = problem.n, problem.nu
    h1_t = taylor(nu - 1, t_offset)
    h1_bs = taylor(nu - 1, n - s_offset + 1)
    h2_bs = taylor(nu - 2, n - s_offset + 1)
    terms = (al * ga * h1_t * h1_bs, al * de * h1_t * h2_bs,
             (be - al) * ga * h1_bs, (be - al) * de * h2_bs)
    return math.fsum(terms) / x


def green_v(problem: Problem, t_offset: int, s_offset: int) -> float:
    """The branch of G used for t >= s: u(t, s) - H_{nu-1}(t, rho(s))."""
    u = green_u(problem, t_offset, s_offset)
    k = t_offset - s_offset + 1
    return u - (taylor(problem.nu - 1, k) if k >= 1 else 0.0)


def green(problem: Problem, t_offset: int, s_offset: int) -> float:
    if t_offset <= s_offset - 1:
        return green_u(problem, t_offset, s_offset)
    return green_v(problem, t_offset, s_offset)


def green_matrices(problem: Problem) -> tuple[np.ndarray, np.ndarray]:
    """Both branches as dense (n+1) x n arrays, rows t = 0..n, columns s = 1..n."""
    x = checked_xi(problem)
    al, be, ga, de = problem.bc.as_tuple()
    n, nu = problem.n, problem.nu
    h1 = taylor_table(nu - 1, n)
    h2 = taylor_table(nu - 2, n)
    s = np.arange(1, n + 1)
    t = np.arange(0, n + 1)
    h1_bs = h1[n - s + 1]
    h2_bs = h2[n - s + 1]
    U = ((al * ga * h1_bs + al * de * h2_bs)[None, :] * h1[t][:, None]
         + ((be - al) * ga * h1_bs + (be - al) * de * h2_bs)[None, :]) / x
    k = t[:, None] - s[None, :] + 1
    Ht = np.where(k >= 1, h1[np.clip(k, 0, n)], 0.0)
    return U, U - Ht


@dataclass(frozen=True)
class GreenTable:
    """Dense Green's function with the constants that describe it.

    ``entries[t, s-1]`` holds G(a+t, a+s).  ``omega`` and ``lambda_bound``
    are NaN when the sign hypotheses fail (the bounds are only meaningful
    under them).
    """

    problem: Problem
    xi: float
    entries: np.ndarray
    omega: float = math.nan
    lambda_bound: float = math.nan
    u_branch: np.ndarray = field(default=None, repr=False)
    v_branch: np.ndarray = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.problem.n

    def at(self, t_offset: int, s_offset: int) -> float:
        return float(self.entries[t_offset, s_offset - 1])

    def column(self, s_offset: int) -> np.ndarray:
        return self.entries[:, s_offset - 1]

    def row_sums(self) -> np.ndarray:
        return self.entries.sum(axis=1)

    def to_csv(self) -> str:
        return green_table_csv(self)


def green_table(problem: Problem) -> GreenTable:
    x = checked_xi(problem)
    U, V = green_matrices(problem)
    n = problem.n
    t = np.arange(0, n + 1)[:, None]
    s = np.arange(1, n + 1)[None, :]
    entries = np.where(t <= s - 1, U, V)
    om = lam = math.nan
    if problem.bc.sign_hypotheses_hold and x > 0:
        om, lam = omega(problem), lambda_bound(problem)
    for arr in (entries, U, V):
        arr.setflags(write=False)
    return GreenTable(problem, x, entries, om, lam, U, V)


def omega(problem: Problem) -> float:
    """Upper bound on max G."""
    x = require_theorem_mode(problem)
    al, be, ga, de = problem.bc.as_tuple()
    h1 = taylor(problem.nu - 1, problem.n)
    return math.fsum((al * ga * h1 * h1, al * de * h1, (be - al) * ga * h1, (be - al) * de)) / x


def lambda_bound(problem: Problem) -> float:
    """Upper bound on every row sum of G."""
    x = require_theorem_mode(problem)
    al, be, ga, de = problem.bc.as_tuple()
    h1 = taylor(problem.nu - 1, problem.n)
    h0 = taylor(problem.nu, problem.n)
    return math.fsum((al * ga * h1 * h0, al * de * h1 * h1, (be - al) * ga * h0, (be - al) * de * h1)) / x


@dataclass
class SignReport:
    """Outcome of the sign / monotonicity / bound checks for one problem.

    Each failure list holds ``(t_offset, s_offset, value)`` witnesses.
    """

    problem: Problem
    xi: float
    min_entry: float
    max_entry: float
    omega: float
    lambda_bound: float
    max_row_sum: float
    u_strict_expected: bool
    negative_entries: list = field(default_factory=list)
    u_decreasing: list = field(default_factory=list)
    u_not_strict: list = field(default_factory=list)
    v_increasing: list = field(default_factory=list)
    max_on_hull: bool = True

    @property
    def xi_positive(self) -> bool:
        return self.xi > 0

    @property
    def nonnegative(self) -> bool:
        return not self.negative_entries

    @property
    def u_monotone(self) -> bool:
        return not self.u_decreasing and not (self.u_strict_expected and self.u_not_strict)

    @property
    def v_monotone(self) -> bool:
        return not self.v_increasing

    @property
    def max_below_omega(self) -> bool:
        return self.max_entry + STRICT_SLACK < self.omega

    @property
    def rows_below_lambda(self) -> bool:
        return self.max_row_sum + STRICT_SLACK < self.lambda_bound

    @property
    def sign_and_monotonicity_ok(self) -> bool:
        return self.xi_positive and self.nonnegative and self.u_monotone and self.v_monotone

    def as_dict(self) -> dict:
        return {
            "xi": self.xi,
            "xi_positive": self.xi_positive,
            "min_entry": self.min_entry,
            "nonnegative": self.nonnegative,
            "u_nondecreasing": self.u_monotone,
            "v_nonincreasing": self.v_monotone,
            "max_entry": self.max_entry,
            "omega": self.omega,
            "max_below_omega": self.max_below_omega,
            "max_row_sum": self.max_row_sum,
            "lambda_bound": self.lambda_bound,
            "rows_below_lambda": self.rows_below_lambda,
            "max_on_hull": self.max_on_hull,
        }


def verify_sign_and_monotonicity(problem: Problem, table: GreenTable | None = None) -> SignReport:
    """Scan the full table for the sign, monotonicity and bound properties."""
    x = require_theorem_mode(problem)
    table = table if table is not None else green_table(problem)
    n = problem.n
    al, _, ga, de = problem.bc.as_tuple()
    G, U, V = table.entries, table.u_branch, table.v_branch
    report = SignReport(
        problem=problem, xi=x,
        min_entry=float(G.min()), max_entry=float(G.max()),
        omega=table.omega, lambda_bound=table.lambda_bound,
        max_row_sum=float(table.row_sums().max()),
        u_strict_expected=al > 0 and (ga, de) != (0, 0),
    )
    for t, j in zip(*np.nonzero(G < -NONNEG_SLACK)):
        report.negative_entries.append((int(t), int(j) + 1, float(G[t, j])))
    for s in range(1, n + 1):
        # u on t = 0..s-1; differences start at t = 1
        for t in range(1, s):
            d = U[t, s - 1] - U[t - 1, s - 1]
            if d < -NONNEG_SLACK:
                report.u_decreasing.append((t, s, float(d)))
            elif d <= 0:
                report.u_not_strict.append((t, s, float(d)))
        for t in range(s + 1, n + 1):
            d = V[t, s - 1] - V[t - 1, s - 1]
            if d > NONNEG_SLACK:
                report.v_increasing.append((t, s, float(d)))
    hull = max(max(U[s - 1, s - 1], V[s, s - 1]) for s in range(1, n + 1))
    report.max_on_hull = bool(hull >= report.max_entry)
    return report


def _fmt(x: float) -> str:
    return repr(float(x)) if not math.isfinite(x) else f"{x:.17g}"


def green_table_csv(table: GreenTable) -> str:
    """CSV text: header ``t\\s,1,...,n``, one row per t offset, then a ``#`` footer."""
    buf = io.StringIO()
    n = table.n
    buf.write("t\\s," + ",".join(str(s) for s in range(1, n + 1)) + "\n")
    for t in range(n + 1):
        buf.write(str(t) + "," + ",".join(_fmt(v) for v in table.entries[t]) + "\n")
    buf.write(f"# xi={_fmt(table.xi)}\n")
    buf.write(f"# omega={_fmt(table.omega)}\n")
    buf.write(f"# lambda={_fmt(table.lambda_bound)}\n")
    return buf.getvalue()


def read_green_csv(text: str) -> tuple[np.ndarray, dict[str, float]]:
    """Parse :func:`green_table_csv` output back into (entries, constants)."""
    rows, consts = [], {}
    lines = [ln for ln in text.splitlines() if ln.strip()]
    for ln in lines[1:]:
        if ln.startswith("#"):
            key, _, val = ln[1:].strip().partition("=")
            consts[key.strip()] = float(val)
        else:
            rows.append([float(v) for v in ln.split(",")[1:]])
    return np.array(rows), consts
