"""Nabla differences, fractional sums and fractional differences on a grid.

Grid functions carry the first offset they are defined on; every operator
returns a function on exactly the offsets where its definition makes sense,
so callers never index outside the defined region.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .monomials import NEGATIVE_INTEGER_SNAP, Grid, taylor_table


@dataclass(frozen=True)
class GridFunction:
    """Real values on offsets ``start_offset..grid.n`` of a grid."""

    grid: Grid
    start_offset: int
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        expected = self.grid.n - self.start_offset + 1
        if self.start_offset < 0 or vals.ndim != 1 or len(vals) != expected:
            raise DomainError(
                f"grid function on offsets {self.start_offset}..{self.grid.n} "
                f"needs {expected} values, got shape {vals.shape}"
            )
        if not np.all(np.isfinite(vals)):
            raise DomainError("grid function values must be finite")

    @classmethod
    def from_callable(cls, grid: Grid, func, start_offset: int = 1) -> GridFunction:
        return cls(grid, start_offset, [func(k) for k in range(start_offset, grid.n + 1)])

    @property
    def offsets(self) -> range:
        return range(self.start_offset, self.grid.n + 1)

    def at(self, offset: int) -> float:
        if offset < self.start_offset or offset > self.grid.n:
            raise DomainError(f"offset {offset} outside {self.start_offset}..{self.grid.n}")
        return float(self.values[offset - self.start_offset])

    def restrict(self, start_offset: int) -> GridFunction:
        if start_offset < self.start_offset:
            raise DomainError(f"cannot extend a function from {self.start_offset} down to {start_offset}")
        return GridFunction(self.grid, start_offset, self.values[start_offset - self.start_offset:])

    def __add__(self, other: GridFunction) -> GridFunction:
        _same_domain(self, other)
        return GridFunction(self.grid, self.start_offset, self.values + other.values)

    def __sub__(self, other: GridFunction) -> GridFunction:
        _same_domain(self, other)
        return GridFunction(self.grid, self.start_offset, self.values - other.values)

    def __mul__(self, c: float) -> GridFunction:
        return GridFunction(self.grid, self.start_offset, c * self.values)

    __rmul__ = __mul__


def _same_domain(u: GridFunction, v: GridFunction) -> None:
    if u.grid.n != v.grid.n or u.start_offset != v.start_offset:
        raise DomainError("grid functions live on different domains")


@dataclass(frozen=True)
class OperatorWeights:
    """Linear weights of the fractional difference at one grid point.

    ``coefficients[k-1]`` multiplies u(a+k) for k = 1..t_offset.
    """

    t_offset: int
    coefficients: np.ndarray

    def apply(self, u: GridFunction) -> float:
        if u.start_offset > 1:
            raise DomainError("weights need u on offsets 1..t_offset")
        seg = u.values[1 - u.start_offset: 1 - u.start_offset + self.t_offset]
        return float(np.dot(self.coefficients, seg))


def nabla(u: GridFunction) -> GridFunction:
    """Backward difference u(t) - u(t-1) on offsets start_offset+1..n."""
    if len(u.values) < 2:
        raise DomainError("nabla needs at least two consecutive points")
    return GridFunction(u.grid, u.start_offset + 1, np.diff(u.values))


def nabla_n(u: GridFunction, N: int) -> GridFunction:
    """N-fold backward difference."""
    if N < 1:
        raise DomainError(f"order N must be a positive integer, got {N}")
    if len(u.values) < N + 1:
        raise DomainError(f"nabla^{N} needs at least {N + 1} points, got {len(u.values)}")
    for _ in range(N):
        u = nabla(u)
    return u


def sum_kernel(nu: float, n: int) -> np.ndarray:
    """c[j] = H_{nu-1}(a+j, a) for j = 0..n, the convolution kernel of the fractional sum.

    For nu = 0 this is the unit impulse at j = 1 (the zero-order sum is the
    identity), which is also the limit of the fractional kernel as nu -> 0+.
    Orders inside the negative-integer snap window get the impulse too;
    otherwise H_{nu-1} would snap onto H_{-1} = 0 and lose that limit.
    """
    if nu < 0:
        raise DomainError(f"sum order must be >= 0, got {nu}")
    if nu < NEGATIVE_INTEGER_SNAP:
        c = np.zeros(n + 1)
        if n >= 1:
            c[1] = 1.0
        return c
    return taylor_table(nu - 1, n)


def _sum_values(values_from_1: np.ndarray, nu: float, n: int) -> np.ndarray:
    # f(t) = sum_{s=1}^t c[t-s+1] u(s) for t = 0..n, with f(0) = 0
    c = sum_kernel(nu, n)
    full = np.convolve(c[1:], values_from_1)[:n]
    return np.concatenate(([0.0], full))


def frac_sum(u: GridFunction, nu: float) -> GridFunction:
    """Nabla fractional sum of order nu based at a.

    Returns a function on offsets 0..n with value 0 at offset 0.  For
    ``nu == 0`` the input is returned unchanged on offsets 1..n.
    """
    if nu < 0:
        raise DomainError(f"fractional sum order must be >= 0, got {nu}")
    u = u.restrict(1)
    if nu == 0:
        return u
    n = u.grid.n
    return GridFunction(u.grid, 0, _sum_values(u.values, nu, n))


def difference_order(nu: float) -> int:
    """The integer N with N - 1 < nu <= N."""
    if nu <= 0:
        raise DomainError(f"difference order must be positive, got {nu}")
    return math.ceil(nu)


def frac_diff(u: GridFunction, nu: float) -> GridFunction:
    """Nabla fractional difference of order nu based at a.

    Computed literally as the N-th backward difference of the fractional sum
    of order N - nu.  The sum is taken as 0 at offset a (its convention for
    positive order, and the limiting value for integer nu), so the output
    lives on offsets N..n.
    """
    N = difference_order(nu)
    u = u.restrict(1)
    n = u.grid.n
    if n < N:
        raise DomainError(f"order {nu} difference needs n >= {N}, got n = {n}")
    f = GridFunction(u.grid, 0, _sum_values(u.values, N - nu, n))
    return nabla_n(f, N)


def frac_diff_weights(nu: float, t_offset: int) -> OperatorWeights:
    """Weights w with (nabla_a^nu u)(a+t) = sum_k w[k] u(a+k), for 1 < nu <= 2.

    Expanding the second difference of the (2-nu)-order sum gives
    w_k = c[t-k+1] - 2 c[t-k] + c[t-k-1] with c the sum kernel and
    c[j] = 0 for j <= 0.
    """
    if not 1 < nu <= 2:
        raise DomainError(f"weights are defined for 1 < nu <= 2, got {nu}")
    if t_offset < 2:
        raise DomainError(f"weights need t_offset >= 2, got {t_offset}")
    c = np.concatenate(([0.0, 0.0], sum_kernel(2 - nu, t_offset)))  # c[j] at index j + 2
    k = np.arange(1, t_offset + 1)
    w = c[t_offset - k + 3] - 2 * c[t_offset - k + 2] + c[t_offset - k + 1]
    return OperatorWeights(t_offset, w)


def weight_matrix(nu: float, n: int) -> np.ndarray:
    """Rows t = 2..n of the fractional difference as an (n-1) x n matrix over u(a+1..b)."""
    W = np.zeros((max(n - 1, 0), n))
    for t in range(2, n + 1):
        W[t - 2, :t] = frac_diff_weights(nu, t).coefficients
    return W
