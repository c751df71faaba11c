"""Gamma ratios, generalized rising functions and nabla Taylor monomials.

Gamma ratios are taken directly while both arguments stay below the double
precision overflow point, and in log form with explicit sign tracking beyond
it, so values stay finite for spans in the thousands and keep the correct
sign for negative non-integer arguments.  Poles follow the conventions

* ``t^(r) = 0`` when ``t`` is a nonpositive integer but ``t + r`` is not,
* ``H_mu(t, a) = 0`` when ``t = a`` or ``mu`` is a negative integer.

Grid points are addressed by integer offsets from the base point ``a``; the
real value of ``a`` never enters a formula.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DomainError, PoleError

# |mu - (-m)| below this is treated as the negative integer -m.
NEGATIVE_INTEGER_SNAP = 1e-9


@dataclass(frozen=True)
class SignedLogMagnitude:
    """A real number stored as ``sign * exp(log_abs)``; ``sign == 0`` is zero."""

    sign: int
    log_abs: float = 0.0

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or 1, got {self.sign!r}")
        if self.sign != 0 and not math.isfinite(self.log_abs):
            raise ValueError("nonzero SignedLogMagnitude needs a finite log_abs")

    @classmethod
    def zero(cls) -> SignedLogMagnitude:
        return cls(0, 0.0)

    @classmethod
    def from_float(cls, x: float) -> SignedLogMagnitude:
        if x == 0:
            return cls.zero()
        return cls(1 if x > 0 else -1, math.log(abs(x)))

    @property
    def is_zero(self) -> bool:
        return self.sign == 0

    def __mul__(self, other: SignedLogMagnitude) -> SignedLogMagnitude:
        if self.sign == 0 or other.sign == 0:
            return self.zero()
        return SignedLogMagnitude(self.sign * other.sign, self.log_abs + other.log_abs)

    def __truediv__(self, other: SignedLogMagnitude) -> SignedLogMagnitude:
        if other.sign == 0:
            raise ZeroDivisionError("division by an exact zero")
        if self.sign == 0:
            return self.zero()
        return SignedLogMagnitude(self.sign * other.sign, self.log_abs - other.log_abs)

    def __float__(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_abs)

    value = __float__


@dataclass(frozen=True)
class Grid:
    """The finite grid a, a+1, ..., b with b = a + n."""

    a: float = 0.0
    n: int = 1

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"grid span n must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))

    @property
    def b(self) -> float:
        return self.a + self.n

    def point(self, offset: int) -> float:
        return self.a + offset

    def offsets(self, start: int = 0) -> range:
        return range(start, self.n + 1)


def is_pole(x: float) -> bool:
    """True when Γ has a pole at ``x`` (x in {..., -2, -1, 0})."""
    return x <= 0 and float(x).is_integer()


def snap_order(mu: float) -> float:
    """Round ``mu`` onto a negative integer when it is within the snap window."""
    m = round(mu)
    if m < 0 and abs(mu - m) < NEGATIVE_INTEGER_SNAP:
        return float(m)
    return float(mu)


def is_negative_integer(mu: float) -> bool:
    mu = snap_order(mu)
    return mu < 0 and mu.is_integer()


# Above this magnitude Γ overflows double precision; switch to log space.
DIRECT_GAMMA_LIMIT = 170.0
# Stirling series of log Γ is used for both arguments at or above this.
STIRLING_MIN = 10.0
_STIRLING_COEFFS = (1 / 12, -1 / 360, 1 / 1260, -1 / 1680, 1 / 1188,
                    -691 / 360360, 1 / 156, -3617 / 122400)


def _signed_lgamma(x: float) -> SignedLogMagnitude:
    """Γ(x) in signed log form; negative arguments go through the reflection formula."""
    if x > 0:
        return SignedLogMagnitude(1, float(special.gammaln(x)))
    # Γ(x) = π / (sin(πx) Γ(1-x)),  Γ(1-x) > 0 here
    s = math.sin(math.pi * (x - 2 * math.floor(x / 2)))
    return SignedLogMagnitude(1 if s > 0 else -1,
                              math.log(math.pi) - math.log(abs(s)) - float(special.gammaln(1 - x)))


def _stirling_tail(x: float) -> float:
    inv, inv2, acc = 1.0 / x, 1.0 / (x * x), 0.0
    for c in _STIRLING_COEFFS:
        acc += c * inv
        inv *= inv2
    return acc


def _log_gamma_ratio_large(x: float, y: float) -> float:
    """log Γ(x) - log Γ(y) for x, y >= STIRLING_MIN without the cancellation of two lgammas."""
    d = x - y
    return ((y - 0.5) * math.log1p(d / y) + d * math.log(x) - d
            + _stirling_tail(x) - _stirling_tail(y))


def gamma_ratio(x: float, y: float) -> SignedLogMagnitude:
    """Γ(x)/Γ(y) as a signed log-magnitude.

    A pole in the denominator only gives an exact zero; a pole in the
    numerator only raises :class:`PoleError`.  Poles in both are rejected
    because the ratio then depends on how the limit is taken.
    """
    px, py = is_pole(x), is_pole(y)
    if px and py:
        raise DomainError(f"Γ({x})/Γ({y}): both arguments are poles")
    if py:
        return SignedLogMagnitude.zero()
    if px:
        raise PoleError(f"Γ({x})/Γ({y}) is infinite")
    if abs(x) < DIRECT_GAMMA_LIMIT and abs(y) < DIRECT_GAMMA_LIMIT:
        return SignedLogMagnitude.from_float(float(special.gamma(x)) / float(special.gamma(y)))
    if x >= STIRLING_MIN and y >= STIRLING_MIN:
        return SignedLogMagnitude(1, _log_gamma_ratio_large(x, y))
    return _signed_lgamma(x) / _signed_lgamma(y)


def rising(t: float, r: float) -> float:
    """Generalized rising function t^(r) = Γ(t+r)/Γ(t)."""
    if is_pole(t) and is_pole(t + r):
        raise DomainError(f"rising({t}, {r}) is undefined: t and t+r are both poles")
    try:
        return float(gamma_ratio(t + r, t))
    except PoleError as exc:
        raise DomainError(f"rising({t}, {r}): t+r is a pole") from exc


def _taylor_slm(mu: float, k: int) -> SignedLogMagnitude:
    # H_mu(a+k, a) = Γ(k+mu) / (Γ(k) Γ(mu+1))
    mu = snap_order(mu)
    if k == 0 or is_negative_integer(mu):
        return SignedLogMagnitude.zero()
    if is_pole(k) and is_pole(k + mu):
        raise DomainError(f"H_{mu} at offset {k} is undefined")
    try:
        num = gamma_ratio(k + mu, k)
    except PoleError as exc:
        raise DomainError(f"H_{mu} at offset {k}: numerator pole") from exc
    return num / _signed_lgamma(mu + 1)


def taylor(mu: float, k: int) -> float:
    """H_mu(a+k, a) for an integer offset ``k`` (``k >= -1``)."""
    if k < -1:
        raise DomainError(f"offset difference {k} < -1 is outside every monomial domain")
    return float(_taylor_slm(mu, int(k)))


def taylor_table(mu: float, kmax: int) -> np.ndarray:
    """Vector of H_mu(a+k, a) for k = 0..kmax."""
    mu = snap_order(mu)
    out = np.zeros(kmax + 1)
    if kmax < 1 or is_negative_integer(mu):
        return out
    k = np.arange(1, kmax + 1, dtype=float)
    direct = k + abs(mu) < DIRECT_GAMMA_LIMIT
    kd = k[direct]
    out[1:][direct] = special.gamma(kd + mu) / special.gamma(kd) / special.gamma(mu + 1)
    for j in np.nonzero(~direct)[0]:
        out[j + 1] = float(_taylor_slm(mu, int(k[j])))
    return out


def monomial(mu: float, t_offset: int, grid: Grid, base_offset: int = 0) -> float:
    """Nabla Taylor monomial H_mu(a + t_offset, a + base_offset)."""
    if not 0 <= t_offset <= grid.n:
        raise DomainError(f"t_offset {t_offset} outside 0..{grid.n}")
    if not 0 <= base_offset <= grid.n:
        raise DomainError(f"base_offset {base_offset} outside 0..{grid.n}")
    if t_offset < base_offset - 1:
        raise DomainError(f"t_offset {t_offset} < base_offset - 1 = {base_offset - 1}")
    return taylor(mu, t_offset - base_offset)


def monomial_ratio(mu: float, t_offset: int, s_offset: int, grid: Grid | None = None) -> float:
    """h_mu(t, s) = H_mu(t, rho(s)) / H_mu(t, a) via the four-gamma closed form."""
    mu = snap_order(mu)
    if not mu > -1:
        raise DomainError(f"monomial_ratio needs mu > -1, got {mu}")
    if s_offset < 1 or t_offset < s_offset:
        raise DomainError(f"need 1 <= s_offset <= t_offset, got s={s_offset}, t={t_offset}")
    if grid is not None and t_offset > grid.n:
        raise DomainError(f"t_offset {t_offset} outside 0..{grid.n}")
    d = t_offset - s_offset
    # Γ(t-s+mu+1) Γ(t-a) / (Γ(t-s+1) Γ(t-a+mu))
    r = gamma_ratio(d + mu + 1, d + 1) * gamma_ratio(t_offset, t_offset + mu)
    return float(r)


def _ratio_nabla_slm(mu: float, t_offset: int, s_offset: int) -> SignedLogMagnitude:
    mu = snap_order(mu)
    if not mu > -1 or mu == 0:
        raise DomainError(f"need mu > -1 and mu != 0, got {mu}")
    if s_offset < 1 or t_offset < s_offset + 1:
        raise DomainError(f"need s_offset >= 1 and t_offset >= s_offset + 1, got s={s_offset}, t={t_offset}")
    if s_offset == 1:
        return SignedLogMagnitude.zero()
    d = t_offset - s_offset
    # mu (s-a-1) Γ(t-s+mu) Γ(t-a-1) / (Γ(t-s+1) Γ(t-a+mu))
    coeff = SignedLogMagnitude.from_float(mu * (s_offset - 1))
    return coeff * gamma_ratio(d + mu, d + 1) * gamma_ratio(t_offset - 1, t_offset + mu)


def monomial_ratio_nabla(mu: float, t_offset: int, s_offset: int) -> float:
    """Backward difference in t of h_mu(t, s), closed form."""
    return float(_ratio_nabla_slm(mu, t_offset, s_offset))


def monomial_ratio_nabla_sign(mu: float, t_offset: int, s_offset: int) -> int:
    """Sign (+1, 0, -1) of the backward difference in t of h_mu(t, s)."""
    return _ratio_nabla_slm(mu, t_offset, s_offset).sign
