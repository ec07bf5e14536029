"""Closed-form decoupling exponents, evaluated exactly.

All functions take rationals (ints, Fractions or ``"p/q"`` strings) and return
Fractions.  Piecewise formulas are evaluated on closed overlaps: when a
parameter sits on a breakpoint both neighbouring branches are computed and
must agree, otherwise :class:`InvariantViolation` is raised.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields
from fractions import Fraction
from typing import Mapping

from .errors import DomainError, InvariantViolation, NonconvergenceError
from .exact_lp import as_rational, format_rational

HALF = Fraction(1, 2)
TWO_THIRDS = Fraction(2, 3)


def _alpha(alpha) -> Fraction:
    alpha = as_rational(alpha)
    if not 0 < alpha < 1:
        raise DomainError(f"alpha={alpha} must lie in (0, 1)")
    return alpha


def _p(p, lower) -> Fraction:
    p = as_rational(p)
    if p <= lower:
        raise DomainError(f"p={p} must exceed {lower}")
    return p


def _piecewise(x: Fraction, branches) -> Fraction:
    """``branches`` is a list of (lo, hi, f) on closed intervals [lo, hi]."""
    values = [f(x) for lo, hi, f in branches if lo <= x <= hi]
    if not values:
        raise DomainError(f"{x} lies outside every branch")
    if any(v != values[0] for v in values[1:]):
        raise InvariantViolation(f"branches disagree at {x}: {values}")
    return values[0]


def gamma8(alpha) -> Fraction:
    """Bilinear (8,4) exponent; ``gamma8 + 1/4`` is alpha/10, alpha/(4(3-alpha)),
    or (-3a^2+13a-2)/(32(3-a)) on (0,1/2], [1/2,2/3], [2/3,1)."""
    alpha = _alpha(alpha)
    shifted = _piecewise(alpha, [
        (0, HALF, lambda x: x / 10),
        (HALF, TWO_THIRDS, lambda x: x / (4 * (3 - x))),
        (TWO_THIRDS, 1, lambda x: (-3 * x * x + 13 * x - 2) / (32 * (3 - x))),
    ])
    return shifted - Fraction(1, 4)


def phi(alpha) -> Fraction:
    alpha = as_rational(alpha)
    if not HALF < alpha < 1:
        raise DomainError(f"phi needs 1/2 < alpha < 1, got {alpha}")
    value = _piecewise(alpha, [
        (HALF, TWO_THIRDS, lambda x: 2 * x / (3 - x)),
        (TWO_THIRDS, 1, lambda x: (-3 * x * x + 13 * x - 2) / (4 * (3 - x))),
    ])
    if 8 * gamma8(alpha) != value - 2:
        raise InvariantViolation("8*gamma8 != phi - 2")
    return value


def rho(alpha) -> Fraction:
    alpha = _alpha(alpha)
    return (1 - alpha) / (2 - alpha)


def xi(p) -> Fraction:
    p = _p(p, 2)
    return 2 / (p - 2)


def eta(p) -> Fraction:
    p = _p(p, 2)
    return (p - 6) / (p * (p - 2))


def gamma_p(p, alpha) -> Fraction:
    """Bilinear (p, p/2) exponent by interpolation through p = 8.

    Above 8 the other endpoint is p = infinity with exponent alpha/4; below 8
    it is p = 4 with exponent -1/2, taken with weight ``t = 2 - 8/p``.
    """
    p = _p(p, 4)
    alpha = _alpha(alpha)
    g8 = gamma8(alpha)
    values = []
    if p >= 8:
        values.append(8 / p * (g8 - alpha / 4) + alpha / 4)
    if p <= 8:
        t = 2 - 8 / p
        values.append(t * g8 - (1 - t) / 2)
    if len(values) == 2 and values[0] != values[1]:
        raise InvariantViolation("interpolation branches disagree at p=8")
    return values[0]


def gamma_dec(p, alpha) -> Fraction:
    """Linear decoupling exponent bound ``(p-6)/(p-4) * (2/p + gamma_p)``.

    Cross-checked against the fixed point ``(psi1 (1-2 xi) + 2 eta)/(1 - xi)``.
    """
    p = _p(p, 6)
    g = gamma_p(p, alpha)
    chain = (p - 6) / (p - 4) * (2 / p + g)
    x, e = xi(p), eta(p)
    fixed = (g * (1 - 2 * x) + 2 * e) / (1 - x)
    if chain != fixed:
        raise InvariantViolation("fixed-point and chain formulas disagree")
    return chain


def c_exponent(p, alpha) -> Fraction:
    """Gain over the trivial exponent: Dec_p <~ R^{alpha/2 (1/2 - 3/p - c)}."""
    p = _p(p, 6)
    alpha = _alpha(alpha)
    value = HALF - 3 / p - 2 / alpha * gamma_dec(p, alpha)
    if value <= 0:
        raise InvariantViolation(f"c_exponent({p}, {alpha}) = {value} is not positive")
    return value


@dataclass(frozen=True)
class BoundsReport:
    gamma_lower: Fraction
    c_upper_energy: Fraction
    c_upper_trivial: Fraction
    c_upper_interference: Fraction
    conjecture: Fraction
    gamma_p_above_lower: bool
    c_below_conjecture: bool | None


def bounds_report(p, alpha) -> BoundsReport:
    p = _p(p, 4)
    alpha = as_rational(alpha)
    if not 0 < alpha <= 1:
        raise DomainError(f"alpha={alpha} must lie in (0, 1]")
    lower = -2 / p if p <= 4 / alpha else alpha / 4 - 3 / p
    energy = 2 * (1 - alpha) / (p * alpha)
    trivial = HALF - 3 / p
    conj = min(trivial, energy)
    above = below = None
    if alpha < 1:
        above = gamma_p(p, alpha) > lower
        if p > 6:
            below = c_exponent(p, alpha) <= conj
            if not below:
                raise InvariantViolation(f"c_exponent exceeds the conjectured value at p={p}, alpha={alpha}")
    return BoundsReport(lower, energy, trivial, 3 * (1 - alpha) / (p * alpha), conj, above, below)


def bootstrap_iterate(p, alpha, psi1, s_max: int) -> list[Fraction]:
    """Upper bounds for psi(xi**s), s = 0..s_max, from the two-scale recursion

        psi(xi^{s+1}) <= psi(xi^s)/2 + gamma/2 (1 - xi^{s+1}) + eta xi^s

    run with equality, gamma being ``gamma_dec(p, alpha)``.  Every term is
    checked against the closed form of the recursion.
    """
    p = as_rational(p)
    if p <= 6:
        if p > 2 and 2 * xi(p) >= 1:
            raise NonconvergenceError(f"2*xi = {2 * xi(p)} >= 1 at p={p}; the bootstrap diverges")
        raise DomainError(f"p={p} must exceed 6")
    psi1 = as_rational(psi1)
    g = gamma_dec(p, alpha)
    x, e = xi(p), eta(p)
    seq = [psi1]
    for s in range(s_max):
        seq.append(seq[-1] / 2 + g / 2 * (1 - x ** (s + 1)) + e * x**s)
    for s, value in enumerate(seq):
        if value != bootstrap_closed_form(p, alpha, psi1, s):
            raise InvariantViolation(f"recursion and closed form disagree at s={s}")
    return seq


def bootstrap_closed_form(p, alpha, psi1, s: int) -> Fraction:
    p = _p(p, 6)
    psi1 = as_rational(psi1)
    g = gamma_dec(p, alpha)
    x, e = xi(p), eta(p)
    two_s = Fraction(1, 2**s)
    return two_s * psi1 + g * (1 - two_s) + 2 * (e / x - g / 2) * (two_s - x**s) / (1 / x - 2)


def bilinear_to_linear(p, alpha, psi1, s_max: int) -> list[Fraction]:
    """``psi(xi^s) + 2 xi^s / p``, the resulting bound on the decoupling exponent."""
    p = as_rational(p)
    x = xi(p)
    return [v + 2 * x**s / p for s, v in enumerate(bootstrap_iterate(p, alpha, psi1, s_max))]


@dataclass(frozen=True)
class CantorBootstrap:
    xi: Fraction
    eta: Fraction
    limit_bound: Fraction
    s0_bound: Fraction
    s0_improves: bool
    best: Fraction

    def finite_s_bound(self, p, psi1, s: int) -> Fraction:
        """``gamma <= (4/p + 2 psi1 + 4 s eta) / (s + 2)``."""
        p, psi1 = as_rational(p), as_rational(psi1)
        return (4 / p + 2 * psi1 + 4 * s * self.eta) / (s + 2)


def cantor_bootstrap(p, alpha, kappa, psi1) -> CantorBootstrap:
    """Bootstrap with L^{p/3} quasi-orthogonality in place of L^2.

    Here xi = 1/2 and eta = alpha*kappa/8; letting s grow gives
    ``gamma <= alpha*kappa/2`` while s = 0 gives ``gamma <= 2/p + psi1``.
    """
    p = _p(p, 6)
    alpha = _alpha(alpha)
    kappa = as_rational(kappa)
    psi1 = as_rational(psi1)
    limit = alpha * kappa / 2
    s0 = 2 / p + psi1
    return CantorBootstrap(HALF, alpha * kappa / 8, limit, s0, s0 < limit, min(limit, s0))


@dataclass(frozen=True)
class FormulaParams:
    p: Fraction
    alpha: Fraction
    xi: Fraction
    eta: Fraction
    gamma8: Fraction
    phi: Fraction | None
    gamma_p: Fraction
    gamma_dec: Fraction | None
    c_exp: Fraction | None
    psi1: Fraction
    rho: Fraction
    A_const: Fraction
    E_const: Fraction

    def to_dict(self) -> dict:
        return {k: (None if v is None else format_rational(v)) for k, v in asdict(self).items()}

    @classmethod
    def from_dict(cls, d: Mapping) -> "FormulaParams":
        return cls(**{f.name: (None if d[f.name] is None else as_rational(d[f.name])) for f in fields(cls)})


def formula_params(p, alpha) -> FormulaParams:
    p = _p(p, 4)
    alpha = _alpha(alpha)
    g = gamma_p(p, alpha)
    big = p > 6
    return FormulaParams(
        p=p,
        alpha=alpha,
        xi=xi(p),
        eta=eta(p),
        gamma8=gamma8(alpha),
        phi=phi(alpha) if alpha > HALF else None,
        gamma_p=g,
        gamma_dec=gamma_dec(p, alpha) if big else None,
        c_exp=c_exponent(p, alpha) if big else None,
        psi1=g,
        rho=rho(alpha),
        A_const=2 * (3 * alpha - 1) / (2 - alpha),
        E_const=(2 * alpha - 1) * (3 * alpha - 1) / (alpha * (2 - alpha)),
    )


@dataclass(frozen=True)
class BootstrapStep:
    """One term of the bootstrap: ``psi`` bounds psi(xi^s), ``linear`` the
    resulting decoupling exponent."""

    p: Fraction
    alpha: Fraction
    s: int
    psi: Fraction
    linear: Fraction

    def to_dict(self) -> dict:
        return {k: (v if k == "s" else format_rational(v)) for k, v in asdict(self).items()}

    @classmethod
    def from_dict(cls, d: Mapping) -> "BootstrapStep":
        return cls(as_rational(d["p"]), as_rational(d["alpha"]), int(d["s"]),
                   as_rational(d["psi"]), as_rational(d["linear"]))


def bootstrap_steps(p, alpha, s_max: int, psi1=None) -> list[BootstrapStep]:
    """Bootstrap sequence started from ``psi1`` (default ``gamma_p``)."""
    p, alpha = _p(p, 6), _alpha(alpha)
    psi1 = gamma_p(p, alpha) if psi1 is None else as_rational(psi1)
    psi = bootstrap_iterate(p, alpha, psi1, s_max)
    lin = bilinear_to_linear(p, alpha, psi1, s_max)
    return [BootstrapStep(p, alpha, s, a, b) for s, (a, b) in enumerate(zip(psi, lin))]
