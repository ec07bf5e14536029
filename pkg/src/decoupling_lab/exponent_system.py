"""The decoupling-exponent linear program.

Every multiscale quantity of the bilinear (8,4) argument is recorded as a
power of ``R``:

    tau_j  theta-count product        a_j  r_{j} product
    c_j    r_{j subset j+1} product   n_j  N_j product
    m_j    M_j product                h_j  log-ratio of consecutive heights
    b      exponent of the bilinear ratio lambda_{-1}

with scales ``q_j = 2**-j``.  Structural relations among them, together with
one family of estimates for ``b`` per regime, form a linear program whose
optimum is the best exponent those inequalities can prove.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from enum import Enum
from fractions import Fraction
from typing import Mapping

from .errors import InvariantViolation, KTooSmall, RegimeRangeError
from .exact_lp import (
    EQ,
    FREE,
    LE,
    NONNEG,
    Constraint,
    LinearProgram,
    Status,
    Variable,
    as_rational,
    check_feasible,
    format_rational,
    solve_lp,
    weighted_certificate,
)
from . import exponent_formulas as formulas

HALF = Fraction(1, 2)
TWO_THIRDS = Fraction(2, 3)


class Regime(str, Enum):
    KAKEYA_ONLY = "kakeya"
    SMALL_ALPHA = "small"
    LARGE_ALPHA = "large"

    @classmethod
    def parse(cls, value, alpha=None) -> "Regime":
        if isinstance(value, cls):
            return value
        value = str(value).lower()
        if value == "auto":
            if alpha is None:
                raise ValueError("regime 'auto' needs alpha")
            return cls.SMALL_ALPHA if as_rational(alpha) <= HALF else cls.LARGE_ALPHA
        aliases = {"kakeyaonly": "kakeya", "smallalpha": "small", "largealpha": "large"}
        try:
            return cls(aliases.get(value, value))
        except ValueError:
            raise ValueError(f"unknown regime {value!r}; use kakeya, small, large or auto") from None


def _check_range(alpha: Fraction, regime: Regime):
    if not 0 < alpha < 1:
        raise RegimeRangeError(f"alpha={alpha} must lie in (0, 1)")
    if regime is Regime.SMALL_ALPHA and alpha > HALF:
        raise RegimeRangeError(f"small-alpha regime needs alpha <= 1/2, got {alpha}")
    if regime is Regime.LARGE_ALPHA and alpha <= HALF:
        raise RegimeRangeError(f"large-alpha regime needs 1/2 < alpha < 1, got {alpha}")


def tau(j): return f"tau_{j}"
def a(j): return f"a_{j}"
def c(j): return f"c_{j}"
def n(j): return f"n_{j}"
def m(j): return f"m_{j}"
def h(j): return f"h_{j}"


@dataclass(frozen=True)
class ExponentSystem:
    alpha: Fraction
    K: int
    regime: Regime
    q: tuple[Fraction, ...]
    beta: Fraction | None
    delta: Fraction | None
    program: LinearProgram
    estimate_labels: tuple[str, ...]

    def estimate_value(self, label: str, point: Mapping[str, Fraction]) -> Fraction:
        """Right-hand side of the estimate ``b <= ...`` evaluated at ``point``."""
        con = self.program.constraint(label)
        rest = sum((cf * point[v] for v, cf in con.coeffs.items() if v != "b"), Fraction(0))
        return (con.rhs - rest) / con.coeffs["b"]


def _variables(K: int) -> list[Variable]:
    vs = [Variable("b", FREE)]
    vs += [Variable(tau(j)) for j in range(K + 2)]
    vs += [Variable(a(j)) for j in range(1, K + 2)]
    vs += [Variable(c(j)) for j in range(K + 1)]
    vs += [Variable(n(j)) for j in range(K + 1)]
    vs += [Variable(m(j)) for j in range(1, K + 2)]
    vs += [Variable(h(j), FREE) for j in range(K + 1)]
    return vs


def _add(form: dict, var: str, coef):
    form[var] = form.get(var, Fraction(0)) + Fraction(coef)


def _estimate(k: int, regime: Regime, alpha, q, beta, delta) -> tuple[dict, Fraction]:
    """``b <= const + L(x)`` returned as (coeffs of ``b - L``, const)."""
    rhs_form: dict[str, Fraction] = {}
    if regime is Regime.KAKEYA_ONLY:
        const = Fraction(0)
        for j in range(k + 1):
            _add(rhs_form, a(j + 1), 1)
            _add(rhs_form, h(j), 2)
            _add(rhs_form, tau(j), -1)
            const -= q[j]
        _add(rhs_form, tau(k + 1), 1)
        const -= 2 * q[k + 1]
    else:
        small = regime is Regime.SMALL_ALPHA
        if small:
            const = 2 * (1 - Fraction(1, 2**k)) * alpha - Fraction(5, 2)
            n_coef, h_coef = Fraction(-3, 2), Fraction(2)
        else:
            const = Fraction(-3, 2) - Fraction(1, 2**k)
            n_coef, h_coef = -beta, delta
        _add(rhs_form, tau(0), -1)
        _add(rhs_form, n(0), -1)
        for j in range(1, k + 1):
            _add(rhs_form, tau(j), HALF)
            _add(rhs_form, n(j), n_coef)
            _add(rhs_form, m(j), HALF)
        _add(rhs_form, tau(k + 1), 3)
        _add(rhs_form, m(k + 1), 1)
        for j in range(k):
            _add(rhs_form, h(j), h_coef)
        _add(rhs_form, h(k), 4)
    coeffs = {"b": Fraction(1)}
    for v, cf in rhs_form.items():
        _add(coeffs, v, -cf)
    return coeffs, const


def build_system(alpha, K: int, regime) -> ExponentSystem:
    alpha = as_rational(alpha)
    regime = Regime.parse(regime, alpha)
    _check_range(alpha, regime)
    if not isinstance(K, int) or K < 1:
        raise KTooSmall(f"K must be a positive integer, got {K!r}")
    q = tuple(Fraction(1, 2**j) for j in range(K + 2))
    beta = delta = None
    if regime is Regime.LARGE_ALPHA:
        beta = (alpha + 1) / (2 * alpha)
        delta = 4 - 1 / alpha

    cons = []
    for j in range(K + 1):
        cons.append(Constraint(f"struct-n@{j}", {n(j): 1, a(j + 1): -1, c(j): -1}, EQ, 0))
        cons.append(Constraint(f"ee3@{j}", {n(j): 1, tau(j): -1}, LE, 0))
        cons.append(Constraint(f"ee4@{j}", {tau(j + 1): 1, a(j + 1): -1}, LE, 0))
        cons.append(Constraint(f"ee1@{j}", {h(j): 1, c(j): -1}, LE, 0))
        cons.append(Constraint(f"ee2@{j}", {m(j + 1): 1, h(j): 2, c(j): -1}, LE, q[j + 1]))
        cons.append(Constraint(f"ee6@{j + 1}", {a(j + 1): 1}, LE, alpha * q[j + 1]))
        cons.append(Constraint(f"ee7@{j}", {c(j): 1}, LE, alpha * q[j + 1]))
    cons.append(Constraint("cap-tau0", {tau(0): 1}, LE, alpha))

    labels = ["basic"]
    cons.append(Constraint("basic", {"b": 1, tau(0): -1}, LE, -2))
    for k in range(1, K + 1):
        coeffs, const = _estimate(k, regime, alpha, q, beta, delta)
        label = f"estimate@{k}"
        cons.append(Constraint(label, coeffs, LE, const))
        labels.append(label)

    program = LinearProgram(tuple(_variables(K)), tuple(cons), {"b": 1})
    return ExponentSystem(alpha, K, regime, q, beta, delta, program, tuple(labels))


def optimal_exponent(alpha, K: int, regime) -> Fraction:
    """Largest ``b`` compatible with every inequality of the system."""
    sol = solve_lp(build_system(alpha, K, regime).program)
    if sol.status is not Status.OPTIMAL:
        raise InvariantViolation(f"exponent program is {sol.status.value}")
    return sol.value


def paper_weights(alpha, K: int, regime) -> dict[str, Fraction]:
    """Convex weights on ``basic`` and ``estimate@k`` used to average the estimates.

    Small alpha: 1/3 on the basic estimate, 4/3**(k+1) on the intermediate
    ones and 2/3**K on the last.  Large alpha uses geometric weights in
    ``rho = (1-alpha)/(2-alpha)``; above alpha = 2/3 the basic estimate gets
    no weight and K >= 2 is required.
    """
    alpha = as_rational(alpha)
    regime = Regime.parse(regime, alpha)
    if regime is Regime.KAKEYA_ONLY:
        raise RegimeRangeError("no weight scheme for the Kakeya-only system")
    _check_range(alpha, regime)
    if K < 1:
        raise KTooSmall("K must be at least 1")
    w = {}
    if regime is Regime.SMALL_ALPHA:
        w["basic"] = Fraction(1, 3)
        for k in range(1, K):
            w[f"estimate@{k}"] = Fraction(4, 3 ** (k + 1))
        w[f"estimate@{K}"] = Fraction(2, 3**K)
    else:
        rho = formulas.rho(alpha)
        if alpha <= TWO_THIRDS:
            w["basic"] = (2 - 3 * alpha) / (2 - alpha)
            for k in range(1, K):
                w[f"estimate@{k}"] = 2 * alpha / (2 - alpha) ** 2 * rho ** (k - 1)
            w[f"estimate@{K}"] = 2 * alpha / (2 - alpha) * rho ** (K - 1)
        else:
            if K < 2:
                raise KTooSmall("the alpha > 2/3 weight scheme needs K >= 2")
            w["estimate@1"] = 3 * (1 - alpha) / (2 - alpha)
            for k in range(2, K):
                w[f"estimate@{k}"] = (2 * alpha - 1) / (2 - alpha) ** 2 * rho ** (k - 2)
            w[f"estimate@{K}"] = (2 * alpha - 1) / (2 - alpha) * rho ** (K - 2)
    if any(v < 0 for v in w.values()) or sum(w.values()) != 1:
        raise InvariantViolation("weight scheme is not a convex combination")
    return w


@dataclass(frozen=True)
class CertificateReport:
    bound: Fraction
    closed_form: Fraction
    terminal_term: Fraction
    matches_closed_form: bool

    def to_dict(self) -> dict:
        return {
            "certificate_bound": format_rational(self.bound),
            "closed_form": format_rational(self.closed_form),
            "terminal_term": format_rational(self.terminal_term),
            "matches_closed_form": self.matches_closed_form,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "CertificateReport":
        return cls(
            as_rational(d["certificate_bound"]), as_rational(d["closed_form"]),
            as_rational(d["terminal_term"]), _as_bool(d["matches_closed_form"]),
        )


def _as_bool(x) -> bool:
    if isinstance(x, str):
        return x.lower() == "true"
    return bool(x)


def closed_form_bound(alpha, K: int, regime) -> Fraction:
    """Exponent proved by the averaging argument, without its terminal slack
    in the large-alpha case."""
    alpha = as_rational(alpha)
    regime = Regime.parse(regime, alpha)
    if regime is Regime.SMALL_ALPHA:
        return (Fraction(4, 5) + Fraction(1, 5 * 6**K)) * alpha - 2
    if regime is Regime.LARGE_ALPHA:
        return formulas.phi(alpha) - 2
    raise RegimeRangeError("no closed form for the Kakeya-only system")


def verify_paper_certificate(alpha, K: int, regime) -> CertificateReport:
    """Evaluate the averaging weights as a dual certificate.

    Small alpha: the bound must equal ``(4/5 + 1/(5*6**K))*alpha - 2``.
    Large alpha: the bound minus ``phi(alpha) - 2`` is the terminal term and
    must be nonnegative.
    """
    alpha = as_rational(alpha)
    regime = Regime.parse(regime, alpha)
    system = build_system(alpha, K, regime)
    cert = weighted_certificate(system.program, paper_weights(alpha, K, regime), "b")
    closed = closed_form_bound(alpha, K, regime)
    terminal = cert.bound - closed
    if regime is Regime.SMALL_ALPHA:
        ok = terminal == 0
    else:
        ok = terminal >= 0
    return CertificateReport(cert.bound, closed, terminal, ok)


def saturating_point(alpha, K: int) -> dict[str, Fraction]:
    """Assignment meeting every small-alpha estimate at ``4*alpha/5 - 2``."""
    alpha = as_rational(alpha)
    _check_range(alpha, Regime.SMALL_ALPHA)
    if K < 1:
        raise KTooSmall("K must be at least 1")
    q = [Fraction(1, 2**j) for j in range(K + 2)]
    s = Fraction(4, 5) * alpha
    pt = {"b": s - 2, tau(0): s, c(0): s / 2, h(0): s / 2}
    for j in range(1, K + 2):
        pt[tau(j)] = pt[a(j)] = s * q[j]
    for j in range(1, K + 1):
        pt[c(j)] = pt[h(j)] = s * q[j + 1]
    for j in range(K + 1):
        pt[m(j + 1)] = (1 - s) * q[j + 1]
        pt[n(j)] = pt[a(j + 1)] + pt[c(j)]
    return pt


@dataclass(frozen=True)
class ExponentReport:
    """One row of the solve/verify report."""

    alpha: Fraction
    K: int
    regime: str
    optimum: Fraction
    certificate_bound: Fraction | None = None
    saturating_value: Fraction | None = None
    violations: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("alpha", "optimum", "certificate_bound", "saturating_value"):
            if d[key] is not None:
                d[key] = format_rational(d[key])
        d["violations"] = list(self.violations)
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> "ExponentReport":
        def rat(x):
            return None if x is None else as_rational(x)

        return cls(
            rat(d["alpha"]), int(d["K"]), str(d["regime"]), rat(d["optimum"]),
            rat(d.get("certificate_bound")), rat(d.get("saturating_value")),
            tuple(d.get("violations", ())),
        )


def solve_report(alpha, K: int, regime) -> ExponentReport:
    alpha = as_rational(alpha)
    regime = Regime.parse(regime, alpha)
    system = build_system(alpha, K, regime)
    sol = solve_lp(system.program)
    if sol.status is not Status.OPTIMAL:
        raise InvariantViolation(f"exponent program is {sol.status.value}")
    cert = sat = None
    violations: tuple[str, ...] = ()
    if regime is not Regime.KAKEYA_ONLY and not (
        regime is Regime.LARGE_ALPHA and alpha > TWO_THIRDS and K < 2
    ):
        cert = verify_paper_certificate(alpha, K, regime).bound
    if regime is Regime.SMALL_ALPHA:
        point = saturating_point(alpha, K)
        sat = point["b"]
        violations = tuple(v.label for v in check_feasible(system.program, point))
    return ExponentReport(alpha, K, regime.value, sol.value, cert, sat, violations)
