from fractions import Fraction as F

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from decoupling_lab import exponent_formulas as fm
from decoupling_lab.errors import DomainError, NonconvergenceError
from decoupling_lab.exponent_system import Regime, optimal_exponent

GRID_ALPHA = [F(i, 100) for i in range(1, 100)]
GRID_P = [F(13, 2), F(7), F(8), F(10), F(16), F(50)]


def test_gamma8_examples():
    assert fm.gamma8(F(1, 2)) == F(-1, 5)
    assert fm.gamma8(F(2, 3)) == F(-5, 28)
    assert fm.gamma8(F(4, 5)) == F(-139, 880)


def test_phi_examples():
    assert fm.phi(F(2, 3)) == F(4, 7)
    assert fm.phi(F(3, 5)) == F(1, 2)
    # left limit matches the small-alpha exponent 4 alpha / 5 at 1/2
    assert sp.limit(2 * sp.Symbol("a") / (3 - sp.Symbol("a")), sp.Symbol("a"), sp.Rational(1, 2)) == sp.Rational(2, 5)
    with pytest.raises(DomainError):
        fm.phi(F(1, 2))


def test_gamma_p_examples():
    assert fm.gamma_p(8, F(1, 3)) == fm.gamma8(F(1, 3))
    assert fm.gamma_p(16, F(1, 2)) == F(-3, 80)
    assert F(-3, 80) < F(1, 2) * (F(1, 4) - F(1, 16)) - F(2, 16) == F(-1, 32)
    with pytest.raises(DomainError):
        fm.gamma_p(4, F(1, 2))


def test_gamma_dec_examples():
    assert fm.gamma_dec(8, F(1, 2)) == F(1, 40)
    for alpha in (F(1, 5), F(3, 5), F(9, 10)):
        assert fm.gamma_dec(8, alpha) == (fm.gamma8(alpha) + F(1, 4)) / 2
    assert fm.gamma_dec(12, F(1, 2)) == F(6, 8) * (F(1, 6) + fm.gamma_p(12, F(1, 2)))


def test_c_exponent_examples():
    assert fm.c_exponent(8, F(1, 2)) == F(1, 40)
    assert F(1, 40) <= min(F(1, 8), F(1, 4))
    near = fm.c_exponent(F(6001, 1000), F(1, 2))
    assert 0 < near < F(1, 1000)


def test_bounds_report_examples():
    rep = fm.bounds_report(8, F(1, 2))
    assert rep.gamma_lower == F(-1, 4)
    assert rep.c_upper_energy == F(1, 4) and rep.c_upper_trivial == F(1, 8)
    assert fm.bounds_report(8, 1).c_upper_energy == 0


def test_bootstrap_examples():
    seq = fm.bootstrap_iterate(8, F(1, 2), F(-1, 5), 30)
    assert seq[0] == F(-1, 5)
    assert abs(seq[30] - F(1, 40)) < F(1, 10**6)
    with pytest.raises(NonconvergenceError):
        fm.bootstrap_iterate(5, F(1, 2), 0, 3)
    with pytest.raises(DomainError):
        fm.bootstrap_iterate(2, F(1, 2), 0, 3)


def test_bootstrap_recursion_against_sympy():
    # solve the linear recursion symbolically and compare term by term
    s = sp.Symbol("s", integer=True, nonnegative=True)
    psi = sp.Function("psi")
    x, e = sp.Rational(1, 3), sp.Rational(1, 24)
    g = sp.Rational(1, 40)
    rec = psi(s + 1) - psi(s) / 2 - g / 2 * (1 - x ** (s + 1)) - e * x**s
    sol = sp.rsolve(rec, psi(s), {psi(0): sp.Rational(-1, 5)})
    seq = fm.bootstrap_iterate(8, F(1, 2), F(-1, 5), 12)
    for k, value in enumerate(seq):
        assert sp.Rational(value.numerator, value.denominator) == sp.nsimplify(sol.subs(s, k))


def test_cantor_bootstrap_examples():
    p, alpha = F(9), F(1, 2)
    kappa = F(1, 2) - 3 / p
    rep = fm.cantor_bootstrap(p, alpha, kappa, F(-1, 5))
    assert rep.limit_bound == alpha * kappa / 2
    assert rep.xi == F(1, 2) and rep.eta == alpha * kappa / 8
    edge = fm.cantor_bootstrap(8, alpha, F(1, 6), F(-1, 4))
    assert edge.s0_bound == 0 and edge.s0_improves
    rep = fm.cantor_bootstrap(9, alpha, F(1, 6), F(-1, 5))
    assert rep.best == min(rep.limit_bound, rep.s0_bound)
    # finite-s bounds tend to the limit
    far = rep.finite_s_bound(9, F(-1, 5), 10**6)
    assert abs(far - rep.limit_bound) < F(1, 10**4)


def test_formula_params_round_trip():
    params = fm.formula_params(8, F(1, 2))
    assert params.gamma8 == F(-1, 5) and params.c_exp == F(1, 40) and params.phi is None
    assert fm.FormulaParams.from_dict(params.to_dict()) == params
    low = fm.formula_params(5, F(3, 5))
    assert low.gamma_dec is None and low.c_exp is None


def test_bootstrap_steps_round_trip():
    steps = fm.bootstrap_steps(8, F(1, 2), 5)
    assert [st.s for st in steps] == list(range(6))
    assert all(fm.BootstrapStep.from_dict(st.to_dict()) == st for st in steps)


def test_strictness_grid():
    for alpha in GRID_ALPHA:
        assert fm.gamma8(alpha) < alpha / 8 - F(1, 4)
        for p in GRID_P:
            assert fm.gamma_p(p, alpha) < alpha * (F(1, 4) - 1 / p) - 2 / p
            assert fm.c_exponent(p, alpha) > 0


def test_branch_agreement():
    a = F(1, 2)
    assert a / 10 == a / (4 * (3 - a))
    b = F(2, 3)
    assert b / (4 * (3 - b)) == (-3 * b * b + 13 * b - 2) / (32 * (3 - b))
    assert fm.gamma8(a) is not None and fm.phi(b) == F(4, 7)


def test_gamma_dec_fixed_point_with_sympy():
    g, x, e, psi1, p = sp.symbols("g x e psi1 p")
    # fixed point of psi -> psi/2 + g/2 (1 - x) + e ... as the scale-free limit
    fixed = sp.solve(sp.Eq(g, (psi1 * (1 - 2 * x) + 2 * e) / (1 - x)), g)[0]
    for pv in (F(13, 2), F(8), F(16)):
        for alpha in (F(1, 3), F(3, 5), F(9, 10)):
            subs = {x: sp.Rational(2) / (sp.Rational(str(pv)) - 2),
                    e: (sp.Rational(str(pv)) - 6) / (sp.Rational(str(pv)) * (sp.Rational(str(pv)) - 2)),
                    psi1: sp.Rational(str(fm.gamma_p(pv, alpha)))}
            assert sp.Rational(str(fm.gamma_dec(pv, alpha))) == sp.simplify(fixed.subs(subs))


# -- properties -------------------------------------------------------------------------

alphas = st.fractions(min_value=F(1, 60), max_value=F(59, 60), max_denominator=60)
ps = st.fractions(min_value=F(61, 10), max_value=F(60), max_denominator=10)


@settings(max_examples=200, deadline=None)
@given(ps, alphas)
def test_strictness_property(p, alpha):
    assert fm.gamma_p(p, alpha) < alpha * (F(1, 4) - 1 / p) - 2 / p
    assert fm.c_exponent(p, alpha) > 0
    rep = fm.bounds_report(p, alpha)
    assert rep.c_below_conjecture


@settings(max_examples=40, deadline=None)
@given(alphas.filter(lambda a: a <= F(1, 2)), st.integers(1, 4))
def test_gamma8_ties_to_lp(alpha, K):
    value = 8 * fm.gamma8(alpha) + 2
    assert F(4, 5) * alpha <= value <= F(4, 5) * alpha + alpha / (5 * 6**K)
    assert value - 2 <= optimal_exponent(alpha, K, Regime.SMALL_ALPHA)


@settings(max_examples=60, deadline=None)
@given(ps, alphas, st.fractions(min_value=-1, max_value=1, max_denominator=20))
def test_bootstrap_closed_form_property(p, alpha, psi1):
    seq = fm.bootstrap_iterate(p, alpha, psi1, 15)
    assert len(seq) == 16
    # psi(xi^s) + 2 xi^s / p is the linear sequence
    lin = fm.bilinear_to_linear(p, alpha, psi1, 15)
    assert all(l - v == 2 * fm.xi(p) ** s / p for s, (v, l) in enumerate(zip(seq, lin)))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.fractions(min_value=F(41, 10), max_value=F(30), max_denominator=10),
                min_size=3, max_size=3, unique=True), alphas)
def test_interpolation_is_affine_in_one_over_p(ps3, alpha):
    # on each side of 8 the points (1/p, gamma_p) are collinear, with endpoints
    # -1/2 at p = 4 and alpha/4 at 1/p = 0
    sides = [
        ([p for p in ps3 if p >= 8], (F(0), alpha / 4)),
        ([p for p in ps3 if p <= 8], (F(1, 4), F(-1, 2))),
    ]
    for side, anchor in sides:
        pts = [(1 / p, fm.gamma_p(p, alpha)) for p in side] + [(F(1, 8), fm.gamma8(alpha))]
        pts.append(anchor)
        (x0, y0), (x1, y1) = pts[-1], pts[-2]
        for x, y in pts:
            assert (y - y0) * (x1 - x0) == (y1 - y0) * (x - x0)
