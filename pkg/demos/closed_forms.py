"""Closed-form exponents and the two-scale bootstrap."""
from fractions import Fraction

from decoupling_lab import exponent_formulas as fm

half = Fraction(1, 2)
print("gamma8(1/2) =", fm.gamma8(half))
print("gamma_p(16, 1/2) =", fm.gamma_p(16, half))
print("gamma_dec(8, 1/2) =", fm.gamma_dec(8, half), " c_exp =", fm.c_exponent(8, half))

# c_exp against the conjectured value min(1/2 - 3/p, 2(1-alpha)/(p alpha))
for p in (7, 8, 10, 16, 50):
    rep = fm.bounds_report(p, half)
    print(f"p={p:>2}  c={float(fm.c_exponent(p, half)):.5f}  conjecture={float(rep.conjecture):.5f}")

# The bootstrap from psi(1) = gamma_p converges to gamma_dec
seq = fm.bilinear_to_linear(8, half, fm.gamma_p(8, half), 30)
for s in (0, 1, 2, 5, 10, 30):
    print(f"s={s:>2}  {float(seq[s]):.10f}")

# With quasi-orthogonality in L^{p/3} the recursion has xi = 1/2
cb = fm.cantor_bootstrap(9, half, Fraction(1, 6), Fraction(-1, 5))
print("Cantor bootstrap:", cb)
