"""Solving the exponent system exactly and reading off the averaging argument."""
from fractions import Fraction

from decoupling_lab.exact_lp import check_feasible
from decoupling_lab.exponent_system import (
    Regime, build_system, optimal_exponent, paper_weights, saturating_point,
    verify_paper_certificate,
)

alpha = Fraction(1, 2)

# The system for K scales has one "estimate" per scale plus the basic one.
system = build_system(alpha, 2, Regime.SMALL_ALPHA)
print(len(system.program.variables), "variables,", len(system.program.constraints), "constraints")
print("estimates:", system.estimate_labels)

# Exact optimum versus the closed form (4/5 + 1/(5 6^K)) alpha - 2
for K in range(1, 7):
    best = optimal_exponent(alpha, K, Regime.SMALL_ALPHA)
    cert = verify_paper_certificate(alpha, K, Regime.SMALL_ALPHA)
    print(f"K={K}  optimum={best}  certificate={cert.bound}  equal={best == cert.bound}")

# The weights behind the certificate add up to one
w = paper_weights(alpha, 3, Regime.SMALL_ALPHA)
print({k: str(v) for k, v in w.items()}, "sum =", sum(w.values()))

# A feasible point sits exactly at 4 alpha/5 - 2, so no K can beat it
pt = saturating_point(alpha, 3)
print("violations:", check_feasible(build_system(alpha, 3, Regime.SMALL_ALPHA).program, pt))
print("b at the saturating point:", pt["b"])
