"""Above alpha = 1/2 the optimum approaches Phi(alpha) - 2 geometrically in K."""
from fractions import Fraction

from decoupling_lab import exponent_formulas as fm
from decoupling_lab.exponent_system import Regime, optimal_exponent

for alpha in (Fraction(3, 5), Fraction(2, 3), Fraction(4, 5)):
    target = fm.phi(alpha) - 2
    gaps = [optimal_exponent(alpha, K, Regime.LARGE_ALPHA) - target for K in range(2, 9)]
    ratios = [float(b / a) for a, b in zip(gaps, gaps[1:])]
    print(f"alpha={alpha}  Phi-2={target}  gaps={[f'{float(g):.2e}' for g in gaps]}")
    # compare with rho/2
    print("   successive ratios", [round(r, 4) for r in ratios], " rho/2 =", float(fm.rho(alpha) / 2))
