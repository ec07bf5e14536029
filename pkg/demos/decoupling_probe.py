"""Exponential sums over the lifted Cantor set versus the proven exponent.

For even p the torus average of |sum e(f.x)|^p is exactly the p-energy; the
ratio to sqrt(#S) is a lower bound for the decoupling constant.
"""
from decoupling_lab.cantor_lab import CantorSpec, build_cantor, empirical_dec_lower, energy, exp_sum_norm

for i in range(1, 4):
    S = build_cantor(CantorSpec(3, (0, 2), i)).parabola()
    print(i, exp_sum_norm(S, 4) ** 4, energy(S, 4).energy)

for p in (7, 8, 10):
    for i in range(1, 4):
        probe = empirical_dec_lower(build_cantor(CantorSpec(3, (0, 2), i)), p)
        tag = "exact" if probe.exact else "estimate"
        print(f"p={p:>2} i={i}  ratio={probe.ratio:.4f}  cap={probe.theoretical_cap:.4f}  ({tag})")
