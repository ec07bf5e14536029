"""Energies, sumsets and regularity of the middle-thirds Cantor set at finite level."""
import numpy as np

from decoupling_lab.cantor_lab import (
    CantorSpec, build_cantor, check_ad_regular, d_p_lower_from_energy, energy, sumset,
)

for i in range(6):
    level = build_cantor(CantorSpec(3, (0, 2), i))
    S = level.parabola()
    e_line = energy(level.points, 4).energy
    e_par = energy(S, 4).energy
    card = sumset(S, 2).cardinality if i else 1
    print(f"i={i}  #C={len(level.points):>3}  E4(C)={e_line:>6}  E4(S)={e_par:>6}  #(S+S)={card}")

# the line energy is exactly 6^i here, the parabola breaks most coincidences
print(np.array([energy(build_cantor(CantorSpec(3, (0, 2), i)).points, 4).energy for i in range(6)]))

rep = check_ad_regular(build_cantor(CantorSpec(3, (0, 2), 6)))
print("C_AD =", float(rep.c_ad), " worst windows:", rep.upper_witness, rep.lower_witness)

print(d_p_lower_from_energy(build_cantor(CantorSpec(5, (0, 2, 4), 3)), 4))
