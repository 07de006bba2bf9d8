"""Clifford modules, chirality and the reflection factor.

Builds the irreducible modules in dimensions 1 to 6, checks the relations
c(e)^2 = -1, and shows that the volume element is a scalar in odd
dimensions and a grading (after the factor i^m) in even ones.
"""

import numpy as np

from oddindex import build_clifford_rep, chirality, pin_lift_factor
from oddindex.clifford import check_rep

for n in range(1, 7):
    rep = build_clifford_rep(n)
    line = f"n={n}: spinor size {rep.size}, relation defect {check_rep(rep):.0e}"
    if n % 2:
        c = complex(rep.volume[0, 0])
        line += f", volume = ({c.real:+.0f}{c.imag:+.0f}i) * Id"
    else:
        ev = np.linalg.eigvalsh(chirality(rep))
        line += f", chirality splits {int(np.sum(ev > 0))} + {int(np.sum(ev < 0))}"
    print(line)

# The reflection in 2r+1 normal directions acts on spinors by an involution
# that commutes with the normal generators and anticommutes with the rest.
rep = build_clifford_rep(5)
for r in range(3):
    P = pin_lift_factor(r, rep)
    commutes = [bool(np.allclose(P @ g, g @ P)) for g in rep.generators]
    print(f"r={r}: P^2 = Id: {np.allclose(P @ P, np.eye(rep.size))}, commutes with e_i: {commutes}")
