"""The reflection-twisted closed problem and the cylinder problem agree.

Fields on S^1 x Y that are even (or odd) under the lifted reflection are
determined by their values on the half circle [0, 1/2], with a chiral
boundary condition at each fixed slice.  The two indices agree exactly.
"""

from oddindex import abstract_even_model, hw_equivalence_check, point_model, sphere_monopole_model, torus_flat_model

for Y in [point_model(), torus_flat_model(2), sphere_monopole_model(-1, 3)] + [
    abstract_even_model(3, 3, d, 0) for d in range(-3, 4)
]:
    twisted, bdry, equal = hw_equivalence_check(Y, 8)
    print(f"{Y.label:32s} twisted {twisted:+d}  cylinder {bdry:+d}  equal {equal}")
