"""Index of the reflection-twisted Dirac operator on S^1 and S^1 x Y.

The reflection x -> -x of the circle lifts to spinors.  Splitting spinor
fields into its +1 and -1 eigenspaces (even and odd fields) turns the
self-adjoint Dirac operator into a Fredholm map between them.  Its index is
a sum over the fixed points x = 0 and x = 1/2, each contributing
index(D_F) / 2.
"""

from oddindex import (
    abstract_even_model,
    circle_dirac,
    product_circle,
    sphere_monopole_model,
    torus_flat_model,
    verify_theorem_a,
)

rep = verify_theorem_a(circle_dirac(8))
print("circle: index", rep.lhs.index, "= fixed-point sum", rep.rhs_total)
for c in rep.rhs_components:
    print("   ", c.label, "contributes", c.contribution)

fibres = [abstract_even_model(3, 3, d, 0) for d in (-2, 1, 3)]
fibres += [torus_flat_model(2), sphere_monopole_model(2, 4), sphere_monopole_model(-1, 3)]
for Y in fibres:
    rep = verify_theorem_a(product_circle(Y, 8))
    print(f"S^1 x {Y.label}: index {rep.lhs.index}, fixed-point sum {rep.rhs_total}, match {rep.match}")

# reversing the lift's sign swaps the two eigenspaces and negates both sides
rep = verify_theorem_a(product_circle(fibres[2], 8), sign=-1)
print("opposite lift:", rep.lhs.index, rep.rhs_total)
