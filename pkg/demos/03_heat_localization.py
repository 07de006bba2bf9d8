"""Heat-kernel form of the Lefschetz number.

The graded endomorphism (lift on the domain copy, minus the lift on the
codomain copy) has Lefschetz number twice the index.  Its heat trace
Tr(theta e^{-tD^2}) is independent of t because nonzero eigenvalues come
in pairs that the lift exchanges.
"""

from oddindex import abstract_even_model, build_lift, circle_dirac, lefschetz_number, product_circle

models = {
    "circle": circle_dirac(8),
    "S^1 x Y (index 2)": product_circle(abstract_even_model(3, 3, 2, 1), 8),
}
for name, model in models.items():
    lift = build_lift(model, 1)
    print(name, "exact:", lefschetz_number(model, lift, "exact"))
    for t in (0.001, 0.1, 1.0, 10.0):
        print(f"    t={t:<6g} heat: {lefschetz_number(model, lift, 'heat', t=t):.15f}")
