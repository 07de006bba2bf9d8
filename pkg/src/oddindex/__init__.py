"""Numerical checks of index identities in odd dimensions.

Finite spectral models of Dirac operators are used to check a Lefschetz
formula for reflections of S^1 x Y and the index of cylinders [0, L] x Y
with local chiral boundary conditions.
"""

__version__ = "0.1.0"

from .boundary import (
    BoundaryComponent,
    BoundaryProblem,
    TheoremBReport,
    boundary_index_fd,
    boundary_index_shooting,
    boundary_splitting,
    cobordism_check,
    cylinder_problem,
    hw_equivalence_check,
    theorem_b_rhs,
    union_problem,
    verify_theorem_b,
)
from .clifford import CliffordRep, build_clifford_rep, chirality, pin_lift_factor
from .errors import *  # noqa: F401,F403
from .geometries import (
    DiracModel,
    EvenModel,
    abstract_even_model,
    analytic_index,
    circle_dirac,
    disjoint_union,
    multiplication_operators,
    point_model,
    product_circle,
    sphere_monopole_model,
    torus_flat_model,
)
from .involution import (
    InvolutionLift,
    SplitSpaces,
    TheoremAReport,
    build_lift,
    chiral_index,
    fixed_point_rhs,
    lefschetz_number,
    normalize_lift,
    split_spinors,
    verify_theorem_a,
)
from .linop import (
    ExactRowDiagram,
    IndexReport,
    commutant_dimension,
    heat_trace,
    numerical_index,
    random_exact_diagram,
    snake_additivity_check,
)
