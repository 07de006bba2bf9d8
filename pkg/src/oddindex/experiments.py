"""Experiment presets and verification records for the command line driver.

Every experiment turns into a list of :class:`VerificationRecord`.  A record
compares a left-hand side (computed from an operator) with a right-hand side
(computed from topological data) and stores the exact comparison in
``match``.  Diagnostics are informational only.

Anchors name the identity being checked:

``lefschetz-fixed-point``
    index of the reflection-twisted operator = sum over fixed components.
``lefschetz-doubling``
    exact Lefschetz number of the graded lift = 2 * index.
``heat-localization``
    heat-kernel Lefschetz number at time t = 2 * index.
``mixed-boundary-index``
    index of the cylinder problem = signed sum over the boundary components.
``finite-difference-witness``
    finite-difference index = shooting index.
``reflection-boundary-equivalence``
    index of the twisted closed problem = index of the cylinder problem.
``index-additivity``
    index T = index T' + index T'' for an exact-row diagram.
``commutant-scalars``, ``lift-sign-covariance``
    locally constant scalars and sign flips of the lift.
"""

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import __version__
from .boundary import (
    boundary_index_fd,
    cylinder_problem,
    hw_equivalence_check,
    verify_theorem_b,
)
from .errors import stage
from .geometries import (
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
    HEAT_TIMES,
    build_lift,
    chiral_index,
    lefschetz_number,
    split_spinors,
    verify_theorem_a,
)
from .linop import (
    commutant_dimension,
    long_exact_sequence,
    random_dimension_profile,
    random_exact_diagram,
    snake_additivity_check,
)

EXPERIMENTS = (
    "theorem-a",
    "theorem-b",
    "hw-equivalence",
    "lefschetz-heat",
    "snake-lemma",
    "commutant",
    "full-suite",
)
GEOMETRIES = ("circle", "point", "abstract", "torus", "monopole")
FORMATS = ("json", "csv", "text")

#: Rank of the generic part of the abstract fixtures (p = q).
ABSTRACT_BULK = 3
#: Fourier cutoff of the torus fibre.
TORUS_CUTOFF = 2
MAX_CUTOFF = 64
MAX_GRID = 20000


class UsageError(ValueError):
    """Invalid configuration; ``field`` names the offending parameter."""

    def __init__(self, field_name, message):
        self.field = field_name
        super().__init__(f"{field_name}: {message}")


@dataclass(frozen=True)
class ExperimentConfig:
    """Parameters of one run.  Every field has a default.

    ``geometry=None`` picks ``circle`` for the closed-manifold experiments
    and ``abstract`` for the boundary ones.
    """

    experiment: str = "full-suite"
    geometry: str = None
    d: int = 1
    charge: int = 1
    cutoff: int = 8
    length: float = 0.5
    grid: int = 400
    tol_rank: float = 1e-8
    tol_consistency: float = 1e-7
    seed: int = 0
    trials: int = 200
    format: str = "json"

    def validate(self):
        if self.experiment not in EXPERIMENTS:
            raise UsageError("experiment", f"must be one of {', '.join(EXPERIMENTS)}")
        if self.geometry is not None and self.geometry not in GEOMETRIES:
            raise UsageError("geometry", f"must be one of {', '.join(GEOMETRIES)}")
        if self.format not in FORMATS:
            raise UsageError("format", f"must be one of {', '.join(FORMATS)}")
        if not 1 <= self.cutoff <= MAX_CUTOFF:
            raise UsageError("cutoff", f"must lie in [1, {MAX_CUTOFF}]")
        if not (np.isfinite(self.length) and 0 < self.length <= 10):
            raise UsageError("length", "must lie in (0, 10]")
        if not 50 <= self.grid <= MAX_GRID:
            raise UsageError("grid", f"must lie in [50, {MAX_GRID}]")
        if not 0 < self.tol_rank < 1:
            raise UsageError("tol_rank", "must lie in (0, 1)")
        if not 0 < self.tol_consistency < 1:
            raise UsageError("tol_consistency", "must lie in (0, 1)")
        if abs(self.d) > 10:
            raise UsageError("d", "must lie in [-10, 10]")
        if abs(self.charge) > 6:
            raise UsageError("charge", "must lie in [-6, 6]")
        if self.seed < 0:
            raise UsageError("seed", "must be nonnegative")
        if not 1 <= self.trials <= 10000:
            raise UsageError("trials", "must lie in [1, 10000]")
        if self.experiment in ("theorem-b", "hw-equivalence") and self.geometry == "circle":
            raise UsageError("geometry", "boundary experiments need an even-dimensional fibre, not 'circle'")
        return self


@dataclass(frozen=True)
class VerificationRecord:
    experiment: str
    anchor: str
    lhs: object
    rhs: object
    match: bool
    diagnostics: dict = field(default_factory=dict)
    seed: int = 0
    version: str = __version__


FIELDS = ("experiment", "anchor", "lhs", "rhs", "match", "diagnostics", "seed", "version")


def fibre_model(geometry, cfg):
    """Even-dimensional factor Y selected by ``geometry``."""
    if geometry == "point":
        return point_model()
    if geometry == "abstract":
        return abstract_even_model(ABSTRACT_BULK, ABSTRACT_BULK, cfg.d, cfg.seed)
    if geometry == "torus":
        return torus_flat_model(TORUS_CUTOFF)
    if geometry == "monopole":
        return sphere_monopole_model(cfg.charge, abs(cfg.charge) + 2)
    raise UsageError("geometry", f"{geometry!r} is not an even-dimensional fibre")


def closed_model(geometry, cfg, cutoff=None):
    K = cfg.cutoff if cutoff is None else cutoff
    if geometry == "circle":
        return circle_dirac(K)
    return product_circle(fibre_model(geometry, cfg), K)


def _index_diag(rep):
    return {
        "dim_ker": rep.dim_ker,
        "dim_coker": rep.dim_coker,
        "sigma_min_nonzero": rep.sigma_min_nonzero,
        "threshold": rep.threshold_used,
    }


def _theorem_a(cfg, geometry):
    model = closed_model(geometry, cfg)
    with stage(f"theorem-a:{geometry}"):
        rep = verify_theorem_a(model, cfg.tol_rank)
    diag = {"geometry": model.describe(), **_index_diag(rep.lhs), "lefschetz_exact": rep.lefschetz_exact}
    for t, v in rep.lefschetz_heat.items():
        diag[f"heat_t{t:g}"] = v
    return [VerificationRecord("theorem-a", "lefschetz-fixed-point", rep.lhs.index, rep.rhs_total,
                               rep.match, diag, cfg.seed)]


def _lefschetz_heat(cfg, geometry):
    model = closed_model(geometry, cfg)
    with stage(f"lefschetz-heat:{geometry}"):
        lift = build_lift(model, 1)
        index = chiral_index(model, split_spinors(lift), cfg.tol_rank).index
        exact = lefschetz_number(model, lift, "exact", tol_rank=cfg.tol_rank)
        heat = {t: lefschetz_number(model, lift, "heat", t=t) for t in HEAT_TIMES}
    label = model.describe()
    out = [VerificationRecord("lefschetz-heat", "lefschetz-doubling", exact, 2 * index,
                              exact == 2 * index, {"geometry": label}, cfg.seed)]
    for t, v in heat.items():
        out.append(VerificationRecord("lefschetz-heat", "heat-localization", v, 2 * index,
                                      abs(v - 2 * index) < cfg.tol_consistency,
                                      {"geometry": label, "t": t, "abs_error": abs(v - 2 * index)}, cfg.seed))
    return out


def _theorem_b(cfg, geometry, patterns=("+-", "-+", "++", "--")):
    Y = fibre_model(geometry, cfg)
    out = []
    for pat in patterns:
        prob = cylinder_problem(Y, pat[0], pat[1], cfg.length)
        with stage(f"theorem-b:{Y.label}:{pat}"):
            rep = verify_theorem_b(prob, cfg.tol_rank)
            fd = boundary_index_fd(prob, cfg.grid, cfg.tol_rank)
        diag = {
            "fibre": Y.label,
            "epsilon": pat,
            "length": cfg.length,
            **_index_diag(rep.lhs),
            "rhs_plus_sum": rep.rhs_plus_sum,
            "cobordism": rep.diagnostics["cobordism"],
            "max_exponent": rep.diagnostics["max_exponent"],
        }
        out.append(VerificationRecord("theorem-b", "mixed-boundary-index", rep.lhs.index, rep.rhs_minus_sum,
                                      rep.lhs.index == rep.rhs_minus_sum == rep.rhs_plus_sum, diag, cfg.seed))
        fd_diag = {"fibre": Y.label, "epsilon": pat, "grid": cfg.grid, **_index_diag(fd)}
        out.append(VerificationRecord("theorem-b", "finite-difference-witness", fd.index, rep.lhs.index,
                                      (fd.dim_ker, fd.dim_coker) == (rep.lhs.dim_ker, rep.lhs.dim_coker),
                                      fd_diag, cfg.seed))
    return out


def _hw_equivalence(cfg, geometry):
    Y = fibre_model(geometry, cfg)
    with stage(f"hw-equivalence:{Y.label}"):
        twisted, bdry, equal = hw_equivalence_check(Y, cfg.cutoff, cfg.tol_rank, cfg.length)
        idx = analytic_index(Y, cfg.tol_rank)
    return [VerificationRecord("hw-equivalence", "reflection-boundary-equivalence", twisted, bdry,
                               bool(equal), {"fibre": Y.label, "index_fibre": idx}, cfg.seed)]


def _snake_lemma(cfg):
    out = []
    for trial in range(cfg.trials):
        s = cfg.seed + trial
        dims = random_dimension_profile(s)
        with stage(f"snake-lemma:trial{trial}"):
            diagram = random_exact_diagram(dims, s)
            i_mid, i_left, i_right, holds = snake_additivity_check(diagram, cfg.tol_rank)
            les = long_exact_sequence(diagram, cfg.tol_rank)
        diag = {"dims": list(dims), "kernel_cokernel_dims": les["dims"], "sequence_exact": les["exact"]}
        out.append(VerificationRecord("snake-lemma", "index-additivity", i_mid, i_left + i_right,
                                      bool(holds), diag, s))
    return out


def _commutant(cfg):
    K = cfg.cutoff
    out = []
    with stage("commutant"):
        one = circle_dirac(K)
        two = disjoint_union(circle_dirac(K), circle_dirac(K))
        for label, model, expected in (("circle", one, 1), ("two-circles", two, 2)):
            dim = commutant_dimension(model.matrix, multiplication_operators(model), cfg.tol_rank)
            out.append(VerificationRecord("commutant", "commutant-scalars", dim, expected, dim == expected,
                                          {"model": label, "cutoff": K}, cfg.seed))
        for signs in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
            plus, flipped = build_lift(two, 1).matrix, build_lift(two, signs).matrix
            ratios = []
            for sl in two.component_slices():
                block = np.ix_(sl, sl)
                ratios.append(_global_ratio(flipped[block], plus[block]))
            out.append(VerificationRecord("commutant", "lift-sign-covariance", ratios, list(signs),
                                          ratios == list(signs), {"model": "two-circles", "cutoff": K},
                                          cfg.seed))
    return out


def _global_ratio(a, b, tol=1e-12):
    """``s`` in {+1, -1} with a = s * b, or 0 if there is none."""
    for s in (1, -1):
        if np.abs(a - s * b).max(initial=0.0) <= tol:
            return s
    return 0


def _full_suite(cfg):
    out = []
    fixtures = [("circle", {})]
    fixtures += [("abstract", {"d": d}) for d in range(-3, 4)]
    fixtures += [("torus", {})]
    fixtures += [("monopole", {"charge": q}) for q in range(-2, 3)]
    for geometry, over in fixtures:
        out += _theorem_a(_with(cfg, **over), geometry)
    out += _lefschetz_heat(cfg, "circle")
    for d in range(-3, 4):
        out += _theorem_b(_with(cfg, d=d), "abstract")
    out += _theorem_b(cfg, "point")
    for geometry, over in fixtures[1:]:
        out += _hw_equivalence(_with(cfg, **over), geometry)
    out += _commutant(cfg)
    out += _snake_lemma(cfg)
    return out


def _with(cfg, **changes):
    return ExperimentConfig(**{**cfg.__dict__, **changes})


def run_experiment(cfg):
    """Run the configured experiment; records come back in a fixed order."""
    cfg.validate()
    exp = cfg.experiment
    if exp == "full-suite":
        return _full_suite(cfg)
    if exp == "snake-lemma":
        return _snake_lemma(cfg)
    if exp == "commutant":
        return _commutant(cfg)
    closed = cfg.geometry or "circle"
    fibre = cfg.geometry or "abstract"
    if exp == "theorem-a":
        return _theorem_a(cfg, closed)
    if exp == "lefschetz-heat":
        return _lefschetz_heat(cfg, closed)
    if exp == "theorem-b":
        return _theorem_b(cfg, fibre)
    return _hw_equivalence(cfg, fibre)


def as_plain(value):
    """Convert a record value to JSON-ready Python objects.

    Integral fractions become ints, other fractions ``"p/q"`` strings.
    """
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    if isinstance(value, dict):
        return {str(k): as_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [as_plain(v) for v in value]
    return value
