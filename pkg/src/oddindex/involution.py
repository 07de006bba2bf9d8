"""Reflection lifts on circle-type models and the fixed-point index formula.

The reflection x -> -x acts on Fourier modes by k -> -k.  On S^1 x Y it is
lifted to spinors as (lift psi)_k = sign * Gamma_Y psi_{-k}, which
anticommutes with D_X = i Gamma_Y d/dx + D_Y and squares to one.
"""

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.sparse as sp

from .errors import (
    ConsistencyError,
    ConventionError,
    LiftInconsistencyError,
    SplittingConsistencyError,
    UnsupportedGeometryError,
    stage,
)
from .geometries import analytic_index, point_model
from .linop import (
    DEFAULT_TOL_RANK,
    block_components,
    heat_trace,
    hermitian_kernel_basis,
    numerical_index,
)

LIFT_TOL = 1e-10
EIGEN_TOL = 1e-8
HEAT_TOL = 1e-7
HEAT_TIMES = (0.1, 1.0, 10.0)

_REFLECTABLE = ("circle", "product-circle")


@dataclass(frozen=True, eq=False)
class InvolutionLift:
    """Matrix of the lifted involution on the truncated spinor space.

    ``permutation[i]`` is the row that basis vector ``i`` is carried to
    (mode k -> -k, fibre index fixed).  ``sign`` holds one entry per
    component, or ``None`` where a normalised lift matches neither sign
    of the canonical one.
    """

    matrix: np.ndarray
    permutation: np.ndarray
    fiber_factor: tuple
    sign: tuple


@dataclass(frozen=True, eq=False)
class SplitSpaces:
    basis_plus: np.ndarray
    basis_minus: np.ndarray

    def swapped(self):
        return SplitSpaces(self.basis_minus, self.basis_plus)


@dataclass(frozen=True)
class FixedComponent:
    label: str
    r: int
    index_DF: int
    contribution: Fraction


@dataclass(frozen=True, eq=False)
class TheoremAReport:
    lhs: object
    rhs_components: tuple
    rhs_total: Fraction
    match: bool
    lefschetz_exact: float = None
    lefschetz_heat: dict = field(default_factory=dict)


def _parts(model):
    parts = model.parts if model.parts else (model,)
    for p in parts:
        if p.geometry not in _REFLECTABLE:
            raise UnsupportedGeometryError(
                f"geometry {p.geometry!r} has no reflection symmetry in this package"
            )
    return parts


def _signs(sign, ncomp):
    if np.isscalar(sign):
        signs = (int(sign),) * ncomp
    else:
        signs = tuple(int(s) for s in sign)
    if len(signs) != ncomp or any(s not in (1, -1) for s in signs):
        raise ValueError(f"need {ncomp} signs in {{+1, -1}}, got {sign!r}")
    return signs


def _sparse_max(M):
    M = sp.csr_matrix(M)
    return float(np.abs(M.data).max()) if M.nnz else 0.0


def _check_lift(matrix, D):
    L, Ds = sp.csr_matrix(matrix), sp.csr_matrix(D)
    sq = _sparse_max(L @ L - sp.identity(L.shape[0]))
    if sq > LIFT_TOL:
        raise LiftInconsistencyError(f"lift does not square to the identity (residual {sq:.2e})")
    anti = _sparse_max(L @ Ds + Ds @ L)
    if anti > LIFT_TOL * max(1.0, np.abs(D).max(initial=0.0)):
        raise LiftInconsistencyError(f"lift does not anticommute with D (residual {anti:.2e})")


def build_lift(model, sign=1):
    """Lift of the reflection x -> -x acting by ``sign * Gamma_Y`` on fibres.

    ``sign`` is a scalar or one value per component.
    """
    parts = _parts(model)
    signs = _signs(sign, model.components)
    where = {lab: i for i, lab in enumerate(model.basis)}
    n = model.dim
    matrix = np.zeros((n, n), dtype=complex)
    perm = np.empty(n, dtype=int)
    factors = []
    for part in parts:
        fiber = part.fiber if part.fiber is not None else point_model()
        factors.append(fiber.grading)
    for i, (c, k, a) in enumerate(model.basis):
        j = where[(c, -k, a)]
        perm[i] = j
    # rows of mode -k, columns of mode k: (lift psi)_{-k} = s Gamma psi_k
    for c, fac in enumerate(factors):
        f = fac.shape[0]
        rows = [i for i, b in enumerate(model.basis) if b[0] == c]
        for start in range(0, len(rows), f):
            cols = rows[start : start + f]
            targets = perm[cols]
            matrix[np.ix_(targets, cols)] = signs[c] * fac
    _check_lift(matrix, model.matrix)
    return InvolutionLift(matrix, perm, tuple(factors), signs)


def normalize_lift(raw, model=None, tol=1e-8):
    """Rescale a candidate lift whose square is a scalar on each component.

    Each component block is divided by the principal square root of that
    scalar.  When ``model`` supports reflections the result's per-component
    sign relative to :func:`build_lift` is recorded.
    """
    raw = np.asarray(raw, dtype=complex)
    n = raw.shape[0]
    slices = model.component_slices() if model is not None else [np.arange(n)]
    sq = raw @ raw
    scaled = raw.copy()
    for idx in slices:
        block = sq[np.ix_(idx, idx)]
        c = np.trace(block) / len(idx)
        resid = np.abs(block - c * np.eye(len(idx))).max()
        if abs(c) < tol or resid > tol * max(1.0, abs(c)):
            raise LiftInconsistencyError("square of candidate lift is not a nonzero scalar on a component")
        scaled[idx, :] /= np.sqrt(c)
    if np.abs(scaled @ scaled - np.eye(n)).max() > tol:
        raise LiftInconsistencyError("candidate lift mixes components")

    perm = np.arange(n)
    factors = ()
    signs = (None,) * len(slices)
    if model is not None:
        try:
            ref = build_lift(model, 1)
        except UnsupportedGeometryError:
            ref = None
        if ref is not None:
            perm, factors = ref.permutation, ref.fiber_factor
            found = []
            for idx in slices:
                a, b = scaled[np.ix_(idx, idx)], ref.matrix[np.ix_(idx, idx)]
                if np.allclose(a, b, atol=tol):
                    found.append(1)
                elif np.allclose(a, -b, atol=tol):
                    found.append(-1)
                else:
                    found.append(None)
            signs = tuple(found)
    return InvolutionLift(scaled, perm, factors, signs)


def split_spinors(lift):
    """Orthonormal bases of the +1 and -1 eigenspaces of the lift."""
    M = lift.matrix
    n = M.shape[0]
    plus, minus = [], []
    for idx in block_components(M):
        block = M[np.ix_(idx, idx)]
        if not np.any(block.imag):
            w, V = np.linalg.eigh(block.real)
        else:
            w, V = np.linalg.eigh(block)
        off = np.minimum(np.abs(w - 1), np.abs(w + 1))
        if off.size and off.max() > EIGEN_TOL:
            raise LiftInconsistencyError(f"lift eigenvalue off +-1 by {off.max():.2e}")
        for j in range(len(w)):
            v = np.zeros(n, dtype=complex)
            v[idx] = V[:, j]
            (plus if w[j] > 0 else minus).append(v)
    as_cols = lambda vs: np.column_stack(vs) if vs else np.zeros((n, 0), dtype=complex)
    return SplitSpaces(as_cols(plus), as_cols(minus))


def chiral_index(model, split, tol_rank=DEFAULT_TOL_RANK, tol_residual=LIFT_TOL):
    """Index of D compressed to span(plus) -> span(minus)."""
    D = model.matrix
    Bm = sp.csr_matrix(split.basis_minus)
    image = sp.csr_matrix(D) @ split.basis_plus
    compressed = Bm.conj().T @ image
    resid = np.abs(image - Bm @ compressed).max(initial=0.0)
    if resid > tol_residual * max(1.0, np.abs(D).max(initial=0.0)):
        raise SplittingConsistencyError(
            f"D does not map the +1 eigenspace into the -1 eigenspace (residual {resid:.2e})"
        )
    return numerical_index(compressed, tol_rank)


def lefschetz_endomorphism(lift):
    """The pair (+lift on the domain copy, -lift on the codomain copy)."""
    return lift.matrix, -lift.matrix


def lefschetz_number(model, lift, method="exact", t=1.0, tol_rank=DEFAULT_TOL_RANK):
    """Trace of the graded endomorphism on kernel minus trace on cokernel.

    ``method="exact"`` returns an integer: the lift restricted to a
    numerically extracted kernel of D is diagonalised and its +1 and -1
    eigenvalues are counted (the cokernel of a self-adjoint D is identified
    with its kernel);
    ``method="heat"`` uses Tr(theta_dom e^{-tD^2}) - Tr(theta_cod e^{-tD^2});
    ``method="both"`` computes the exact value and checks the heat value at
    ``t`` (a number or a sequence of times) against it.
    """
    theta_dom, theta_cod = lefschetz_endomorphism(lift)
    D = model.matrix
    if method == "heat":
        return heat_trace(D, theta_dom, t) - heat_trace(D, theta_cod, t)
    if method not in ("exact", "both"):
        raise ValueError(f"unknown method {method!r}")
    # the lift preserves ker D and is an involution there, so each trace is
    # (# of +1 eigenvalues) - (# of -1 eigenvalues) on the kernel
    K = hermitian_kernel_basis(D, tol_rank)
    value = 0
    for theta in (theta_dom, -theta_cod):
        C = K.conj().T @ theta @ K
        if np.abs(C - C.conj().T).max(initial=0.0) > EIGEN_TOL:
            raise ConventionError("graded lift is not self-adjoint on ker D")
        w = np.linalg.eigvalsh(C)
        if w.size and np.minimum(np.abs(w - 1), np.abs(w + 1)).max() > EIGEN_TOL:
            raise LiftInconsistencyError("lift does not restrict to an involution of ker D")
        value += int(np.sum(w > 0)) - int(np.sum(w < 0))
    if method == "both":
        for tt in np.atleast_1d(t):
            heat = heat_trace(D, theta_dom, tt) - heat_trace(D, theta_cod, tt)
            if abs(heat - value) >= HEAT_TOL:
                raise ConsistencyError(
                    f"heat Lefschetz number {heat!r} at t={tt} disagrees with exact {value!r}"
                )
    return value


def fixed_point_rhs(model_or_components, sign=1):
    """Fixed-point side: sum over fixed components of index D_F / 2^(r+1).

    Accepts a reflectable :class:`DiracModel` (each circle contributes the
    fixed slices x = 0 and x = 1/2, with r = 0 and F = Y, oriented by the
    lift sign) or an explicit list of ``(index_DF, r)`` pairs.  Returns
    ``(components, total)`` with exact rational arithmetic.
    """
    comps = []
    if isinstance(model_or_components, (list, tuple)):
        for i, (index_df, r) in enumerate(model_or_components):
            if r < 0:
                raise ValueError("codimension parameter r must be nonnegative")
            comps.append(FixedComponent(f"F{i}", int(r), int(index_df), Fraction(int(index_df), 2 ** (r + 1))))
    elif hasattr(model_or_components, "geometry"):
        model = model_or_components
        parts = _parts(model)
        signs = _signs(sign, model.components)
        for c, part in enumerate(parts):
            fiber = part.fiber if part.fiber is not None else point_model()
            idx = signs[c] * analytic_index(fiber)
            for where in ("0", "1/2"):
                comps.append(FixedComponent(f"c{c}:x={where}:{fiber.label}", 0, idx, Fraction(idx, 2)))
    else:
        raise UnsupportedGeometryError("need a DiracModel or an explicit (index_DF, r) list")
    total = sum((c.contribution for c in comps), Fraction(0))
    return tuple(comps), total


def verify_theorem_a(model, tol_rank=DEFAULT_TOL_RANK, sign=1, heat_times=HEAT_TIMES):
    """Full pipeline: lift, split, chiral index, fixed-point sum, Lefschetz checks."""
    with stage("lift"):
        lift = build_lift(model, sign)
    with stage("split"):
        split = split_spinors(lift)
    with stage("chiral_index"):
        lhs = chiral_index(model, split, tol_rank)
    with stage("fixed_point_rhs"):
        comps, total = fixed_point_rhs(model, sign)
    with stage("lefschetz"):
        exact = lefschetz_number(model, lift, "exact", tol_rank=tol_rank)
        if exact != 2 * lhs.index:
            raise ConsistencyError(f"Lefschetz number {exact} != 2 * index {lhs.index}")
        heat = {}
        for t in heat_times:
            heat[t] = lefschetz_number(model, lift, "heat", t=t)
            if abs(heat[t] - exact) >= HEAT_TOL:
                raise ConsistencyError(f"heat Lefschetz number at t={t} is {heat[t]!r}, exact {exact!r}")
    match = total.denominator == 1 and lhs.index == total
    return TheoremAReport(lhs, comps, total, bool(match), exact, heat)
