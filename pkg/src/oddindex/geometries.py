"""Finite spectral models of Dirac operators.

Closed models use Fourier or angular-momentum truncations, which keep the
mode-by-mode block structure exact: no index ever depends on the cutoff.
"""

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.linalg as sla

from .errors import ConstructionError, SizeError, UnsupportedGeometryError
from .linop import DEFAULT_TOL_RANK, numerical_index

MAX_MATRIX_DIM = 20000


@dataclass(frozen=True, eq=False)
class EvenModel:
    """Graded self-adjoint operator D_Y = [[0, A^*], [A, 0]] on S+ (+) S-.

    ``A`` maps the ``dim_plus``-dimensional positive block to the
    ``dim_minus``-dimensional negative block.  ``expected_index`` records
    the index a construction was designed to have, if any.
    """

    dim_plus: int
    dim_minus: int
    A: np.ndarray
    label: str
    expected_index: int = None

    def __post_init__(self):
        if self.A.shape != (self.dim_minus, self.dim_plus):
            raise SizeError(
                f"chiral block has shape {self.A.shape}, "
                f"expected {(self.dim_minus, self.dim_plus)}"
            )

    @property
    def dim(self):
        return self.dim_plus + self.dim_minus

    @property
    def dirac(self):
        p, m = self.dim_plus, self.dim_minus
        D = np.zeros((p + m, p + m), dtype=complex)
        D[p:, :p] = self.A
        D[:p, p:] = self.A.conj().T
        return D

    @property
    def grading(self):
        return np.diag(np.r_[np.ones(self.dim_plus), -np.ones(self.dim_minus)]).astype(complex)

    def describe(self):
        return {"label": self.label, "dim_plus": self.dim_plus, "dim_minus": self.dim_minus}


@dataclass(frozen=True, eq=False)
class DiracModel:
    """Truncated self-adjoint Dirac operator with basis metadata.

    ``basis[i]`` is a ``(component, k, fibre_index)`` label for row ``i``.
    Disjoint unions keep their summands in ``parts``.
    """

    matrix: np.ndarray
    basis: tuple
    geometry: str
    components: int = 1
    fiber: EvenModel = None
    cutoff: int = None
    circumference: float = 1.0
    parts: tuple = field(default=())

    def __post_init__(self):
        n = self.matrix.shape[0]
        if self.matrix.shape != (n, n) or len(self.basis) != n:
            raise SizeError("basis labels must biject with matrix rows")
        if n and np.abs(self.matrix - self.matrix.conj().T).max() > 1e-10 * max(1.0, np.abs(self.matrix).max()):
            raise ConstructionError("Dirac matrix is not self-adjoint")

    @property
    def dim(self):
        return self.matrix.shape[0]

    @property
    def fiber_dim(self):
        return 1 if self.fiber is None else self.fiber.dim

    def component_slices(self):
        """Row index arrays, one per connected component of the manifold."""
        comp = np.array([b[0] for b in self.basis])
        return [np.flatnonzero(comp == c) for c in range(self.components)]

    def describe(self):
        d = {"geometry": self.geometry, "components": self.components, "dim": self.dim}
        if self.cutoff is not None:
            d["cutoff"] = self.cutoff
        if self.fiber is not None:
            d["fiber"] = self.fiber.label
        if self.parts:
            d["parts"] = [p.describe() for p in self.parts]
        return d


def _modes(K):
    if not isinstance(K, (int, np.integer)) or K < 1:
        raise SizeError(f"cutoff must be a positive integer, got {K!r}")
    return np.arange(-K, K + 1)


def point_model():
    """The even factor of a point: S+ = C, S- = 0, index 1."""
    return EvenModel(1, 0, np.zeros((0, 1), dtype=complex), "point", expected_index=1)


def circle_dirac(K, circumference=1.0):
    """i d/dx on R/(circumference Z), on Fourier modes |k| <= K.

    The mode exp(2 pi i k x / circumference) has eigenvalue
    -2 pi k / circumference.
    """
    ks = _modes(K)
    matrix = np.diag(-2 * np.pi * ks / circumference).astype(complex)
    basis = tuple((0, int(k), 0) for k in ks)
    return DiracModel(matrix, basis, "circle", 1, None, int(K), circumference)


def abstract_even_model(p, q, d, seed):
    """Random graded model with index exactly ``d``.

    Sizes are ``dim_plus = p + max(d, 0)`` and ``dim_minus = q + max(-d, 0)``;
    since a finite chiral block has index ``dim_plus - dim_minus``, only
    ``p == q`` realises index ``d``.
    """
    if p < 0 or q < 0:
        raise SizeError("p and q must be nonnegative")
    if p != q:
        raise ConstructionError(f"index {d} needs p == q, got p={p}, q={q}")
    dp, dm = p + max(d, 0), q + max(-d, 0)
    rng = np.random.default_rng(seed)
    for _ in range(2):
        A = (rng.standard_normal((dm, dp)) + 1j * rng.standard_normal((dm, dp))) / np.sqrt(2)
        try:
            rep = numerical_index(A)
        except Exception:
            continue
        if rep.dim_ker == max(dp - dm, 0) and rep.dim_coker == max(dm - dp, 0):
            return EvenModel(dp, dm, A, f"abstract(p={p},q={q},d={d},seed={seed})", expected_index=d)
    raise ConstructionError("random chiral block was rank deficient twice")


def torus_flat_model(K):
    """Flat square torus, chiral block 2 pi (k1 + i k2) on modes |k_i| <= K."""
    ks = _modes(K)
    k1, k2 = np.meshgrid(ks, ks, indexing="ij")
    A = np.diag(2 * np.pi * (k1.ravel() + 1j * k2.ravel()))
    n = A.shape[0]
    return EvenModel(n, n, A, f"torus_flat(K={K})", expected_index=0)


def _monopole_levels(two_s, L):
    """Twice the angular momenta j >= |s| with j <= L + 1/2."""
    j2 = abs(two_s)
    out = []
    while Fraction(j2, 2) <= L + Fraction(1, 2):
        out.append(j2)
        j2 += 2
    return out


def sphere_monopole_model(q, L):
    """Dirac operator on the round S^2 coupled to a charge-``q`` monopole.

    Positive spinors are spin-weighted harmonics of weight s = (q - 1)/2,
    negative ones have weight s + 1, and the chiral block is the raising
    operator eth, which sends (j, m) to (j, m) with coefficient
    sqrt((j - s)(j + s + 1)).  Levels run up to j <= L + 1/2 in both
    chiralities, so truncation never creates spurious zero modes.
    """
    if not isinstance(L, (int, np.integer)) or L < abs(q) + 1:
        raise SizeError(f"angular cutoff L must be >= |q| + 1 = {abs(q) + 1}, got {L!r}")
    two_s = q - 1
    plus = [(j2, m2) for j2 in _monopole_levels(two_s, L) for m2 in range(-j2, j2 + 1, 2)]
    minus = [(j2, m2) for j2 in _monopole_levels(two_s + 2, L) for m2 in range(-j2, j2 + 1, 2)]
    where = {lab: i for i, lab in enumerate(minus)}
    A = np.zeros((len(minus), len(plus)), dtype=complex)
    for col, (j2, m2) in enumerate(plus):
        row = where.get((j2, m2))
        if row is not None:
            # (j - s)(j + s + 1) in half-units
            A[row, col] = np.sqrt((j2 - two_s) * (j2 + two_s + 2) / 4.0)
    return EvenModel(len(plus), len(minus), A, f"sphere_monopole(q={q},L={L})", expected_index=q)


def product_circle(Y, K, circumference=1.0):
    """D_X = i Gamma_Y d/dx + D_Y on S^1 x Y.

    Rows are ordered mode-major: mode k = -K..K outer, fibre index inner.
    The block on mode k is -2 pi k / circumference * Gamma_Y + D_Y.
    """
    ks = _modes(K)
    f = Y.dim
    n = len(ks) * f
    if n > MAX_MATRIX_DIM:
        raise SizeError(f"product model of dimension {n} exceeds MAX_MATRIX_DIM")
    G, DY = Y.grading, Y.dirac
    blocks = [-2 * np.pi * k / circumference * G + DY for k in ks]
    matrix = sla.block_diag(*blocks) if blocks else np.zeros((0, 0), complex)
    basis = tuple((0, int(k), a) for k in ks for a in range(f))
    return DiracModel(matrix, basis, "product-circle", 1, Y, int(K), circumference)


def disjoint_union(*models):
    """Block-diagonal Dirac operator on the disjoint union of closed models."""
    flat = []
    for m in models:
        flat.extend(m.parts if m.parts else [m])
    matrix = sla.block_diag(*[m.matrix for m in flat])
    basis = []
    offset = 0
    for m in flat:
        basis.extend((c + offset, k, a) for c, k, a in m.basis)
        offset += m.components
    return DiracModel(matrix, tuple(basis), "disjoint-union", offset, parts=tuple(flat))


def multiplication_operators(model):
    """Basis of bundle maps, as matrices on the truncated spectral space.

    A bundle map is fixed by its endomorphism value at each of the
    ``2K + 1`` collocation points ``x_p = p / (2K + 1)`` of each circle;
    the discrete Fourier transform moves it to the mode basis.  For a
    product model the value lies in End(fibre), constant along Y.
    """
    if model.parts:
        out = []
        offset = 0
        n = model.dim
        for part in model.parts:
            for op in multiplication_operators(part):
                big = np.zeros((n, n), dtype=complex)
                big[offset : offset + part.dim, offset : offset + part.dim] = op
                out.append(big)
            offset += part.dim
        return out
    if model.geometry not in ("circle", "product-circle"):
        raise UnsupportedGeometryError(f"no collocation structure for {model.geometry!r}")
    ks = _modes(model.cutoff)
    npts = len(ks)
    xs = np.arange(npts) / npts
    F = np.exp(-2j * np.pi * np.outer(ks, xs)) / np.sqrt(npts)
    f = model.fiber_dim
    out = []
    for p in range(npts):
        scalar = np.outer(F[:, p], F[:, p].conj())
        for a in range(f):
            for b in range(f):
                E = np.zeros((f, f))
                E[a, b] = 1.0
                out.append(np.kron(scalar, E))
    return out


def transfer_generator(Y):
    """Hermitian generator i Gamma_Y D_Y of the cylinder's zero-mode ODE."""
    return 1j * Y.grading @ Y.dirac


def interval_transfer(Y, x):
    """exp(x i Gamma_Y D_Y): carries solutions of D psi = 0 from 0 to x."""
    w, V = np.linalg.eigh(transfer_generator(Y))
    return (V * np.exp(x * w)) @ V.conj().T


def analytic_index(Y, tol_rank=DEFAULT_TOL_RANK):
    """index(A: S+ -> S-), checked against the constructed value if one exists."""
    rep = numerical_index(Y.A, tol_rank)
    if Y.expected_index is not None and rep.index != Y.expected_index:
        raise ConstructionError(
            f"{Y.label}: computed index {rep.index} != constructed {Y.expected_index}"
        )
    return rep.index
