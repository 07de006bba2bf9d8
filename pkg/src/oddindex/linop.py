"""Finite-dimensional operator core.

Every index in the package is extracted here, from singular values, by one
thresholding rule: a singular value counts as nonzero when it exceeds
``tol_rank * max(1, sigma_max)``.  Values within a factor of 10 of the
threshold on either side make the rank ambiguous and raise
:class:`~oddindex.errors.GapAmbiguityError` instead of guessing.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components, reverse_cuthill_mckee

from .errors import (
    ConventionError,
    DiagramError,
    GapAmbiguityError,
    SizeError,
    SymmetryError,
)

DEFAULT_TOL_RANK = 1e-8
GAP_FACTOR = 10.0


@dataclass(frozen=True)
class IndexReport:
    dim_ker: int
    dim_coker: int
    index: int
    sigma_max: float
    sigma_min_nonzero: float
    threshold_used: float

    def __post_init__(self):
        if self.index != self.dim_ker - self.dim_coker:
            raise ValueError("index must equal dim_ker - dim_coker")

    def combine(self, other):
        """Report for the direct sum of the two operators."""
        nonzero = [s for s in (self.sigma_min_nonzero, other.sigma_min_nonzero) if s > 0]
        return IndexReport(
            self.dim_ker + other.dim_ker,
            self.dim_coker + other.dim_coker,
            self.index + other.index,
            max(self.sigma_max, other.sigma_max),
            min(nonzero) if nonzero else 0.0,
            max(self.threshold_used, other.threshold_used),
        )

    def as_dict(self):
        return {
            "dim_ker": self.dim_ker,
            "dim_coker": self.dim_coker,
            "index": self.index,
            "sigma_max": float(self.sigma_max),
            "sigma_min_nonzero": float(self.sigma_min_nonzero),
            "threshold_used": float(self.threshold_used),
        }


def _check_tol(tol_rank):
    if not 0.0 < tol_rank < 1.0:
        raise ValueError(f"tol_rank must lie in (0, 1), got {tol_rank}")


def rank_threshold(svals, tol_rank=DEFAULT_TOL_RANK):
    sigma_max = float(np.max(svals)) if len(svals) else 0.0
    return tol_rank * max(1.0, sigma_max)


def numerical_rank(svals, tol_rank=DEFAULT_TOL_RANK):
    """Rank from a list of singular values, raising on an ambiguous gap."""
    _check_tol(tol_rank)
    svals = np.asarray(svals, dtype=float)
    thr = rank_threshold(svals, tol_rank)
    close = svals[(svals > thr / GAP_FACTOR) & (svals < thr * GAP_FACTOR)]
    if close.size:
        raise GapAmbiguityError(np.sort(close), thr)
    return int(np.count_nonzero(svals > thr)), thr


def index_from_singular_values(svals, n_rows, n_cols, tol_rank=DEFAULT_TOL_RANK):
    """Build an :class:`IndexReport` for an ``n_rows x n_cols`` operator."""
    svals = np.asarray(svals, dtype=float)
    rank, thr = numerical_rank(svals, tol_rank)
    kept = svals[svals > thr]
    return IndexReport(
        dim_ker=n_cols - rank,
        dim_coker=n_rows - rank,
        index=n_cols - n_rows,
        sigma_max=float(svals.max()) if svals.size else 0.0,
        sigma_min_nonzero=float(kept.min()) if kept.size else 0.0,
        threshold_used=thr,
    )


def numerical_index(M, tol_rank=DEFAULT_TOL_RANK):
    """Kernel, cokernel and index of the linear map ``M`` (codomain x domain).

    The cokernel dimension is read off the same SVD as the kernel
    (codomain dimension minus rank).

    Examples
    --------
    >>> numerical_index(np.zeros((3, 5))).index
    2
    """
    M = np.asarray(M)
    if M.ndim != 2:
        raise SizeError("expected a 2-d matrix")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    n_rows, n_cols = M.shape
    svals = sla.svd(M, compute_uv=False) if M.size else np.zeros(0)
    return index_from_singular_values(svals, n_rows, n_cols, tol_rank)


def kernel_basis(M, tol_rank=DEFAULT_TOL_RANK):
    """Orthonormal basis (as columns) of the numerical kernel of ``M``."""
    M = np.asarray(M)
    n_rows, n_cols = M.shape
    if M.size == 0:
        return np.eye(n_cols, dtype=complex)
    _, s, vh = sla.svd(M, full_matrices=True)
    rank, _ = numerical_rank(s, tol_rank)
    return vh[rank:].conj().T


def is_hermitian(D, rtol=1e-10):
    D = np.asarray(D)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        return False
    scale = max(1.0, np.abs(D).max()) if D.size else 1.0
    return np.abs(D - D.conj().T).max(initial=0.0) <= rtol * scale


def block_components(*mats):
    """Index sets of the connected components of the joint sparsity pattern.

    Every matrix passed in is block diagonal with respect to the returned
    partition, so eigenproblems can be solved block by block.
    """
    n = mats[0].shape[0]
    pattern = np.zeros((n, n), dtype=bool)
    for M in mats:
        pattern |= np.asarray(M) != 0
    pattern |= pattern.T
    ncomp, labels = connected_components(sp.csr_matrix(pattern), directed=False)
    return [np.flatnonzero(labels == c) for c in range(ncomp)]


def hermitian_eigh_blocks(D):
    """Blockwise eigendecomposition of a Hermitian matrix.

    Yields ``(idx, eigenvalues, eigenvectors)`` per connected block.
    """
    for idx in block_components(D):
        block = D[np.ix_(idx, idx)]
        if np.isrealobj(block) or not np.any(block.imag):
            w, V = np.linalg.eigh(block.real)
        else:
            w, V = np.linalg.eigh(block)
        yield idx, w, V


def hermitian_kernel_basis(D, tol_rank=DEFAULT_TOL_RANK):
    """Kernel of a self-adjoint ``D`` via blockwise eigendecomposition.

    Uses the same thresholding as :func:`numerical_index`, with
    ``|eigenvalue|`` playing the role of the singular value.
    """
    D = np.asarray(D)
    if not is_hermitian(D):
        raise SymmetryError("operator is not self-adjoint")
    n = D.shape[0]
    parts = list(hermitian_eigh_blocks(D))
    allvals = np.concatenate([np.abs(w) for _, w, _ in parts]) if parts else np.zeros(0)
    numerical_rank(allvals, tol_rank)
    thr = rank_threshold(allvals, tol_rank)
    cols = []
    for idx, w, V in parts:
        for j in np.flatnonzero(np.abs(w) <= thr):
            v = np.zeros(n, dtype=complex)
            v[idx] = V[:, j]
            cols.append(v)
    if not cols:
        return np.zeros((n, 0), dtype=complex)
    return np.column_stack(cols)


def banded_singular_values(M):
    """Singular values of a sparse matrix through its Hermitian dilation.

    The dilation ``[[0, M], [M^*, 0]]`` is reordered by reverse Cuthill-McKee
    and handed to the banded Hermitian eigensolver; its nonnegative spectrum
    is the singular spectrum of ``M``.  Accuracy is absolute, of order
    machine epsilon times ``||M||``, the same as a dense SVD.
    """
    M = sp.csr_matrix(M)
    n_rows, n_cols = M.shape
    k = min(n_rows, n_cols)
    if k == 0:
        return np.zeros(0)
    H = sp.bmat([[None, M], [M.conj().T, None]], format="csr")
    perm = reverse_cuthill_mckee(H, symmetric_mode=True)
    Hp = H[perm][:, perm].tocoo()
    upper = Hp.row <= Hp.col
    rows, cols, vals = Hp.row[upper], Hp.col[upper], Hp.data[upper]
    u = int(np.max(cols - rows)) if vals.size else 0
    dtype = float if np.isrealobj(vals) else complex
    ab = np.zeros((u + 1, n_rows + n_cols), dtype=dtype)
    ab[u + rows - cols, cols] = vals
    w = sla.eig_banded(ab, lower=False, eigvals_only=True)
    return np.clip(np.sort(w)[::-1][:k], 0.0, None)


def heat_trace(D, theta, t):
    """Tr(theta exp(-t D^2)) computed from the spectrum of ``D``.

    Sums ``exp(-t lambda_j^2) <phi_j, theta phi_j>`` over an orthonormal
    eigenbasis.  Only the diagonal blocks of ``theta`` along the block
    structure of ``D`` contribute, so the eigenproblem is solved blockwise.
    """
    D = np.asarray(D)
    theta = np.asarray(theta)
    if not is_hermitian(D):
        raise SymmetryError("heat trace needs a self-adjoint operator")
    if t <= 0:
        raise ValueError(f"t must be positive, got {t}")
    if theta.shape != D.shape:
        raise SizeError("theta and D must have the same shape")
    total = 0.0 + 0.0j
    for idx, w, V in hermitian_eigh_blocks(D):
        th = theta[np.ix_(idx, idx)]
        expect = np.einsum("ij,ik,kj->j", V.conj(), th, V)
        total += np.sum(np.exp(-t * w**2) * expect)
    if abs(total.imag) > 1e-8:
        raise ConventionError(
            f"heat trace has imaginary part {total.imag:.3e}; theta is mis-built"
        )
    return float(total.real)


def commutant_dimension(D, structure=None, tol_rank=DEFAULT_TOL_RANK):
    """Dimension of {theta in B : D theta = theta D}.

    Parameters
    ----------
    D : (n, n) array
    structure : sequence of (n, n) arrays, optional
        A basis of the admissible subspace B (e.g. multiplication operators).
        ``None`` means B is every operator.
    """
    D = np.asarray(D, dtype=complex)
    n = D.shape[0]
    norm_d = np.linalg.norm(D, 2) if n else 0.0
    scale = max(norm_d, 1.0)
    if structure is None:
        ident = np.eye(n)
        # vec(D X - X D) = (I (x) D - D^T (x) I) vec(X), column-major vec
        C = np.kron(ident, D) - np.kron(D.T, ident)
        C = C / scale
    else:
        basis = [np.asarray(B, dtype=complex) for B in structure]
        if not basis:
            return 0
        cols = []
        for B in basis:
            nb = np.linalg.norm(B, 2)
            if nb == 0:
                raise ValueError("structure contains a zero operator")
            cols.append(((D @ B - B @ D) / (scale * nb)).ravel())
        C = np.column_stack(cols)
    return numerical_index(C, tol_rank).dim_ker


@dataclass(frozen=True, eq=False)
class ExactRowDiagram:
    """Two short exact rows 0 -> V' -> V -> V'' -> 0 over 0 -> W' -> W -> W'' -> 0.

    Matrices act on column vectors: ``inc_v`` is V' -> V, ``proj_v`` is
    V -> V'', and ``T_prime``, ``T``, ``T_dprime`` are the vertical maps.
    """

    T_prime: np.ndarray
    T: np.ndarray
    T_dprime: np.ndarray
    inc_v: np.ndarray
    proj_v: np.ndarray
    inc_w: np.ndarray
    proj_w: np.ndarray

    @property
    def dims(self):
        return (
            self.inc_v.shape[1],
            self.inc_v.shape[0],
            self.proj_v.shape[0],
            self.inc_w.shape[1],
            self.inc_w.shape[0],
            self.proj_w.shape[0],
        )

    def check(self, tol=1e-10, tol_rank=DEFAULT_TOL_RANK):
        """Raise :class:`DiagramError` naming the first failing row or square."""
        v1, v, v2, w1, w, w2 = self.dims
        shapes = {
            "T_prime": (self.T_prime.shape, (w1, v1)),
            "T": (self.T.shape, (w, v)),
            "T_dprime": (self.T_dprime.shape, (w2, v2)),
            "proj_v": (self.proj_v.shape[1], v),
            "proj_w": (self.proj_w.shape[1], w),
        }
        for name, (got, want) in shapes.items():
            if got != want:
                raise DiagramError(f"{name} has shape {got}, expected {want}")
        for row, inc, proj, a, b, c in (
            ("V-row", self.inc_v, self.proj_v, v1, v, v2),
            ("W-row", self.inc_w, self.proj_w, w1, w, w2),
        ):
            if a + c != b:
                raise DiagramError(f"{row}: dimensions {a} + {c} != {b}")
            comp = proj @ inc
            if comp.size and np.abs(comp).max() > tol * max(1.0, np.abs(inc).max() * np.abs(proj).max()):
                raise DiagramError(f"{row}: composition is not zero")
            if a and numerical_index(inc, tol_rank).dim_ker:
                raise DiagramError(f"{row}: inclusion is not injective")
            if c and numerical_index(proj, tol_rank).dim_coker:
                raise DiagramError(f"{row}: projection is not surjective")
        for name, lhs, rhs in (
            ("left square", self.T @ self.inc_v, self.inc_w @ self.T_prime),
            ("right square", self.proj_w @ self.T, self.T_dprime @ self.proj_v),
        ):
            if lhs.size:
                scale = max(1.0, np.abs(lhs).max(), np.abs(rhs).max())
                if np.abs(lhs - rhs).max() > tol * scale:
                    raise DiagramError(f"{name} does not commute")
        return True


def _unimodular(n, rng):
    """Random integer matrix with integer inverse (unit lower times unit upper)."""
    def tri(lower):
        mask = np.tril(np.ones((n, n), bool), -1) if lower else np.triu(np.ones((n, n), bool), 1)
        vals = rng.choice([-1, 0, 0, 0, 1], size=(n, n))
        return np.eye(n, dtype=np.int64) + np.where(mask, vals, 0)

    L, U = tri(True), tri(False)
    P = L @ U
    Pinv = np.rint(np.linalg.inv(U) @ np.linalg.inv(L)).astype(np.int64) if n else np.zeros((0, 0), np.int64)
    if n and not np.array_equal(P @ Pinv, np.eye(n, dtype=np.int64)):
        raise ArithmeticError("integer inverse lost precision")
    return P, Pinv


def _random_rank_int(rows, cols, rng):
    rank = int(rng.integers(0, min(rows, cols) + 1)) if min(rows, cols) else 0
    B = rng.integers(-2, 3, size=(rows, rank))
    C = rng.integers(-2, 3, size=(rank, cols))
    return (B @ C).astype(np.int64)


def random_exact_diagram(dims, seed):
    """Random integer diagram with exact rows, commuting by construction.

    ``dims = (dim V', dim V, dim V'', dim W', dim W, dim W'')``.  The middle
    map is block upper triangular in split coordinates and then conjugated
    by random unimodular changes of basis, so every matrix is integral.
    """
    dims = tuple(int(x) for x in dims)
    if len(dims) != 6 or min(dims) < 0:
        raise SizeError(f"need six nonnegative dimensions, got {dims}")
    v1, v, v2, w1, w, w2 = dims
    if v != v1 + v2 or w != w1 + w2:
        raise SizeError(f"inconsistent dimensions {dims}")
    rng = np.random.default_rng(seed)
    T1 = _random_rank_int(w1, v1, rng)
    T2 = _random_rank_int(w2, v2, rng)
    X = rng.integers(-2, 3, size=(w1, v2)).astype(np.int64)
    split = np.block([[T1, X], [np.zeros((w2, v1), np.int64), T2]]) if v and w else np.zeros((w, v), np.int64)
    P, Pinv = _unimodular(v, rng)
    Q, Qinv = _unimodular(w, rng)
    T = Q @ split @ Pinv
    return ExactRowDiagram(
        T_prime=T1,
        T=T,
        T_dprime=T2,
        inc_v=P[:, :v1],
        proj_v=Pinv[v1:, :],
        inc_w=Q[:, :w1],
        proj_w=Qinv[w1:, :],
    )


def random_dimension_profile(seed, max_total=40):
    """Six diagram dimensions with dim V + dim W <= ``max_total``.

    Each of V', V'', W', W'' gets a random share, possibly zero.
    """
    rng = np.random.default_rng(seed)
    total = int(rng.integers(0, max_total + 1))
    cuts = np.sort(rng.integers(0, total + 1, size=3))
    v1, v2, w1, w2 = np.diff(np.r_[0, cuts, total])
    return (int(v1), int(v1 + v2), int(v2), int(w1), int(w1 + w2), int(w2))


def snake_additivity_check(diag, tol_rank=DEFAULT_TOL_RANK):
    """Return ``(index T, index T', index T'', holds)`` for an exact-row diagram."""
    diag.check(tol_rank=tol_rank)
    i_mid = numerical_index(diag.T, tol_rank).index
    i_left = numerical_index(diag.T_prime, tol_rank).index
    i_right = numerical_index(diag.T_dprime, tol_rank).index
    return i_mid, i_left, i_right, i_mid == i_left + i_right


def _orth_complement_of_image(M, tol_rank):
    """Orthonormal basis of (im M)^perp; coordinates on the cokernel."""
    n_rows = M.shape[0]
    if M.size == 0:
        return np.eye(n_rows)
    u, s, _ = sla.svd(M, full_matrices=True)
    rank, _ = numerical_rank(s, tol_rank)
    return u[:, rank:]


def _map_rank(M, tol_rank):
    if M.size == 0:
        return 0
    return numerical_rank(sla.svd(M, compute_uv=False), tol_rank)[0]


def long_exact_sequence(diag, tol_rank=DEFAULT_TOL_RANK, tol=1e-8):
    """Build the six-term kernel/cokernel sequence of an exact-row diagram.

    Returns a dict with the six dimensions, the ranks of the five maps
    (including the connecting map Ker T'' -> Coker T') and ``exact``, which
    is true when the sequence is exact at every node.
    """
    diag.check(tol_rank=tol_rank)
    Tp, T, Tpp = (np.asarray(x, dtype=float) for x in (diag.T_prime, diag.T, diag.T_dprime))
    inc_v, proj_v = np.asarray(diag.inc_v, float), np.asarray(diag.proj_v, float)
    inc_w, proj_w = np.asarray(diag.inc_w, float), np.asarray(diag.proj_w, float)

    Kp, K, Kpp = (kernel_basis(x, tol_rank).real for x in (Tp, T, Tpp))
    Cp, C, Cpp = (_orth_complement_of_image(x, tol_rank) for x in (Tp, T, Tpp))

    a = K.T @ inc_v @ Kp
    b = Kpp.T @ proj_v @ K
    if Kpp.shape[1] and proj_v.size:
        lift = np.linalg.pinv(proj_v) @ Kpp
        image = T @ lift
        y = np.linalg.lstsq(inc_w, image, rcond=None)[0] if inc_w.size else np.zeros((0, Kpp.shape[1]))
        delta = Cp.T @ y
    else:
        delta = np.zeros((Cp.shape[1], Kpp.shape[1]))
    c = C.T @ inc_w @ Cp
    e = Cpp.T @ proj_w @ C

    maps = [a, b, delta, c, e]
    dims = [Kp.shape[1], K.shape[1], Kpp.shape[1], Cp.shape[1], C.shape[1], Cpp.shape[1]]
    ranks = [_map_rank(m, tol_rank) for m in maps]
    exact = ranks[0] == dims[0] and ranks[-1] == dims[-1]
    for node in range(1, 5):
        exact &= ranks[node - 1] + ranks[node] == dims[node]
    for first, second in zip(maps, maps[1:]):
        prod = second @ first
        if prod.size and np.abs(prod).max() > tol * max(1.0, np.abs(T).max(initial=0.0)):
            exact = False
    return {"dims": dims, "ranks": ranks, "exact": bool(exact)}
