"""Independent reference computations used by the tests.

Nothing here calls into the package's rank logic.
"""

import numpy as np
import sympy
from sympy.polys.domains import QQ, ZZ
from sympy.polys.matrices import DomainMatrix


def exact_rank(M):
    """Rank of an integer (or Gaussian-integer) matrix in exact arithmetic."""
    M = np.asarray(M)
    if M.size == 0:
        return 0
    if np.iscomplexobj(M):
        entries = [[sympy.Integer(int(round(z.real))) + sympy.I * int(round(z.imag)) for z in row] for row in M]
        return sympy.Matrix(entries).rank()
    rows = [[ZZ(int(x)) for x in row] for row in M]
    return DomainMatrix(rows, M.shape, ZZ).convert_to(QQ).rank()


def exact_index(M):
    rows, cols = np.asarray(M).shape
    r = exact_rank(M)
    return (cols - r) - (rows - r)


def zero_modes_by_chirality(D, grading, tol=1e-9):
    """Count zero eigenvectors of a graded D with grading +1 and -1.

    Zero modes of an odd operator can be chosen homogeneous, so the
    grading restricted to the kernel is diagonalised directly.
    """
    w, V = np.linalg.eigh(D)
    K = V[:, np.abs(w) < tol * max(1.0, np.abs(w).max(initial=0.0))]
    g = np.linalg.eigvalsh(K.conj().T @ grading @ K)
    return int(np.sum(g > 0)), int(np.sum(g < 0))
