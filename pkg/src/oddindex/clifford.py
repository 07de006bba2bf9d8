"""Complex Clifford modules with c(e)^2 = -1 and skew-adjoint generators.

Generators are built by the Jordan-Wigner tensor recursion, so every entry is
one of 0, +-1, +-i and the construction is exact and deterministic.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ParityError, SizeError

#: Largest ambient dimension accepted by :func:`build_clifford_rep`
#: (spinor size 2**10 = 1024).
MAX_DIM = 20

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def _kron_all(factors):
    out = np.eye(1, dtype=complex)
    for f in factors:
        out = np.kron(out, f)
    return out


@dataclass(frozen=True, eq=False)
class CliffordRep:
    """Irreducible complex Clifford module of dimension ``dim``.

    ``generators[i]`` is the action c(e^{i+1}); ``volume`` is the product
    c(e^1)...c(e^n).
    """

    dim: int
    generators: tuple
    volume: np.ndarray

    @property
    def size(self):
        return self.volume.shape[0]

    @classmethod
    def point(cls):
        """The 0-dimensional module: one spinor of positive chirality."""
        return cls(0, (), np.eye(1, dtype=complex))


def build_clifford_rep(n):
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise SizeError(f"Clifford dimension must be a positive integer, got {n!r}")
    if n > MAX_DIM:
        raise SizeError(f"dimension {n} exceeds MAX_DIM={MAX_DIM}")
    m = n // 2
    gens = []
    for j in range(m):
        head = [_Z] * j
        tail = [_I2] * (m - j - 1)
        gens.append(1j * _kron_all(head + [_X] + tail))
        gens.append(1j * _kron_all(head + [_Y] + tail))
    if n % 2:
        gens.append(1j * _kron_all([_Z] * m))
    volume = np.eye(2**m, dtype=complex)
    for g in gens:
        volume = volume @ g
    for g in gens:
        g.setflags(write=False)
    volume.setflags(write=False)
    return CliffordRep(n, tuple(gens), volume)


def chirality(rep):
    """Grading operator i^m c(omega) for an even-dimensional module.

    Hermitian, squares to the identity and anticommutes with every generator.
    The point module gives the 1x1 identity.
    """
    if rep.dim % 2:
        raise ParityError(f"chirality needs even dimension, got {rep.dim}")
    m = rep.dim // 2
    return (1j**m) * rep.volume


def pin_lift_factor(r, rep, sign=1):
    """Fibre factor sign * i^{r+1} c(e^1)...c(e^{2r+1}) of the reflection lift.

    The first ``2r + 1`` generators are taken as the normal directions. The
    result squares to the identity, commutes with those normal generators and
    anticommutes with the remaining (tangential) ones.
    """
    if r < 0:
        raise SizeError(f"r must be nonnegative, got {r}")
    if 2 * r + 1 > rep.dim:
        raise SizeError(
            f"need {2 * r + 1} normal generators, module has only {rep.dim}"
        )
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    out = np.eye(rep.size, dtype=complex)
    for g in rep.generators[: 2 * r + 1]:
        out = out @ g
    return sign * (1j ** (r + 1)) * out


def anticommutator(a, b):
    return a @ b + b @ a


def check_rep(rep):
    """Return the largest violation of the module relations (0 for exact)."""
    n = rep.size
    ident = np.eye(n)
    worst = 0.0
    for i, gi in enumerate(rep.generators):
        worst = max(worst, np.abs(gi + gi.conj().T).max())
        for j, gj in enumerate(rep.generators):
            target = -2.0 * ident if i == j else 0.0
            worst = max(worst, np.abs(anticommutator(gi, gj) - target).max())
    return worst
