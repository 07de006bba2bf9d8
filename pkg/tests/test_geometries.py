import numpy as np
import pytest
import scipy.linalg as sla

from oracles import exact_rank, zero_modes_by_chirality
from oddindex.errors import ConstructionError, SizeError, UnsupportedGeometryError
from oddindex.geometries import (
    DiracModel,
    EvenModel,
    abstract_even_model,
    analytic_index,
    circle_dirac,
    disjoint_union,
    interval_transfer,
    multiplication_operators,
    point_model,
    product_circle,
    sphere_monopole_model,
    torus_flat_model,
    transfer_generator,
)


def test_circle_small():
    M = circle_dirac(1)
    np.testing.assert_allclose(np.diag(M.matrix).real, [2 * np.pi, 0, -2 * np.pi])
    assert [b[1] for b in M.basis] == [-1, 0, 1]


@pytest.mark.parametrize("K", [1, 4, 8])
def test_circle_kernel_and_symmetry(K):
    w = np.linalg.eigvalsh(circle_dirac(K).matrix)
    assert np.sum(np.abs(w) < 1e-12) == 1
    np.testing.assert_allclose(np.sort(w), np.sort(-w))


def test_circle_matches_derivative_of_modes():
    # apply i d/dx to exp(2 pi i k x) on a grid
    x = np.linspace(0, 1, 7, endpoint=False)
    M = circle_dirac(3)
    for row, (_, k, _) in enumerate(M.basis):
        f = np.exp(2j * np.pi * k * x)
        np.testing.assert_allclose(1j * (2j * np.pi * k) * f, M.matrix[row, row] * f)


def test_model_validation():
    with pytest.raises(SizeError):
        DiracModel(np.eye(2), ((0, 0, 0),), "circle")
    with pytest.raises(ConstructionError):
        DiracModel(np.array([[0, 1], [0, 0]]), ((0, 0, 0), (0, 1, 0)), "circle")
    with pytest.raises(SizeError):
        EvenModel(2, 1, np.zeros((2, 2)), "bad")
    with pytest.raises(SizeError):
        circle_dirac(0)


@pytest.mark.parametrize("d", range(-3, 4))
@pytest.mark.parametrize("seed", range(3))
def test_abstract_index(d, seed):
    Y = abstract_even_model(2, 2, d, seed)
    assert Y.dim_plus == 2 + max(d, 0) and Y.dim_minus == 2 + max(-d, 0)
    assert analytic_index(Y) == d
    plus, minus = zero_modes_by_chirality(Y.dirac, Y.grading)
    assert plus - minus == d


def test_abstract_three():
    Y = abstract_even_model(2, 2, 3, 0)
    assert (Y.dim_plus, Y.dim_minus) == (5, 2)
    # exact oracle on a rounded copy: rank is generic, so stays full
    assert exact_rank(np.round(Y.A * 1000)) == 2


def test_abstract_rejects_unequal_bulk():
    with pytest.raises(ConstructionError):
        abstract_even_model(3, 2, 1, 0)


def test_abstract_seeded():
    np.testing.assert_array_equal(abstract_even_model(3, 3, 1, 5).A, abstract_even_model(3, 3, 1, 5).A)


@pytest.mark.parametrize("K", [1, 2, 3])
def test_torus(K):
    Y = torus_flat_model(K)
    assert Y.dim_plus == Y.dim_minus == (2 * K + 1) ** 2
    assert analytic_index(Y) == 0
    assert zero_modes_by_chirality(Y.dirac, Y.grading) == (1, 1)
    ks = np.arange(-K, K + 1)
    k1, k2 = np.meshgrid(ks, ks)
    expected = np.sort(np.repeat(4 * np.pi**2 * (k1**2 + k2**2).ravel(), 2))
    np.testing.assert_allclose(np.linalg.eigvalsh(Y.dirac @ Y.dirac), expected, atol=1e-9)


@pytest.mark.parametrize("q", range(-3, 4))
def test_monopole_index(q):
    Y = sphere_monopole_model(q, abs(q) + 2)
    assert analytic_index(Y) == q
    plus, minus = zero_modes_by_chirality(Y.dirac, Y.grading)
    assert (plus, minus) == (max(q, 0), max(-q, 0))


def test_monopole_q2_L6():
    Y = sphere_monopole_model(2, 6)
    assert zero_modes_by_chirality(Y.dirac, Y.grading) == (2, 0)


@pytest.mark.parametrize("q", [-2, 0, 1, 3])
def test_monopole_spectrum(q):
    # nonzero eigenvalues of D^2 on S+: (j + 1/2)^2 - q^2/4
    L = abs(q) + 3
    Y = sphere_monopole_model(q, L)
    w = np.linalg.eigvalsh(Y.A.conj().T @ Y.A)
    w = np.sort(w[w > 1e-9])
    s = (q - 1) / 2
    expected = []
    j = abs(s)
    while j <= L + 0.5:
        val = (j + 0.5) ** 2 - q**2 / 4
        if val > 1e-9 and j >= abs(s + 1):
            expected += [val] * int(round(2 * j + 1))
        j += 1
    np.testing.assert_allclose(w, np.sort(expected), atol=1e-9)


def test_monopole_cutoff_error():
    with pytest.raises(SizeError):
        sphere_monopole_model(3, 3)


def test_product_with_point_is_circle():
    np.testing.assert_array_equal(product_circle(point_model(), 5).matrix, circle_dirac(5).matrix)


def test_product_blocks():
    Y = abstract_even_model(2, 2, 1, 0)
    K = 4
    X = product_circle(Y, K)
    f = Y.dim
    zero = slice(K * f, (K + 1) * f)
    np.testing.assert_allclose(X.matrix[zero, zero], Y.dirac)
    for i, k in enumerate(range(-K, K + 1)):
        blk = X.matrix[i * f:(i + 1) * f, i * f:(i + 1) * f]
        np.testing.assert_allclose(blk, -2 * np.pi * k * Y.grading + Y.dirac)
        if k:
            smin = np.linalg.svd(blk, compute_uv=False).min()
            assert smin > 2 * np.pi * abs(k) - 1e-9


def test_product_size_limit():
    with pytest.raises(SizeError):
        product_circle(torus_flat_model(10), 30)


def test_disjoint_union():
    U = disjoint_union(circle_dirac(2), disjoint_union(circle_dirac(1), circle_dirac(3)))
    assert U.components == 3 and len(U.parts) == 3
    assert [len(s) for s in U.component_slices()] == [5, 3, 7]


def test_multiplication_operators_are_pointwise():
    M = circle_dirac(3)
    ops = multiplication_operators(M)
    assert len(ops) == 7
    np.testing.assert_allclose(sum(ops), np.eye(7), atol=1e-12)
    for a in ops:
        for b in ops:
            np.testing.assert_allclose(a @ b, b @ a, atol=1e-12)
    with pytest.raises(UnsupportedGeometryError):
        multiplication_operators(DiracModel(np.zeros((1, 1)), ((0, 0, 0),), "sphere"))


def test_transfer_identity_cases():
    Y = abstract_even_model(2, 2, 1, 0)
    np.testing.assert_allclose(interval_transfer(Y, 0.0), np.eye(Y.dim), atol=1e-13)
    flat = EvenModel(2, 1, np.zeros((1, 2), dtype=complex), "flat")
    np.testing.assert_allclose(interval_transfer(flat, 0.7), np.eye(3), atol=1e-13)


@pytest.mark.parametrize("x", [0.1, 0.5, 1.3])
def test_transfer_two_plane(x):
    lam = 2.3
    Y = EvenModel(1, 1, np.array([[lam]], dtype=complex), "pair")
    G = transfer_generator(Y)
    np.testing.assert_allclose(G @ G, Y.dirac @ Y.dirac, atol=1e-13)
    expected = np.cosh(lam * x) * np.eye(2) + np.sinh(lam * x) * G / lam
    np.testing.assert_allclose(interval_transfer(Y, x), expected, atol=1e-12)
    np.testing.assert_allclose(interval_transfer(Y, x), sla.expm(x * G), atol=1e-10)


def test_analytic_index_small():
    assert analytic_index(point_model()) == 1
    assert analytic_index(abstract_even_model(2, 2, 3, 1)) == 3
    assert analytic_index(torus_flat_model(1)) == 0


def test_analytic_index_checks_construction():
    Y = EvenModel(1, 1, np.zeros((1, 1), dtype=complex), "claims", expected_index=1)
    with pytest.raises(ConstructionError):
        analytic_index(Y)
