import numpy as np
import pytest

from knomial.cliffordrep import symplectic_unitary
from knomial.heisenberg import build_X, build_Z, displacement
from knomial.imprimitivity import (
    DimMismatch, KIndex, NotKNomial, block_structure, change_of_basis,
    eigenspace_map, eigenspace_perm, from_knomial, knomial_vector, linear_index,
    match_columns, published_T28, to_knomial,
)
from knomial.numtheory import SL2, Dim, random_symplectic, zauner_matrix


def e(N, *idx):
    v = np.zeros(N)
    v[list(idx)] = 1
    return v


def test_knomial_vector_examples():
    d8 = Dim.of(8)
    assert np.allclose(knomial_vector(d8, KIndex(0, 0, 0)), e(8, 0, 4) / np.sqrt(2), atol=1e-15)
    v = knomial_vector(Dim.of(4), KIndex(1, 0, 0))
    assert np.allclose(v, (e(4, 0) - e(4, 2)) / np.sqrt(2), atol=1e-15)
    d7 = Dim.of(7)
    for j in range(7):
        assert np.array_equal(knomial_vector(d7, KIndex(0, 0, j)), e(7, j))
    with pytest.raises(IndexError):
        knomial_vector(d8, KIndex(2, 0, 0))


def test_change_of_basis_shapes():
    assert np.array_equal(change_of_basis(Dim.of(1)), [[1]])
    T = change_of_basis(Dim.of(8))
    assert np.abs(T.conj().T @ T - np.eye(8)).max() < 1e-14
    assert all(np.count_nonzero(np.abs(T[:, c]) > 1e-14) == 2 for c in range(8))
    assert np.allclose(np.abs(T[np.abs(T) > 1e-14]), 1 / np.sqrt(2))
    with pytest.raises(ValueError):
        T[0, 0] = 2


def test_linear_index_order():
    d = Dim.of(8)
    labels = [(r, s, j) for r in range(2) for s in range(2) for j in range(2)]
    assert [linear_index(d, *lab) for lab in labels] == list(range(8))


@pytest.mark.parametrize("N", [4, 8, 9, 12, 16, 18, 28])
def test_eigenbasis_property(N):
    d = Dim.of(N)
    Xkn = np.linalg.matrix_power(build_X(N), d.k * d.n)
    Zkn = np.linalg.matrix_power(build_Z(N), d.k * d.n)
    lam = np.exp(2j * np.pi / d.n)
    for r in range(d.n):
        for s in range(d.n):
            for j in range(d.k):
                v = knomial_vector(d, KIndex(r, s, j))
                assert np.linalg.norm(Xkn @ v - lam ** r * v) < 1e-11
                assert np.linalg.norm(Zkn @ v - lam ** s * v) < 1e-11
    Zn = to_knomial(np.linalg.matrix_power(build_Z(N), d.n), d)
    assert np.abs(Zn - np.diag(np.diag(Zn))).max() < 1e-11


@pytest.mark.parametrize("N", [4, 8, 12, 18, 28])
def test_X_and_Z_action(N):
    d = Dim.of(N)
    k, n = d.k, d.n
    lam = np.exp(2j * np.pi / n)
    w = np.exp(2j * np.pi / N)
    X, Z = build_X(N), build_Z(N)
    for r in range(n):
        for s in range(n):
            for j in range(k):
                v = knomial_vector(d, KIndex(r, s, j))
                if s != n - 1:
                    target = knomial_vector(d, KIndex(r, s + 1, j))
                elif j != k - 1:
                    target = knomial_vector(d, KIndex(r, 0, j + 1))
                else:
                    target = lam ** r * knomial_vector(d, KIndex(r, 0, 0))
                assert np.abs(X @ v - target).max() < 1e-12
                target = w ** (s + n * j) * knomial_vector(d, KIndex((r - 1) % n, s, j))
                assert np.abs(Z @ v - target).max() < 1e-12


def test_to_knomial_roundtrip_and_errors():
    d = Dim.of(12)
    rng = np.random.default_rng(0)
    M = rng.standard_normal((12, 12)) + 1j * rng.standard_normal((12, 12))
    assert np.abs(from_knomial(to_knomial(M, d), d) - M).max() < 1e-12
    assert np.abs(to_knomial(np.eye(12), d) - np.eye(12)).max() < 1e-14
    with pytest.raises(DimMismatch):
        to_knomial(np.eye(8), d)


def test_X_is_monomial_at_8():
    d = Dim.of(8)
    M = to_knomial(build_X(8), d)
    mask = np.abs(M) > 1e-12
    assert (mask.sum(axis=0) == 1).all() and (mask.sum(axis=1) == 1).all()


def test_block_structure_diagonal():
    d = Dim.of(12)
    bm = block_structure(np.diag(np.arange(1, 13)), d)
    assert bm.perm == {(r, s): (r, s) for r in range(2) for s in range(2)}
    assert np.array_equal(bm.blocks[(1, 0)], np.diag([7, 8, 9]))


def test_block_structure_rejects_random_unitary():
    rng = np.random.default_rng(1)
    d = Dim.of(12)
    A = rng.standard_normal((12, 12)) + 1j * rng.standard_normal((12, 12))
    Q, _ = np.linalg.qr(A)
    with pytest.raises(NotKNomial) as info:
        block_structure(Q, d)
    assert info.value.coords


def test_block_structure_json():
    d = Dim.of(8)
    obj = block_structure(to_knomial(build_X(8), d), d).to_json()
    assert obj["n"] == 2 and len(obj["perm"]) == 4 and len(obj["blocks"]) == 4


def test_eigenspace_map_examples():
    assert eigenspace_map(SL2(1, 0, 0, 1, 24), Dim.of(12), 1, 1) == (1, 1)
    assert eigenspace_map(zauner_matrix(16), Dim.of(8), 1, 0) == (1, 1)
    assert eigenspace_map(SL2(1, 1, 0, 1, 24), Dim.of(12), 0, 0) == (0, 1)


@pytest.mark.parametrize("N", [8, 12, 28])
def test_imprimitivity(N):
    d = Dim.of(N)
    rng = np.random.default_rng(N)
    for _ in range(100):
        F = random_symplectic(d.Nbar, rng)
        bm = block_structure(to_knomial(symplectic_unitary(d, F), d), d)
        assert bm.perm == eigenspace_perm(F, d)


@pytest.mark.parametrize("N", [8, 12, 18])
def test_perm_functorial(N):
    d = Dim.of(N)
    rng = np.random.default_rng(7)
    for _ in range(30):
        F, G = random_symplectic(d.Nbar, rng), random_symplectic(d.Nbar, rng)
        pF, pG, pFG = eigenspace_perm(F, d), eigenspace_perm(G, d), eigenspace_perm(F @ G, d)
        assert all(pFG[rs] == pF[pG[rs]] for rs in pFG)


def test_published_T28_matches_column_set():
    d = Dim.of(28)
    T = change_of_basis(d)
    P = published_T28()
    match = match_columns(P, T)
    assert sorted(match) == list(range(28))
    # the published matrix also diagonalizes X^14 and Z^14
    for M in (np.linalg.matrix_power(build_X(28), 14), np.linalg.matrix_power(build_Z(28), 14)):
        D = P.conj().T @ M @ P
        assert np.abs(D - np.diag(np.diag(D))).max() < 1e-12


def test_match_columns_failure():
    with pytest.raises(ValueError):
        match_columns(np.eye(3), np.ones((3, 3)))


def test_displacements_knomial():
    d = Dim.of(18)
    for p in [(1, 0), (0, 1), (3, 5)]:
        bm = block_structure(to_knomial(displacement(18, p), d), d)
        assert len(bm.perm) == 9
