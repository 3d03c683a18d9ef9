import math

import numpy as np
import pytest

from knomial.cliffordrep import (
    AntiU, BetaNotCoprime, NotAntisymplectic, antisymplectic_antiunitary,
    antiunitary_on_knomial_index, assemble_knomial, block_matrix_formula,
    block_phase, projective_order, symplectic_unitary,
)
from knomial.heisenberg import displacement
from knomial.imprimitivity import KIndex, block_structure, eigenspace_map, knomial_vector, to_knomial
from knomial.numtheory import (
    SL2, CapExceeded, Dim, J_matrix, random_antisymplectic, random_symplectic,
    sl2_identity, zauner_matrix,
)
from knomial.sic import zauner_unitary


def coprime_sample(d, rng):
    while True:
        F = random_symplectic(d.Nbar, rng)
        if math.gcd(F.b, d.Nbar) == 1:
            return F


def proportional(A, B, tol):
    c = np.vdot(B.ravel(), A.ravel()) / np.vdot(B.ravel(), B.ravel())
    return abs(abs(c) - 1) < tol and np.abs(A - c * B).max() < tol


def test_hadamard_N2():
    U = symplectic_unitary(Dim.of(2), SL2(0, -1, 1, 0, 4))
    assert np.allclose(U, np.array([[1, 1], [1, -1]]) / np.sqrt(2), atol=1e-15)


def test_identity_via_decomposition():
    for N in (2, 5, 8, 12):
        d = Dim.of(N)
        assert proportional(symplectic_unitary(d, sl2_identity(d.Nbar)), np.eye(N), 1e-12)


@pytest.mark.parametrize("N", [3, 8, 12, 16])
def test_hadamard_moduli(N):
    d = Dim.of(N)
    rng = np.random.default_rng(N)
    for _ in range(10):
        U = symplectic_unitary(d, coprime_sample(d, rng))
        assert np.abs(np.abs(U) - 1 / np.sqrt(N)).max() < 1e-12


@pytest.mark.parametrize("N", [2, 3, 4, 6, 9, 10, 16])
def test_covariance(N):
    d = Dim.of(N)
    rng = np.random.default_rng(100 + N)
    for _ in range(10):
        F = random_symplectic(d.Nbar, rng)
        U = symplectic_unitary(d, F)
        assert np.abs(U.conj().T @ U - np.eye(N)).max() < 1e-12
        for p in [(1, 0), (0, 1), (2, 3)]:
            err = np.abs(U @ displacement(N, p) @ U.conj().T - displacement(N, F.apply(*p))).max()
            assert err < 1e-9


@pytest.mark.parametrize("N", [3, 5, 8, 12])
def test_anticovariance(N):
    d = Dim.of(N)
    rng = np.random.default_rng(N)
    for _ in range(30):
        F = random_antisymplectic(d.Nbar, rng)
        A = antisymplectic_antiunitary(d, F)
        v = rng.standard_normal(N) + 1j * rng.standard_normal(N)
        p = tuple(int(x) for x in rng.integers(0, d.Nbar, 2))
        lhs = A(displacement(N, p) @ A.inverse()(v))
        rhs = displacement(N, F.apply(*p)) @ v
        c = np.vdot(rhs, lhs) / np.vdot(rhs, rhs)
        assert abs(abs(c) - 1) < 1e-10 and np.linalg.norm(lhs - c * rhs) < 1e-9


def test_antiunitary_J_and_K():
    d = Dim.of(8)
    A = antisymplectic_antiunitary(d, J_matrix(16))
    assert A.conj and proportional(A.mat, np.eye(8), 1e-12)
    K = SL2(0, 1, 1, 0, 16)
    assert K @ J_matrix(16) == SL2(0, -1, 1, 0, 16)
    assert np.array_equal(antisymplectic_antiunitary(d, K).mat,
                          symplectic_unitary(d, SL2(0, -1, 1, 0, 16)))
    with pytest.raises(NotAntisymplectic):
        antisymplectic_antiunitary(d, zauner_matrix(16))


def test_antiunitary_twice_is_unitary_scaling():
    d = Dim.of(8)
    rng = np.random.default_rng(3)
    A = antisymplectic_antiunitary(d, SL2(1, 5, -5, 6, 16))
    v = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    K = antisymplectic_antiunitary(d, SL2(0, 1, 1, 0, 16))
    w = K(K(v))
    c = np.vdot(v, w) / np.vdot(v, v)
    assert abs(abs(c) - 1) < 1e-12 and np.linalg.norm(w - c * v) < 1e-12
    AA = A @ A
    assert not AA.conj
    assert np.linalg.norm(AA(v) - A(A(v))) < 1e-12


def test_conjugation_on_knomial_index():
    assert antiunitary_on_knomial_index(KIndex(0, 1, 2), 5) == KIndex(0, 1, 2)
    assert antiunitary_on_knomial_index(KIndex(1, 1, 0), 2) == KIndex(1, 1, 0)
    assert antiunitary_on_knomial_index(KIndex(1, 0, 1), 3) == KIndex(2, 0, 1)
    d = Dim.of(18)
    for r in range(3):
        v = knomial_vector(d, KIndex(r, 2, 1))
        w = knomial_vector(d, antiunitary_on_knomial_index(KIndex(r, 2, 1), 3))
        assert np.abs(np.conj(v) - w).max() < 1e-15


def test_block_formula_k1_is_scalar():
    d = Dim.of(9)
    B = block_matrix_formula(d, SL2(0, -1, 1, 0, 9), 1, 2)
    assert B.shape == (1, 1) and abs(abs(B[0, 0]) - 1) < 1e-14


def test_block_formula_requires_coprime_beta():
    with pytest.raises(BetaNotCoprime):
        block_matrix_formula(Dim.of(8), sl2_identity(16), 0, 0)


def test_block_formula_hadamard_at_8():
    d = Dim.of(8)
    rng = np.random.default_rng(8)
    for _ in range(20):
        F = coprime_sample(d, rng)
        for r in range(2):
            for s in range(2):
                B = block_matrix_formula(d, F, r, s)
                assert np.abs(np.abs(B) - 1 / np.sqrt(2)).max() < 1e-12
                assert np.abs(B.conj().T @ B - np.eye(2)).max() < 1e-12


def test_block_formula_N12_example():
    d = Dim.of(12)
    F = SL2(0, -1, 1, 0, 24)
    bm = block_structure(to_knomial(symplectic_unitary(d, F), d), d)
    realized = bm.blocks[(0, 0)]
    assert proportional(realized, block_matrix_formula(d, F, 0, 0).T, 1e-12)


@pytest.mark.parametrize("N", [4, 8, 12, 18, 28])
def test_block_formula_agreement(N):
    d = Dim.of(N)
    rng = np.random.default_rng(N)
    for _ in range(10):
        F = coprime_sample(d, rng)
        bm = block_structure(to_knomial(symplectic_unitary(d, F), d), d)
        for (r, s), realized in bm.blocks.items():
            formula = block_matrix_formula(d, F, r, s).T
            assert proportional(realized, formula, 1e-12)
            c = block_phase(d, F, r, s)
            assert abs(abs(c) - 1) < 1e-12
            assert np.abs(realized - c * formula).max() < 1e-12


@pytest.mark.parametrize("N", [4, 8, 12, 18, 28])
def test_assemble_matches_basis_change(N):
    d = Dim.of(N)
    rng = np.random.default_rng(N + 1)
    for _ in range(10):
        F = random_symplectic(d.Nbar, rng)
        M = assemble_knomial(d, F)
        ref = to_knomial(symplectic_unitary(d, F), d)
        assert np.abs(M - ref).max() < 1e-11
        assert np.abs(M.conj().T @ M - np.eye(N)).max() < 1e-11
        assert block_structure(M, d).perm == block_structure(ref, d).perm


def test_assemble_identity_and_products():
    d = Dim.of(12)
    M = assemble_knomial(d, sl2_identity(24))
    bm = block_structure(M, d)
    assert all(bm.perm[rs] == rs for rs in bm.perm)
    assert all(proportional(B, np.eye(3), 1e-12) for B in bm.blocks.values())
    rng = np.random.default_rng(2)
    for _ in range(10):
        F, G = random_symplectic(24, rng), random_symplectic(24, rng)
        assert proportional(assemble_knomial(d, F) @ assemble_knomial(d, G),
                            assemble_knomial(d, F @ G), 1e-10)


def test_projective_order():
    assert projective_order(np.eye(4)) == 1
    for N in range(3, 13):
        assert projective_order(zauner_unitary(Dim.of(N))) == 3
    d = Dim.of(8)
    UA = antisymplectic_antiunitary(d, SL2(1, 5, -5, 6, 16))
    assert projective_order(UA) == 12
    with pytest.raises(CapExceeded):
        projective_order(np.diag(np.exp(2j * np.pi * np.array([0, 1 / 97]))), cap=96)


def test_projective_order_phase_independent():
    rng = np.random.default_rng(5)
    d = Dim.of(10)
    for _ in range(5):
        F = random_symplectic(d.Nbar, rng)
        U = np.asarray(symplectic_unitary(d, F))
        phase = np.exp(2j * np.pi * rng.random())
        assert projective_order(U) == projective_order(phase * U)
    UA = antisymplectic_antiunitary(Dim.of(8), SL2(1, 5, -5, 6, 16))
    assert projective_order(AntiU(UA.mat * np.exp(0.3j), True)) == 12


def test_antiu_json():
    obj = antisymplectic_antiunitary(Dim.of(3), SL2(0, 1, 1, 0, 3)).to_json()
    assert obj["conj"] is True and obj["dim"] == 3
