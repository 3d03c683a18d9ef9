"""Clifford unitaries ``U_F``, anti-unitaries, and their k-nomial blocks.

Phase convention: the arbitrary phase in the closed form for ``U_F`` is
fixed to 1. When the upper-right entry of F is not a unit mod Nbar, F is
split by :func:`sl2_decompose_coprime_beta` and ``U_F = U_F1 U_F2``.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np

from .heisenberg import tau_power
from .imprimitivity import KIndex, eigenspace_map, linear_index
from .numtheory import (
    SL2, CapExceeded, Dim, J_matrix, mod_inverse, sl2_decompose_coprime_beta,
)

__all__ = [
    "AntiU", "NotAntisymplectic", "BetaNotCoprime",
    "symplectic_unitary", "antisymplectic_antiunitary", "clifford_operator",
    "antiunitary_on_knomial_index", "block_matrix_formula", "block_phase",
    "assemble_knomial", "projective_order", "PROJECTIVE_ORDER_CAP",
]

PROJECTIVE_ORDER_CAP = 96


class NotAntisymplectic(ValueError):
    pass


class BetaNotCoprime(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class AntiU:
    """Operator ``v -> mat @ conj(v)`` if ``conj`` else ``v -> mat @ v``."""

    mat: np.ndarray
    conj: bool = True

    def __call__(self, v: np.ndarray) -> np.ndarray:
        return self.mat @ (np.conj(v) if self.conj else v)

    def __matmul__(self, other: "AntiU") -> "AntiU":
        inner = np.conj(other.mat) if self.conj else other.mat
        return AntiU(self.mat @ inner, self.conj ^ other.conj)

    def conjugate_by(self, M: np.ndarray) -> np.ndarray:
        """Linear operator ``A M A^-1``."""
        inv = self.inverse()
        Mc = np.conj(M) if self.conj else M
        return self.mat @ Mc @ (np.conj(inv.mat) if self.conj else inv.mat)

    def inverse(self) -> "AntiU":
        # (mat K)^-1 = K mat^dagger = conj(mat^dagger) K
        mh = self.mat.conj().T
        return AntiU(np.conj(mh) if self.conj else mh, self.conj)

    def to_json(self, basis="standard") -> dict:
        from .io import matrix_to_json
        obj = matrix_to_json(self.mat, basis)
        obj["conj"] = bool(self.conj)
        return obj


_cache: dict = {}
_cache_lock = threading.Lock()


def _coprime_unitary(N: int, F: SL2) -> np.ndarray:
    binv = mod_inverse(F.b, F.nbar)
    u = np.arange(N)[:, None]
    v = np.arange(N)[None, :]
    # exponents are exact integers; reduce mod Nbar inside tau_power
    e = binv * ((F.d * u * u - 2 * u * v + F.a * v * v) % F.nbar)
    return tau_power(e, N) / np.sqrt(N)


def symplectic_unitary(d: Dim, F: SL2) -> np.ndarray:
    """Unitary with ``U D_p U^dagger = D_{Fp}`` (read-only, memoized)."""
    if F.det != 1:
        raise ValueError(f"{F} is not symplectic")
    if F.nbar != d.Nbar:
        raise ValueError(f"{F} is not reduced mod Nbar={d.Nbar}")
    key = (d.N, F)
    U = _cache.get(key)
    if U is not None:
        return U
    if math.gcd(F.b, F.nbar) == 1:
        U = _coprime_unitary(d.N, F)
    else:
        F1, F2 = sl2_decompose_coprime_beta(F)
        U = _coprime_unitary(d.N, F1) @ _coprime_unitary(d.N, F2)
    U.setflags(write=False)
    with _cache_lock:
        if len(_cache) > 4096:
            _cache.clear()
        _cache.setdefault(key, U)
    return U


def antisymplectic_antiunitary(d: Dim, F: SL2) -> AntiU:
    """``U_F = U_{F J} U_J`` where ``U_J`` is complex conjugation."""
    if F.det != -1:
        raise NotAntisymplectic(f"{F} has determinant +1")
    Ft = F @ J_matrix(F.nbar)
    return AntiU(np.asarray(symplectic_unitary(d, Ft)), True)


def clifford_operator(d: Dim, F: SL2):
    """Unitary matrix for symplectic F, :class:`AntiU` for anti-symplectic F."""
    return symplectic_unitary(d, F) if F.det == 1 else antisymplectic_antiunitary(d, F)


def antiunitary_on_knomial_index(idx: KIndex, n: int) -> KIndex:
    """Complex conjugation sends ``|r,s,j>`` to ``|-r,s,j>``."""
    return KIndex((-idx.r) % n, idx.s, idx.j)


def _formula_exponents(d: Dim, F: SL2, r: int, s: int):
    if math.gcd(F.b, F.nbar) != 1:
        raise BetaNotCoprime(f"upper-right entry of {F} is not a unit mod {F.nbar}")
    binv = mod_inverse(F.b, F.nbar)
    _, s2 = eigenspace_map(F, d, r, s)
    j = np.arange(d.k)
    src = (s + j * d.n)[:, None]
    dst = (s2 + j * d.n)[None, :]
    return binv, s2, binv * (F.d * dst * dst - 2 * dst * src + F.a * src * src)


def block_matrix_formula(d: Dim, F: SL2, r: int, s: int) -> np.ndarray:
    """Closed-form k x k block ``M[j, j']`` with ``U_F|r,s,j> = sum_j' M[j, j'] |r',s',j'>``.

    Correct only up to a unit scalar per block; see :func:`block_phase`.
    """
    _, _, e = _formula_exponents(d, F, r, s)
    return tau_power(e, d.N) / np.sqrt(d.k)


def block_phase(d: Dim, F: SL2, r: int, s: int) -> complex:
    """Unit scalar relating :func:`block_matrix_formula` to the true block of ``U_F``.

    Evaluates the residual double sum over the ``t``-labels left after the
    closed form is factored out; all exponents are exact powers of tau.
    """
    binv, s2, _ = _formula_exponents(d, F, r, s)
    r2, _ = eigenspace_map(F, d, r, s)
    k, n = d.k, d.n
    t = np.arange(n)[:, None]
    t2 = np.arange(n)[None, :]
    kn = k * n
    # lambda = tau^(2kn)
    e = (2 * kn * (r2 * t2 - r * t)
         + binv * (2 * kn * t2 * (F.d * s2 - s) + 2 * kn * t * (F.a * s - s2)
                   + kn * kn * (F.d * t2 * t2 - 2 * t * t2 + F.a * t * t)))
    return complex(tau_power(e, d.N).sum() / (n * n))


def _assemble_coprime(d: Dim, F: SL2) -> np.ndarray:
    k, n = d.k, d.n
    M = np.zeros((d.N, d.N), dtype=complex)
    for r in range(n):
        for s in range(n):
            r2, s2 = eigenspace_map(F, d, r, s)
            B = block_phase(d, F, r, s) * block_matrix_formula(d, F, r, s)
            col = linear_index(d, r, s, 0)
            row = linear_index(d, r2, s2, 0)
            M[row:row + k, col:col + k] = B.T
    return M


def assemble_knomial(d: Dim, F: SL2) -> np.ndarray:
    """``U_F`` in the k-nomial basis, built block by block from the closed form."""
    if F.det != 1:
        raise ValueError(f"{F} is not symplectic")
    if math.gcd(F.b, F.nbar) == 1:
        return _assemble_coprime(d, F)
    F1, F2 = sl2_decompose_coprime_beta(F)
    return _assemble_coprime(d, F1) @ _assemble_coprime(d, F2)


def _scalar_multiple_of_identity(M: np.ndarray, tol: float) -> bool:
    c = np.trace(M) / M.shape[0]
    return abs(abs(c) - 1) < tol and np.abs(M - c * np.eye(M.shape[0])).max() < tol


def projective_order(M, tol: float = 1e-9, cap: int = PROJECTIVE_ORDER_CAP) -> int:
    """Least m with ``M^m`` a unit multiple of the identity.

    Accepts a unitary matrix or an :class:`AntiU`; anti-unitary powers only
    qualify when the conjugation flags cancel.
    """
    A = M if isinstance(M, AntiU) else AntiU(np.asarray(M), False)
    P = A
    for m in range(1, cap + 1):
        if not P.conj and _scalar_multiple_of_identity(P.mat, tol):
            return m
        P = P @ A
    raise CapExceeded(f"projective order exceeds {cap}")
