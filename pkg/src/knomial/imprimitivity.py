"""The k-nomial basis ``|r,s,j>`` and block-monomial structure checks.

Basis vectors are ordered lexicographically in ``(r, s, j)`` with ``j``
fastest, so the linear index of ``|r,s,j>`` is ``(r*n + s)*k + j`` and the
``(r, s)`` eigenspace occupies the contiguous block ``r*n + s``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .numtheory import SL2, Dim

__all__ = [
    "KIndex", "BlockMap", "NotKNomial", "DimMismatch",
    "linear_index", "knomial_vector", "change_of_basis", "to_knomial",
    "from_knomial", "block_structure", "eigenspace_map", "eigenspace_perm",
    "published_T28", "match_columns",
]


class NotKNomial(ValueError):
    def __init__(self, message, coords=None):
        super().__init__(message)
        self.coords = coords


class DimMismatch(ValueError):
    pass


@dataclass(frozen=True)
class KIndex:
    r: int
    s: int
    j: int


def linear_index(d: Dim, r: int, s: int, j: int) -> int:
    return (r * d.n + s) * d.k + j


def knomial_vector(d: Dim, idx: KIndex) -> np.ndarray:
    """``|r,s,j> = n^-1/2 sum_t lambda^(-r t) |s + j n + t k n>``."""
    r, s, j = idx.r, idx.s, idx.j
    if not (0 <= r < d.n and 0 <= s < d.n and 0 <= j < d.k):
        raise IndexError(f"{idx} out of range for {d}")
    v = np.zeros(d.N, dtype=complex)
    t = np.arange(d.n)
    v[s + j * d.n + t * d.k * d.n] = np.exp(-2j * np.pi * ((r * t) % d.n) / d.n) / np.sqrt(d.n)
    return v


@lru_cache(maxsize=64)
def _change_of_basis(N: int) -> np.ndarray:
    d = Dim.of(N)
    T = np.zeros((N, N), dtype=complex)
    for r in range(d.n):
        for s in range(d.n):
            for j in range(d.k):
                T[:, linear_index(d, r, s, j)] = knomial_vector(d, KIndex(r, s, j))
    T.setflags(write=False)
    return T


def change_of_basis(d: Dim) -> np.ndarray:
    """Unitary whose columns are the k-nomial basis vectors (read-only, cached)."""
    return _change_of_basis(d.N)


def to_knomial(M: np.ndarray, d: Dim) -> np.ndarray:
    if M.shape != (d.N, d.N):
        raise DimMismatch(f"matrix shape {M.shape} does not match N={d.N}")
    T = change_of_basis(d)
    return T.conj().T @ M @ T


def from_knomial(M: np.ndarray, d: Dim) -> np.ndarray:
    if M.shape != (d.N, d.N):
        raise DimMismatch(f"matrix shape {M.shape} does not match N={d.N}")
    T = change_of_basis(d)
    return T @ M @ T.conj().T


@dataclass
class BlockMap:
    """Eigenspace permutation ``(r, s) -> (r', s')`` with the k x k blocks.

    ``blocks[(r, s)]`` is the sub-matrix with rows in the target eigenspace
    and columns in the source one.
    """

    n: int
    perm: dict = field(default_factory=dict)
    blocks: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        from .io import matrix_rows
        return {
            "n": self.n,
            "perm": [[list(src), list(dst)] for src, dst in sorted(self.perm.items())],
            "blocks": {f"{r},{s}": matrix_rows(B) for (r, s), B in sorted(self.blocks.items())},
        }


def block_structure(M: np.ndarray, d: Dim, tol: float = 1e-10) -> BlockMap:
    """Check that M (in the k-nomial basis) has one nonzero block per block row/column.

    ``tol`` is relative to the largest entry of M.
    """
    if M.shape != (d.N, d.N):
        raise DimMismatch(f"matrix shape {M.shape} does not match N={d.N}")
    n, k = d.n, d.k
    nb = n * n
    scale = np.abs(M).max()
    if scale == 0:
        raise NotKNomial("zero matrix")
    # blockmax[R, C] = max |entry| of block row R, block column C
    blockmax = np.abs(M).reshape(nb, k, nb, k).max(axis=(1, 3)) / scale
    support = blockmax > tol
    result = BlockMap(n)
    used_rows = set()
    for C in range(nb):
        rows = np.flatnonzero(support[:, C])
        if len(rows) != 1:
            raise NotKNomial(f"block column {divmod(C, n)} has {len(rows)} nonzero blocks",
                             coords=[(divmod(int(R), n), divmod(C, n)) for R in rows])
        R = int(rows[0])
        if R in used_rows:
            raise NotKNomial(f"block row {divmod(R, n)} hit twice", coords=[divmod(R, n)])
        used_rows.add(R)
        result.perm[divmod(C, n)] = divmod(R, n)
        result.blocks[divmod(C, n)] = M[R * k:(R + 1) * k, C * k:(C + 1) * k].copy()
    return result


def eigenspace_map(F: SL2, d: Dim, r: int, s: int) -> tuple[int, int]:
    """Eigenspace ``(r', s')`` that ``U_F`` sends the ``(r, s)`` eigenspace to."""
    a, b, c, dd = F.a, F.b, F.c, F.d
    m = d.m
    r2 = (dd * r - c * s + m * c * dd) % d.n
    s2 = (-b * r + a * s + m * a * b) % d.n
    return r2, s2


def eigenspace_perm(F: SL2, d: Dim) -> dict:
    return {(r, s): eigenspace_map(F, d, r, s) for r in range(d.n) for s in range(d.n)}


def published_T28() -> np.ndarray:
    """Published 28-dimensional base change: 2x2 Fourier tensored with an
    odd/even reordering permutation of 14 elements."""
    P = np.zeros((14, 14))
    cols = [1, 3, 5, 7, 9, 11, 13, 0, 2, 4, 6, 8, 10, 12]
    P[np.arange(14), cols] = 1
    H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    return np.kron(H, P)


def match_columns(A: np.ndarray, B: np.ndarray, tol: float = 1e-12) -> list[int]:
    """For each column of A, the unique index of an equal column of B.

    Raises ``ValueError`` if some column has no match, several matches, or
    the assignment is not a bijection.
    """
    match = []
    for i in range(A.shape[1]):
        dist = np.abs(B - A[:, [i]]).max(axis=0)
        hits = np.flatnonzero(dist < tol)
        if len(hits) != 1:
            raise ValueError(f"column {i} matched {len(hits)} columns")
        match.append(int(hits[0]))
    if len(set(match)) != len(match):
        raise ValueError("column matching is not a bijection")
    return match
