"""Integer and modular 2x2 matrix arithmetic.

Dimensions are split as ``N = k * n**2`` with ``k`` square-free, and the
symplectic/anti-symplectic matrices live in ``ESL(2, Z_Nbar)`` where
``Nbar`` is ``N`` for odd ``N`` and ``2N`` for even ``N``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

__all__ = [
    "NotCoprime", "CapExceeded", "Dim", "SL2",
    "squarefree_decompose", "nbar", "mod_inverse", "is_squarefree",
    "sl2_mul", "sl2_inv", "sl2_pow", "sl2_identity", "sl2_decompose_coprime_beta",
    "zauner_matrix", "J_matrix", "matrix_order", "enumerate_esl2",
    "normalizer_of_zauner", "generated_subgroup", "random_symplectic",
    "random_antisymplectic", "ENUMERATION_CAP",
]

ENUMERATION_CAP = 48


class NotCoprime(ValueError):
    pass


class CapExceeded(ValueError):
    pass


def is_squarefree(k: int) -> bool:
    p = 2
    while p * p <= k:
        if k % (p * p) == 0:
            return False
        p += 1
    return True


def squarefree_decompose(N: int) -> tuple[int, int]:
    """Return ``(k, n)`` with ``N == k * n**2`` and ``k`` square-free."""
    if N < 1:
        raise ValueError(f"dimension must be positive, got {N}")
    k, n = 1, 1
    rest = N
    p = 2
    while p * p <= rest:
        e = 0
        while rest % p == 0:
            rest //= p
            e += 1
        n *= p ** (e // 2)
        if e % 2:
            k *= p
        p += 1
    k *= rest
    return k, n


def nbar(N: int) -> int:
    if N < 1:
        raise ValueError(f"dimension must be positive, got {N}")
    return N if N % 2 else 2 * N


@dataclass(frozen=True)
class Dim:
    """A dimension together with its square-free split and ``Nbar``."""

    N: int
    k: int
    n: int
    Nbar: int

    @classmethod
    def of(cls, N: int) -> "Dim":
        k, n = squarefree_decompose(N)
        return cls(N, k, n, nbar(N))

    def __post_init__(self):
        if self.k * self.n ** 2 != self.N:
            raise ValueError(f"N={self.N} != k*n^2 = {self.k}*{self.n}^2")
        if self.Nbar != nbar(self.N):
            raise ValueError(f"Nbar={self.Nbar} inconsistent with N={self.N}")

    @property
    def m(self) -> int:
        """Eigenspace shift: ``n/2`` when k is odd and n even, else 0."""
        return self.n // 2 if (self.k % 2 == 1 and self.n % 2 == 0) else 0


def mod_inverse(a: int, m: int) -> int:
    if m < 1:
        raise ValueError(f"modulus must be positive, got {m}")
    if math.gcd(a, m) != 1:
        raise NotCoprime(f"{a} has no inverse mod {m}")
    return pow(a, -1, m) if m > 1 else 0


@dataclass(frozen=True)
class SL2:
    """2x2 integer matrix mod ``nbar`` with determinant ``det`` (+1 or -1).

    Entries are stored as canonical representatives in ``[0, nbar)``.
    """

    a: int
    b: int
    c: int
    d: int
    nbar: int
    det: int = 1

    def __init__(self, a, b, c, d, nbar, det=None):
        a, b, c, d = (int(x) % nbar for x in (a, b, c, d))
        actual = (a * d - b * c) % nbar
        if det is None:
            if actual == 1 % nbar:
                det = 1
            elif actual == (-1) % nbar:
                det = -1
            else:
                raise ValueError(f"determinant {actual} is not +-1 mod {nbar}")
        elif actual != det % nbar:
            raise ValueError(f"determinant {actual} != {det} mod {nbar}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "nbar", nbar)
        object.__setattr__(self, "det", int(det))

    @classmethod
    def from_rows(cls, rows, nbar, det=None) -> "SL2":
        (a, b), (c, d) = rows
        return cls(a, b, c, d, nbar, det)

    @property
    def rows(self) -> list[list[int]]:
        return [[self.a, self.b], [self.c, self.d]]

    @property
    def symplectic(self) -> bool:
        return self.det == 1

    def trace(self) -> int:
        return (self.a + self.d) % self.nbar

    def apply(self, p1: int, p2: int) -> tuple[int, int]:
        """Image of the column vector ``(p1, p2)`` mod ``nbar``."""
        return ((self.a * p1 + self.b * p2) % self.nbar,
                (self.c * p1 + self.d * p2) % self.nbar)

    def __matmul__(self, other: "SL2") -> "SL2":
        return sl2_mul(self, other)

    def __repr__(self):
        return f"SL2([[{self.a}, {self.b}], [{self.c}, {self.d}]] mod {self.nbar}, det={self.det:+d})"

    def to_json(self) -> dict:
        return {"nbar": self.nbar, "m": self.rows, "det": self.det}

    @classmethod
    def from_json(cls, obj: dict) -> "SL2":
        return cls.from_rows(obj["m"], obj["nbar"], obj.get("det"))


def sl2_identity(nbar: int) -> SL2:
    return SL2(1, 0, 0, 1, nbar, 1)


def J_matrix(nbar: int) -> SL2:
    """The anti-symplectic reflection diag(1, -1)."""
    return SL2(1, 0, 0, -1, nbar, -1)


def sl2_mul(F: SL2, G: SL2, nbar: int | None = None) -> SL2:
    m = F.nbar if nbar is None else nbar
    if F.nbar != m or G.nbar != m:
        raise ValueError(f"modulus mismatch: {F.nbar}, {G.nbar}, {m}")
    return SL2(F.a * G.a + F.b * G.c, F.a * G.b + F.b * G.d,
               F.c * G.a + F.d * G.c, F.c * G.b + F.d * G.d,
               m, F.det * G.det)


def sl2_inv(F: SL2) -> SL2:
    # adjugate divided by det; det = +-1 is its own inverse
    s = F.det
    return SL2(s * F.d, -s * F.b, -s * F.c, s * F.a, F.nbar, F.det)


def sl2_pow(F: SL2, e: int) -> SL2:
    if e < 0:
        F, e = sl2_inv(F), -e
    result = sl2_identity(F.nbar)
    base = F
    while e:
        if e & 1:
            result = result @ base
        base = base @ base
        e >>= 1
    return result


def sl2_decompose_coprime_beta(F: SL2) -> tuple[SL2, SL2]:
    """Split a symplectic F as ``F1 @ F2`` with both upper-right entries units.

    ``F2 = [[x, -1], [1, 0]]`` always has a unit upper-right entry;
    ``F1 = F @ F2^-1`` has upper-right entry ``a + b*x``, and ``x`` is
    scanned upward until that entry is coprime to ``nbar``.
    """
    if F.det != 1:
        raise ValueError("decomposition requires a symplectic matrix")
    m = F.nbar
    for x in range(m):
        if math.gcd(F.a + F.b * x, m) == 1:
            F2 = SL2(x, -1, 1, 0, m, 1)
            F1 = SL2(-F.b, F.a + F.b * x, -F.d, F.c + F.d * x, m, 1)
            return F1, F2
    raise AssertionError(f"no coprime decomposition for {F}")  # unreachable when det == 1


def zauner_matrix(nbar: int) -> SL2:
    if nbar < 2:
        raise ValueError("Nbar must be at least 2")
    return SL2(0, -1, 1, -1, nbar, 1)


def matrix_order(F: SL2) -> int:
    ident = sl2_identity(F.nbar)
    G = F
    m = 1
    while G != ident:
        G = G @ F
        m += 1
    return m


def enumerate_esl2(nbar: int, cap: int = ENUMERATION_CAP) -> list[SL2]:
    """All 2x2 matrices mod ``nbar`` with determinant +-1."""
    if nbar > cap:
        raise CapExceeded(f"Nbar={nbar} exceeds enumeration cap {cap}")
    r = np.arange(nbar, dtype=np.int64)
    a, b, c, d = (x.ravel() for x in np.meshgrid(r, r, r, r, indexing="ij"))
    det = (a * d - b * c) % nbar
    plus = det == 1 % nbar
    minus = (det == (-1) % nbar) & ~plus
    out = [SL2(*t, nbar, 1) for t in zip(a[plus], b[plus], c[plus], d[plus])]
    out += [SL2(*t, nbar, -1) for t in zip(a[minus], b[minus], c[minus], d[minus])]
    return out


def normalizer_of_zauner(nbar: int, cap: int = ENUMERATION_CAP) -> list[SL2]:
    """Elements G of ESL(2, Z_nbar) with ``G F_Z G^-1`` equal to F_Z or F_Z^2."""
    FZ = zauner_matrix(nbar)
    targets = {FZ, FZ @ FZ}
    return [G for G in enumerate_esl2(nbar, cap) if G @ FZ @ sl2_inv(G) in targets]


def generated_subgroup(generators) -> set[SL2]:
    gens = list(generators)
    if not gens:
        raise ValueError("need at least one generator")
    found = {sl2_identity(gens[0].nbar)}
    frontier = list(found)
    while frontier:
        new = []
        for g in frontier:
            for h in gens:
                x = g @ h
                if x not in found:
                    found.add(x)
                    new.append(x)
        frontier = new
    return found


def _random_with_det(nbar: int, target: int, rng: np.random.Generator) -> SL2:
    while True:
        a, b, c, d = (int(x) for x in rng.integers(0, nbar, size=4))
        if (a * d - b * c - target) % nbar == 0:
            return SL2(a, b, c, d, nbar, target if nbar > 2 else 1)


def random_symplectic(nbar: int, rng: np.random.Generator) -> SL2:
    """Uniformly random element of SL(2, Z_nbar) by rejection."""
    return _random_with_det(nbar, 1, rng)


def random_antisymplectic(nbar: int, rng: np.random.Generator) -> SL2:
    if nbar <= 2:
        raise ValueError("det -1 coincides with det +1 for Nbar <= 2")
    return _random_with_det(nbar, -1, rng)


def sl2_order_formula(nbar: int) -> int:
    """|SL(2, Z_nbar)| = nbar^3 prod_{p | nbar} (1 - p^-2)."""
    primes = {p for p in range(2, nbar + 1) if nbar % p == 0 and all(p % q for q in range(2, p))}
    return reduce(lambda acc, p: acc * (p * p - 1) // (p * p), primes, nbar ** 3)
