"""SIC-POVM fiducials: verification, Zauner eigenspaces, closed-form data, search."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .cliffordrep import antisymplectic_antiunitary, symplectic_unitary
from .heisenberg import displacement
from .imprimitivity import change_of_basis
from .numtheory import SL2, Dim, zauner_matrix

log = logging.getLogger(__name__)

__all__ = [
    "NotNormalized", "NoConvergence", "FidCand", "SearchCfg", "Dim8Selector",
    "overlap_table", "overlap_table_generic", "sic_defect", "povm_resolution_check",
    "zauner_unitary", "zauner_eigenspaces", "dim8_fiducial", "dim8_orbit_S2",
    "dim8_all_fiducials", "DIM8_A", "dim12_generators", "dim12_coefficients",
    "dim12_fiducial_numeric", "dim12_roots", "sic_objective", "search_fiducial",
    "search_zauner",
]

NORM_TOL = 1e-12


class NotNormalized(ValueError):
    pass


class NoConvergence(RuntimeError):
    def __init__(self, message, best):
        super().__init__(message)
        self.best = best


@dataclass
class FidCand:
    psi: np.ndarray
    defect: float
    worst_p: tuple[int, int]
    overlaps: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return len(self.psi)

    def to_json(self) -> dict:
        from .io import _num, vector_to_json
        return {
            "dim": self.dim,
            "psi": vector_to_json(self.psi),
            "defect": _num(self.defect),
            "worst_p": [int(self.worst_p[0]), int(self.worst_p[1])],
            "meta": self.meta,
        }


# ---------------------------------------------------------------- overlaps

def _shift_products(psi: np.ndarray) -> np.ndarray:
    # A[p1, u] = conj(psi[u + p1]) psi[u]
    N = len(psi)
    idx = (np.arange(N)[None, :] + np.arange(N)[:, None]) % N
    return np.conj(psi[idx]) * psi[None, :]


def _raw_overlaps(psi: np.ndarray) -> np.ndarray:
    """``h[p1, p2] = <psi| X^p1 Z^p2 |psi>`` for p in Z_N^2."""
    N = len(psi)
    return N * np.fft.ifft(_shift_products(psi), axis=1)


def overlap_table(psi: np.ndarray) -> np.ndarray:
    """``|<psi|D_p psi>|^2`` indexed by ``[p1, p2]`` over Z_N^2."""
    return np.abs(_raw_overlaps(psi)) ** 2


def overlap_table_generic(psi: np.ndarray, X: np.ndarray, Z: np.ndarray) -> np.ndarray:
    """Same table for an arbitrary pair of shift/clock generators."""
    N = len(psi)
    out = np.empty((N, N))
    Zpsi = [psi]
    for _ in range(N - 1):
        Zpsi.append(Z @ Zpsi[-1])
    Zpsi = np.array(Zpsi).T  # column p2 is Z^p2 psi
    bra = np.conj(psi)
    for p1 in range(N):
        out[p1] = np.abs(bra @ Zpsi) ** 2
        bra = bra @ X  # <psi| X^(p1+1)
    return out


def _candidate(psi: np.ndarray, table: np.ndarray, meta=None) -> FidCand:
    N = len(psi)
    dev = np.abs(table - 1.0 / (N + 1))
    dev[0, 0] = 0.0
    p = np.unravel_index(np.argmax(dev), dev.shape)
    return FidCand(psi, float(dev[p]), (int(p[0]), int(p[1])), table, dict(meta or {}))


def sic_defect(psi: np.ndarray, meta=None) -> FidCand:
    """Largest deviation of the nontrivial squared overlaps from 1/(N+1)."""
    psi = np.asarray(psi, dtype=complex)
    if abs(np.linalg.norm(psi) - 1) > NORM_TOL:
        raise NotNormalized(f"|psi| = {np.linalg.norm(psi)!r}")
    return _candidate(psi, overlap_table(psi), meta)


def povm_resolution_check(psi: np.ndarray) -> float:
    """``max |(1/N) sum_p D_p |psi><psi| D_p^dagger - I|`` over Z_N^2."""
    N = len(psi)
    rho = np.outer(psi, np.conj(psi))
    total = np.zeros((N, N), dtype=complex)
    for p1 in range(N):
        for p2 in range(N):
            D = displacement(N, (p1, p2))
            total += D @ rho @ D.conj().T
    return float(np.abs(total / N - np.eye(N)).max())


# ------------------------------------------------------ Zauner eigenspaces

def zauner_unitary(d: Dim) -> np.ndarray:
    return symplectic_unitary(d, zauner_matrix(d.Nbar))


def zauner_eigenspaces(d: Dim, tol: float = 1e-9) -> list[tuple[complex, np.ndarray]]:
    """Nonempty eigenspaces of the Zauner unitary as ``(eigenvalue, basis)``.

    The basis is an ``N x dim`` array with orthonormal columns. Eigenvalues
    are ``phi * w^l`` with ``w = exp(2 pi i/3)``, ``phi`` the principal cube
    root of the scalar ``U^3``, listed in order ``l = 0, 1, 2``.
    """
    U = zauner_unitary(d)
    N = d.N
    U3 = U @ U @ U
    c = np.trace(U3) / N
    if np.abs(U3 - c * np.eye(N)).max() > tol:
        raise ValueError("Zauner unitary is not projectively of order 3")
    phi = np.exp(1j * np.angle(c) / 3)
    V = U / phi
    V2 = V @ V
    out = []
    for l in range(3):
        w = np.exp(-2j * np.pi * l / 3)
        P = (np.eye(N) + w * V + w * w * V2) / 3
        P = (P + P.conj().T) / 2
        vals, vecs = np.linalg.eigh(P)
        basis = vecs[:, vals > 0.5]
        if basis.shape[1]:
            out.append((complex(phi * np.exp(2j * np.pi * l / 3)), basis))
    return out


# -------------------------------------------------- dimension 8 closed form

DIM8 = Dim.of(8)
# order-24 anti-symplectic normalizer element; U_A swaps the S1 and S2 eigenspaces
DIM8_A = SL2(1, 5, -5, 6, 16)
ORBIT_LABEL = {"S0": "8b", "S1": "8a", "S2": "8a"}


def _eta(e: int) -> complex:
    # eta = exp(i pi / 24)
    return np.exp(1j * np.pi * (e % 48) / 24)


@dataclass(frozen=True)
class Dim8Selector:
    orbit: str
    s: tuple[int, int, int] | None = None
    r: int | None = None

    def __post_init__(self):
        if self.orbit == "S1":
            if self.r is not None or self.s is None or len(self.s) != 3 \
                    or any(x not in (1, -1) for x in self.s):
                raise ValueError("S1 selector needs s = (s1, s2, s3) with entries +-1 and no r")
        elif self.orbit == "S0":
            if self.s is not None or self.r not in range(4):
                raise ValueError("S0 selector needs r in 0..3 and no s")
        else:
            raise ValueError(f"unknown orbit {self.orbit!r}")

    def meta(self) -> dict:
        sel = {"s": list(self.s)} if self.orbit == "S1" else {"r": self.r}
        return {"eigenspace": self.orbit, "orbit": ORBIT_LABEL[self.orbit], "selector": sel}


def _dim8_knomial(sel: Dim8Selector) -> np.ndarray:
    r2, r3, r5, r6, r30 = np.sqrt([2.0, 3.0, 5.0, 6.0, 30.0])
    if sel.orbit == "S1":
        s1, s2, s3 = sel.s
        chi = np.angle(np.sqrt(8 + r6 - r30) + 1j * np.sqrt(8 - r6 + r30))
        head = np.array([_eta(7) * np.sqrt(3 - r3), _eta(37) * np.sqrt(3 + r3), 0, 0, 0, 0, 0, 0])
        u = np.array([0, 0, _eta(17), _eta(17), r2 * _eta(31), 0, -1, 1])
        v = np.array([0, 0, _eta(11), _eta(35), 0, r2 * _eta(1), _eta(6), _eta(6)])
        return (head / (2 * r3)
                + s2 / 2 * np.sqrt((3 - r5) / 6) * np.exp(1j * s1 * chi) * u
                + s3 / 2 * np.sqrt((r5 - 1) / 6) * np.exp(1j * s1 * (chi - np.pi / 12)) * v)
    u = np.array([0, 0, _eta(33), _eta(33), r2 * _eta(15), 0, -1, 1])
    v = np.array([0, 0, _eta(33), _eta(9), 0, r2 * _eta(39), _eta(12), _eta(12)])
    return 0.5 * np.sqrt((3 - r5) / 6) * u + (1j ** sel.r) / 2 * np.sqrt((1 + r5) / 6) * v


def dim8_fiducial(sel: Dim8Selector) -> FidCand:
    """Closed-form dimension-8 fiducial, returned in the standard basis."""
    psi = change_of_basis(DIM8) @ _dim8_knomial(sel)
    psi = psi / np.linalg.norm(psi)
    return sic_defect(psi, sel.meta())


def dim8_orbit_S2(sel: Dim8Selector) -> FidCand:
    """Image of an S1 fiducial under the anti-unitary of ``DIM8_A``."""
    if sel.orbit != "S1":
        raise ValueError("S2 fiducials are images of S1 selectors")
    psi = dim8_fiducial(sel).psi
    image = antisymplectic_antiunitary(DIM8, DIM8_A)(psi)
    meta = sel.meta()
    meta["eigenspace"] = "S2"
    return sic_defect(image / np.linalg.norm(image), meta)


def dim8_all_fiducials() -> list[FidCand]:
    signs = [(a, b, c) for a in (1, -1) for b in (1, -1) for c in (1, -1)]
    out = [dim8_fiducial(Dim8Selector("S1", s)) for s in signs]
    out += [dim8_orbit_S2(Dim8Selector("S1", s)) for s in signs]
    out += [dim8_fiducial(Dim8Selector("S0", r=r)) for r in range(4)]
    return out


# ------------------------------------------------- dimension 12 numeric data

# Published 3-nomial generators as (row, column, power of omega24) triples.
# The published matrices act on row vectors; dim12_generators transposes.
_DIM12_X = [(0, 1, 9), (1, 2, 23), (2, 3, 1), (3, 4, 15), (4, 5, 17), (5, 0, 7),
            (6, 7, 9), (7, 8, 11), (8, 9, 17), (9, 10, 11), (10, 11, 1), (11, 6, 11)]
_DIM12_Z = [(0, 6, 15), (1, 7, 17), (2, 8, 7), (3, 9, 1), (4, 10, 23), (5, 11, 9),
            (6, 0, 9), (7, 1, 11), (8, 2, 1), (9, 3, 11), (10, 4, 17), (11, 5, 11)]


def _omega24() -> complex:
    r2, r3 = np.sqrt(2.0), np.sqrt(3.0)
    return r2 / 4 * ((1 - r3) + (r3 + 1) * 1j)


def dim12_generators(row_convention: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Shift and clock generators of the 3-nomial dimension-12 representation.

    By default they are returned acting on column vectors. Pass
    ``row_convention=True`` for the matrices exactly as printed.
    """
    w = _omega24()
    mats = []
    for table in (_DIM12_X, _DIM12_Z):
        M = np.zeros((12, 12), dtype=complex)
        for i, j, e in table:
            M[i, j] = w ** e
        mats.append(M if row_convention else M.T)
    return mats[0], mats[1]


def dim12_roots() -> np.ndarray:
    """Real roots of ``t^3 - 12 t - 10`` in increasing order."""
    return np.sort(np.roots([1.0, 0.0, -12.0, -10.0]).real)


def dim12_coefficients(t: float) -> np.ndarray:
    """Unnormalized coefficients x_0..x_11 evaluated at the cubic root ``t``."""
    r3, r13 = np.sqrt(3.0), np.sqrt(13.0)
    r39 = r3 * r13
    s1 = np.sqrt((r13 - 1) / 2)
    s2 = np.sqrt((3 * r13 + 9) / 2)
    t2 = t * t
    i = 1j
    x = np.empty(12, dtype=complex)
    x[0] = (((-30*r13 - 312)*s1 + (24*r13*t2 - 102*r13*t - 309*r13 - 92*t2 - 158*t - 5))*i
            + (26*r39 - 364*r3)*s1 + 28*r39*t2 - 58*r39*t - 147*r39 + 96*r3*t2 - 42*r3*t - 443*r3)
    x[1] = ((24*r13*t2 - 102*r13*t - 540*r13 - 92*t2 - 158*t - 980)*i
            + 28*r39*t2 - 58*r39*t - 264*r39 + 96*r3*t2 - 42*r3*t - 1184*r3)
    x[2] = (((24*r13 - 702)*s1 - 54*r13*t2 + 138*r13*t + 375*r13 - 98*t2 + 142*t + 667)*i
            + (28*r39 - 26*r3)*s1 - 2*r39*t2 - 22*r39*t - 81*r39 - 94*r3*t2 - 58*r3*t + 219*r3)
    x[3] = (((-30*r13 - 312)*s1 - 54*r13*t2 + 138*r13*t + 315*r13 - 98*t2 + 142*t + 43)*i
            + (26*r39 - 364*r3)*s1 - 2*r39*t2 - 22*r39*t + 93*r39 - 94*r3*t2 - 58*r3*t + 1077*r3)
    x[4] = ((30*r13*t2 - 36*r13*t - 588*r13 + 190*t2 + 16*t - 3236)*i
            - 26*r39*t2 + 80*r39*t + 168*r39 - 2*r3*t2 + 100*r3*t - 400*r3)
    x[5] = (((24*r13 - 702)*s1 + (30*r13*t2 - 36*r13*t - 297*r13 + 190*t2 + 16*t - 1637))*i
            + (28*r39 - 26*r3)*s1 - 26*r39*t2 + 80*r39*t + 111*r39 - 2*r3*t2 + 100*r3*t - 517*r3)
    x[6] = (((-30*r13 - 312)*s1 + (30*r13*t2 - 36*r13*t - 357*r13 + 190*t2 + 16*t - 2261))*i
            + (26*r39 - 364*r3)*s1 - 26*r39*t2 + 80*r39*t + 285*r39 - 2*r3*t2 + 100*r3*t + 341*r3)
    x[7] = 488*r13*s2
    x[8] = (((24*r13 - 702)*s1 + (24*r13*t2 - 102*r13*t - 249*r13 - 92*t2 - 158*t + 619))*i
            + (28*r39 - 26*r3)*s1 + 28*r39*t2 - 58*r39*t - 321*r39 + 96*r3*t2 - 42*r3*t - 1301*r3)
    x[9] = (((85*r39 + 91*r3)*s1*s2 - 122*r39*s2)*i
            + (23*r13 - 871)*s1*s2 + 122*r13*s2)
    x[10] = ((-54*r13*t2 + 138*r13*t + 84*r13 - 98*t2 + 142*t - 932)*i
             - 2*r39*t2 - 22*r39*t - 24*r39 - 94*r3*t2 - 58*r3*t + 336*r3)
    x[11] = (((31*r39 + 481*r3)*s1*s2 + 122*r39*s2)*i
             + (139*r13 - 299)*s1*s2 + 122*r13*s2)
    return x


def dim12_fiducial_numeric(root_choice: int, row_convention: bool = False) -> FidCand:
    if root_choice not in (0, 1, 2):
        raise ValueError("root_choice must be 0, 1 or 2")
    t = dim12_roots()[root_choice]
    psi = dim12_coefficients(t)
    psi = psi / np.linalg.norm(psi)
    X, Z = dim12_generators(row_convention)
    meta = {"root_choice": root_choice, "t1": float(t), "row_convention": row_convention}
    return _candidate(psi, overlap_table_generic(psi, X, Z), meta)


# ------------------------------------------------------------------ search

@dataclass
class SearchCfg:
    restarts: int = 10
    max_iters: int = 2000
    tol: float = 1e-10
    rng_seed: int = 0
    subspace: np.ndarray | None = None

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")


def _unpack(x: np.ndarray, basis: np.ndarray | None):
    m = len(x) // 2
    y = x[:m] + 1j * x[m:]
    nrm = np.linalg.norm(y)
    psi = y / nrm if basis is None else basis @ (y / nrm)
    return psi, nrm


def sic_objective(x: np.ndarray, N: int, basis: np.ndarray | None = None):
    """Squared residual sum and its gradient in the real parameters ``x``.

    ``x`` holds real then imaginary parts of the coefficients (in ``basis``
    when given); the vector is normalized before evaluation, so the
    gradient is tangent to the sphere.
    """
    psi, nrm = _unpack(x, basis)
    h = _raw_overlaps(psi)
    resid = np.abs(h) ** 2 - 1.0 / (N + 1)
    resid[0, 0] = 0.0
    f = float(np.sum(resid ** 2))
    # d f / d conj(psi) = sum_p 4 resid_p conj(h_p) X^p1 Z^p2 psi
    C = 4 * resid * np.conj(h)
    B = N * np.fft.ifft(C, axis=1)          # B[p1, v] = sum_p2 C ω^(p2 v)
    Q = B * psi[None, :]
    idx = (np.arange(N)[None, :] - np.arange(N)[:, None]) % N
    G = Q[np.arange(N)[:, None], idx].sum(axis=0)
    if basis is not None:
        G = basis.conj().T @ G
    g = 2 * np.concatenate([G.real, G.imag])
    u = x / nrm
    g = (g - u * (u @ g)) / nrm
    return f, g


def _restart(N, cfg: SearchCfg, index: int, log_records):
    basis = cfg.subspace
    m = N if basis is None else basis.shape[1]
    rng = np.random.default_rng(np.random.SeedSequence([cfg.rng_seed, index]))
    x0 = rng.standard_normal(2 * m)
    it = [0]

    def callback(xk):
        it[0] += 1
        if log_records is not None:
            log_records.append({"restart": index, "iter": it[0],
                                "objective": sic_objective(xk, N, basis)[0]})

    res = minimize(sic_objective, x0, args=(N, basis), jac=True, method="L-BFGS-B",
                   callback=callback,
                   options={"maxiter": cfg.max_iters, "ftol": 0.0, "gtol": 1e-15,
                            "maxcor": 30})
    psi, _ = _unpack(res.x, basis)
    return psi


def search_fiducial(d: Dim, cfg: SearchCfg, log_records: list | None = None,
                    stop_early: bool = True) -> FidCand:
    """Minimize the squared overlap residuals from random restarts.

    Restart ``i`` draws its start from ``SeedSequence([rng_seed, i])``, so
    results do not depend on scheduling. The best candidate is returned,
    ties going to the lowest restart index; with ``stop_early`` the first
    restart reaching ``cfg.tol`` ends the search. Raises
    :class:`NoConvergence` carrying the best candidate otherwise.
    """
    N = d.N
    if cfg.subspace is not None:
        B = np.asarray(cfg.subspace)
        if np.abs(B.conj().T @ B - np.eye(B.shape[1])).max() > 1e-10:
            raise ValueError("subspace basis is not orthonormal")
    best = None
    for i in range(cfg.restarts):
        psi = _restart(N, cfg, i, log_records)
        cand = sic_defect(psi / np.linalg.norm(psi), {"restart": i, "seed": cfg.rng_seed})
        log.debug("restart %d defect %.3e", i, cand.defect)
        if best is None or cand.defect < best.defect:
            best = cand
        if stop_early and best.defect < cfg.tol:
            break
    if best.defect >= cfg.tol:
        raise NoConvergence(f"best defect {best.defect:.3e} >= tol {cfg.tol:.1e}", best)
    return best


def search_zauner(d: Dim, cfg: SearchCfg, log_records: list | None = None) -> FidCand:
    """Search each Zauner eigenspace in turn, largest first."""
    spaces = sorted(zauner_eigenspaces(d), key=lambda sp: -sp[1].shape[1])
    best = None
    for l, (val, basis) in enumerate(spaces):
        sub = SearchCfg(cfg.restarts, cfg.max_iters, cfg.tol, cfg.rng_seed, basis)
        try:
            cand = search_fiducial(d, sub, log_records)
        except NoConvergence as exc:
            cand = exc.best
        cand.meta.update({"zauner_eigenvalue": [float(val.real), float(val.imag)],
                          "eigenspace_dim": int(basis.shape[1])})
        if best is None or cand.defect < best.defect:
            best = cand
        if best.defect < cfg.tol:
            return best
    raise NoConvergence(f"best defect {best.defect:.3e} >= tol {cfg.tol:.1e}", best)
