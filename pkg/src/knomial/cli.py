"""Command-line front end.

Exit codes: 0 success, 1 verification or convergence failure, 2 usage or
input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import io
from .cliffordrep import clifford_operator, symplectic_unitary, AntiU
from .heisenberg import build_X, build_Z, displacement
from .imprimitivity import (
    NotKNomial, block_structure, change_of_basis, eigenspace_perm, to_knomial,
)
from .numtheory import SL2, Dim, random_symplectic
from .sic import (
    Dim8Selector, NoConvergence, NotNormalized, SearchCfg, dim8_fiducial,
    dim8_orbit_S2, dim12_fiducial_numeric, search_fiducial, search_zauner, sic_defect,
)

DEFAULT_TOL = 1e-10
ENV_TOL = "KNOM_TOL"


class UsageError(Exception):
    pass


def _ints(text: str, count: int, name: str) -> list[int]:
    try:
        vals = [int(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"--{name} expects {count} comma-separated integers, got {text!r}")
    if len(vals) != count:
        raise UsageError(f"--{name} expects {count} comma-separated integers, got {text!r}")
    return vals


def _tolerance(args) -> float:
    if args.tolerance is not None:
        tol = args.tolerance
    elif os.environ.get(ENV_TOL):
        try:
            tol = float(os.environ[ENV_TOL])
        except ValueError:
            raise UsageError(f"{ENV_TOL} is not a number: {os.environ[ENV_TOL]!r}")
    else:
        tol = DEFAULT_TOL
    if not tol > 0:
        raise UsageError("tolerance must be positive")
    return tol


def _dim(N: int) -> Dim:
    if N < 1:
        raise UsageError(f"--dim must be positive, got {N}")
    return Dim.of(N)


def _emit(text: str, path: str | None) -> None:
    if path:
        io.write_atomic(path, text)
    else:
        sys.stdout.write(text)


def cmd_gen(args) -> int:
    d = _dim(args.dim)
    kind = args.kind
    obj = None
    if kind == "X":
        M = build_X(d.N)
    elif kind == "Z":
        M = build_Z(d.N)
    elif kind == "D":
        if args.p is None:
            raise UsageError("--kind D needs --p p1,p2")
        M = displacement(d.N, _ints(args.p, 2, "p"))
    elif kind == "UF":
        if args.f is None:
            raise UsageError("--kind UF needs --f a,b,c,d")
        try:
            F = SL2(*_ints(args.f, 4, "f"), d.Nbar)
        except ValueError as exc:
            raise UsageError(str(exc))
        op = clifford_operator(d, F)
        if isinstance(op, AntiU):
            M = op.mat
            obj = {"conj": True}
        else:
            M = op
    else:
        M = change_of_basis(d)
    basis = "standard"
    if args.basis == "knomial" and kind != "T":
        M = to_knomial(np.asarray(M), d)
        basis = "knomial"
    if args.format == "csv":
        if obj is not None:
            raise UsageError("anti-unitaries can only be written as JSON")
        _emit(io.matrix_to_csv(M), args.out)
    else:
        payload = io.matrix_to_json(M, basis)
        payload.update(obj or {})
        _emit(io.dumps(payload), args.out)
    return 0


def cmd_verify_imprimitivity(args) -> int:
    d = _dim(args.dim)
    tol = _tolerance(args)
    rng = np.random.default_rng(args.seed)
    failures = 0
    lines = []
    for i in range(args.samples):
        F = random_symplectic(d.Nbar, rng)
        try:
            bm = block_structure(to_knomial(symplectic_unitary(d, F), d), d, tol)
            expected = eigenspace_perm(F, d)
            if bm.perm != expected:
                bad = sorted(src for src in expected if bm.perm[src] != expected[src])
                raise NotKNomial(f"permutation mismatch at {bad}", coords=bad)
            status = "ok"
        except NotKNomial as exc:
            failures += 1
            status = f"FAIL {exc}"
        lines.append(f"sample {i} F={F.rows} {status}")
    print(f"N={d.N} k={d.k} n={d.n} Nbar={d.Nbar} samples={args.samples} failures={failures}")
    for line in lines:
        print(line)
    return 1 if failures else 0


def _load_vector(path: str) -> tuple[np.ndarray, dict]:
    try:
        with open(path) as fh:
            obj = json.load(fh)
        meta = {}
        if "psi" in obj:
            meta = obj.get("meta", {})
            obj = obj["psi"]
        v, basis = io.vector_from_json(obj)
    except (OSError, json.JSONDecodeError, io.FormatError, TypeError, AttributeError) as exc:
        raise UsageError(f"cannot read vector from {path}: {exc}")
    if basis == "knomial":
        v = change_of_basis(Dim.of(len(v))) @ v
    return v, meta


def cmd_sic_verify(args) -> int:
    tol = _tolerance(args)
    psi, meta = _load_vector(args.input)
    nrm = np.linalg.norm(psi)
    if nrm == 0:
        raise UsageError("zero vector")
    try:
        cand = sic_defect(psi, meta)
    except NotNormalized:
        print(f"warning: input norm {nrm:.17g}, normalizing", file=sys.stderr)
        cand = sic_defect(psi / nrm, meta)
    N = cand.dim
    table = cand.overlaps.copy()
    table[0, 0] = np.nan
    vals = table[~np.isnan(table)]
    target = 1.0 / (N + 1)
    near = int(np.sum(np.abs(vals - target) < tol))
    print(f"dim {N}")
    print(f"defect {cand.defect:.6e}")
    print(f"worst_p {cand.worst_p[0]},{cand.worst_p[1]}")
    print(f"overlaps: min {vals.min():.12f} max {vals.max():.12f} target {target:.12f}")
    print(f"overlaps within tolerance: {near}/{len(vals)}")
    ok = cand.defect < tol
    print("PASS" if ok else "FAIL")
    return 0 if ok else 1


def cmd_sic_search(args) -> int:
    d = _dim(args.dim)
    tol = args.tol if args.tol is not None else _tolerance(args)
    if args.restarts < 1:
        raise UsageError("--restarts must be >= 1")
    cfg = SearchCfg(restarts=args.restarts, max_iters=args.max_iters, tol=tol, rng_seed=args.seed)
    records = [] if args.log else None
    code = 0
    try:
        cand = search_zauner(d, cfg, records) if args.zauner else search_fiducial(d, cfg, records)
    except NoConvergence as exc:
        cand = exc.best
        code = 1
        print(f"no convergence: {exc}", file=sys.stderr)
    cand.meta["zauner"] = bool(args.zauner)
    _emit(io.dumps(cand.to_json()), args.out)
    if args.log:
        io.write_atomic(args.log, "".join(io.dumps(r) for r in records))
    print(f"defect {cand.defect:.6e}", file=sys.stderr)
    return code


def cmd_dim8(args) -> int:
    s = _ints(args.s, 3, "s") if args.s is not None else None
    try:
        if args.orbit == "S2":
            cand = dim8_orbit_S2(Dim8Selector("S1", tuple(s) if s else None, args.r))
        else:
            cand = dim8_fiducial(Dim8Selector(args.orbit, tuple(s) if s else None, args.r))
    except ValueError as exc:
        raise UsageError(str(exc))
    _emit(io.dumps(cand.to_json()), args.out)
    return 0


def cmd_dim12_eval(args) -> int:
    tol = _tolerance(args)
    roots = [args.root] if args.root is not None else [0, 1, 2]
    cands = []
    for r in roots:
        if r not in (0, 1, 2):
            raise UsageError("--root must be 0, 1 or 2")
        c = dim12_fiducial_numeric(r, row_convention=args.row_convention)
        cands.append(c)
        print(f"root {r} t1={c.meta['t1']:.15f} defect {c.defect:.6e}")
    best = min(cands, key=lambda c: c.defect)
    if args.out:
        _emit(io.dumps(best.to_json()), args.out)
    return 0 if best.defect < tol else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tolerance", type=float, default=None,
                        help=f"verification tolerance (default ${ENV_TOL} or {DEFAULT_TOL})")
    parser = argparse.ArgumentParser(prog="knomial", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common], help="write an operator matrix")
    p.add_argument("--kind", choices=["X", "Z", "D", "UF", "T"], required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--p", help="displacement p1,p2")
    p.add_argument("--f", help="matrix entries a,b,c,d (row major)")
    p.add_argument("--basis", choices=["standard", "knomial"], default="standard")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("verify-imprimitivity", parents=[common],
                       help="check random Clifford unitaries are k-nomial")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify_imprimitivity)

    p = sub.add_parser("sic-verify", parents=[common], help="SIC defect of a vector file")
    p.add_argument("--input", required=True)
    p.set_defaults(func=cmd_sic_verify)

    p = sub.add_parser("sic-search", parents=[common], help="numerical fiducial search")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--max-iters", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--zauner", action="store_true", help="restrict to Zauner eigenspaces")
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--out")
    p.add_argument("--log", help="line-delimited JSON search log")
    p.set_defaults(func=cmd_sic_search)

    p = sub.add_parser("dim8", parents=[common], help="closed-form dimension-8 fiducial")
    p.add_argument("--orbit", choices=["S0", "S1", "S2"], required=True)
    p.add_argument("--s", help="signs s1,s2,s3 (S1, S2)")
    p.add_argument("--r", type=int, help="phase index 0..3 (S0)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_dim8)

    p = sub.add_parser("dim12-eval", parents=[common],
                       help="evaluate the dimension-12 fiducial over cubic roots")
    p.add_argument("--root", type=int)
    p.add_argument("--row-convention", action="store_true",
                   help="apply the printed generators to column vectors as-is")
    p.add_argument("--out")
    p.set_defaults(func=cmd_dim12_eval)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
