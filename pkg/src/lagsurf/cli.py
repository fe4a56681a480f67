"""Command-line front end.

Exit codes: 0 success / accept, 1 reject or failed check, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path
from typing import Callable, Iterable, Optional

from . import congruence as cg
from .certificate import ConstructionCertificate, GenerationError, generate, verify, verify_text
from .lattice import (
    IntegralClass,
    LatticeError,
    Mod2Class,
    RationalManifold,
    canonical_class,
    enumerate_mod2_classes,
    lift,
    pairing,
)
from .wavefront import ParseError, find_tangencies
from .wavefront.fixtures import resolve
from .wavefront.tangency import DEFAULT_GRID, TSV_HEADER

DEFAULT_CAP = 16
REPORT_HEADER = "#class\tP_residue\tP\tminimal_genus\tmax_euler\tcertificate"


class UsageError(Exception):
    pass


def report_row(A: Mod2Class) -> tuple[list[str], Optional[ConstructionCertificate]]:
    X = A.manifold
    P = cg.pontrjagin_square(A)
    if A.is_zero:
        cert = generate(X, A, -4)
        note = "zero class: chi in {-4,-8,...}; Klein bottle excluded; " + cert.summary()
        return [str(A), str(P.residue), str(P.representative), "-", "-4", note], cert
    best = P.representative
    try:
        cert = generate(X, A, best)
        summary = cert.summary()
    except GenerationError as e:
        cert = None
        summary = f"unattained ({e.reason})"
    if cg.sphere_advisory(A):
        summary += "; sphere class (chi=2)"
    return [str(A), str(P.residue), str(best), str(cg.minimal_genus(A)), str(best), summary], cert


def _emit_rows(rows: Iterable[tuple[list[str], Optional[ConstructionCertificate]]], as_json: bool, out) -> None:
    if as_json:
        docs = []
        for fields, cert in rows:
            docs.append({
                "class": fields[0],
                "P_residue": int(fields[1]),
                "P": int(fields[2]),
                "certificate": cert.to_json() if cert is not None else None,
            })
        out.write(json.dumps(docs, indent=2) + "\n")
        return
    out.write(REPORT_HEADER + "\n")
    for fields, _ in rows:
        out.write("\t".join(fields) + "\n")


def _manifold(text: str) -> RationalManifold:
    try:
        return RationalManifold.parse(text)
    except LatticeError as e:
        raise UsageError(str(e)) from None


def _class(X: RationalManifold, text: str) -> Mod2Class:
    try:
        return Mod2Class.parse(X, text)
    except LatticeError as e:
        raise UsageError(str(e)) from None


def cmd_classify(args, out) -> int:
    X = _manifold(args.manifold)
    A = _class(X, args.cls)
    _emit_rows([report_row(A)], args.json, out)
    return 0


def cmd_certificate(args, out) -> int:
    X = _manifold(args.manifold)
    A = _class(X, args.cls)
    try:
        cert = generate(X, A, args.chi)
    except (GenerationError, cg.NotNonorientableEuler) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    text = cert.dumps()
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        out.write(text)
    return 0


def cmd_verify(args, out) -> int:
    try:
        text = Path(args.path).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read {args.path}: {e}") from None
    verdict = verify_text(text)
    out.write(str(verdict) + "\n")
    return 0 if verdict.accepted else 1


def cmd_enumerate(args, out) -> int:
    if args.manifold:
        X = _manifold(args.manifold)
    elif args.k is not None:
        X = RationalManifold.cp2_blowup(args.k)
    else:
        raise UsageError("enumerate needs --k or --manifold")
    if not X.is_product and X.k > args.cap:
        raise UsageError(f"k={X.k} exceeds the cap {args.cap}")
    rows = (report_row(A) for A in enumerate_mod2_classes(X, include_zero=args.include_zero))
    _emit_rows(rows, args.json, out)
    return 0


def _parse_box(text: str):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"bad box {text!r}") from None
    if len(vals) == 2:
        return (vals[0], vals[1]), (vals[0], vals[1])
    if len(vals) == 4:
        return (vals[0], vals[1]), (vals[2], vals[3])
    raise UsageError("box is lo,hi (square) or x1lo,x1hi,x2lo,x2hi")


def cmd_wavefront(args, out) -> int:
    box = _parse_box(args.box)
    try:
        h1, h2 = resolve(args.h1), resolve(args.h2)
    except ParseError as e:
        raise UsageError(str(e)) from None
    out.write(TSV_HEADER + "\n")
    for t in find_tangencies(h1, h2, box, grid=args.grid):
        out.write(t.tsv() + "\n")
    return 0


# -- selftest ----------------------------------------------------------------

def _selftest_checks(kmax: int, seed: int) -> list[tuple[str, Callable[[], list[str]]]]:
    rng = random.Random(seed)

    def rand_class(k):
        X = RationalManifold.cp2_blowup(k)
        return IntegralClass(X, tuple(rng.randint(-5, 5) for _ in range(X.b2)))

    def bilinear():
        bad = []
        for _ in range(1000):
            k = rng.randint(0, min(kmax, 10))
            x, y, z = rand_class(k), rand_class(k), rand_class(k)
            n = rng.randint(-4, 4)
            if pairing(x, y) != pairing(y, x) or pairing(x + n * y, z) != pairing(x, z) + n * pairing(y, z):
                bad.append(f"{x} {y} {z}")
        return bad

    def wu():
        bad = []
        for k in range(kmax + 1):
            X = RationalManifold.cp2_blowup(k)
            K = canonical_class(X)
            for A in enumerate_mod2_classes(X, include_zero=True):
                z = lift(A)
                if (pairing(z, z) - pairing(K, z)) % 2:
                    bad.append(str(A))
        return bad

    def lift_invariance():
        bad = []
        for _ in range(10000):
            k = rng.randint(0, min(kmax, 10))
            X = RationalManifold.cp2_blowup(k)
            z = lift(Mod2Class(X, tuple(rng.randint(0, 1) for _ in range(X.b2))))
            w = z + 2 * rand_class(k)
            if (pairing(w, w) - pairing(z, z)) % 4:
                bad.append(str(w))
        return bad

    def refinement():
        bad = []
        for k in range(min(kmax, 6) + 1):
            X = RationalManifold.cp2_blowup(k)
            classes = list(enumerate_mod2_classes(X, include_zero=True))
            for A in classes:
                for B in classes:
                    lhs = cg.pontrjagin_square(A + B).residue
                    rhs = cg.pontrjagin_square(A).residue + cg.pontrjagin_square(B).residue + 2 * (pairing(lift(A), lift(B)) % 2)
                    if (lhs - rhs) % 4:
                        bad.append(f"{A} {B}")
        return bad

    def audin_parity():
        bad = []
        for k in range(kmax + 1):
            for A in enumerate_mod2_classes(RationalManifold.cp2_blowup(k), include_zero=True):
                for chi in range(-10, 2):
                    if cg.audin_check(A, chi) and not cg.immersion_parity_check(A, chi):
                        bad.append(f"{A} chi={chi}")
        return bad

    def zt():
        bad = []
        for t in range(101):
            Z = cg.zt_class(t, 2 * t + 2)
            if not cg.sphere_class_check(Z.manifold, Z):
                bad.append(f"t={t}")
        return bad

    def roundtrip():
        bad = []
        for k in range(kmax + 1):
            X = RationalManifold.cp2_blowup(k)
            for A in enumerate_mod2_classes(X):
                best = cg.pontrjagin_square(A).representative
                for chi in (best, best - 4):
                    try:
                        cert = generate(X, A, chi)
                    except GenerationError as e:
                        note = " (Guillou-Marin obstructed)" if cg.characteristic_obstruction(A, chi) else ""
                        bad.append(f"{X} {A} chi={chi}: {e.reason}{note}")
                        continue
                    v = verify(ConstructionCertificate.loads(cert.dumps()))
                    if not v.accepted or cert.claim.crosscaps != 2 - chi:
                        bad.append(f"{X} {A} chi={chi}: {v}")
        return bad

    def product():
        X = RationalManifold.s2xs2()
        bad = []
        for text, chi in (("B+F", 2), ("B+F", -2), ("F", 0), ("B", 0), ("0", -4)):
            try:
                if not verify(generate(X, Mod2Class.parse(X, text), chi)).accepted:
                    bad.append(f"{text} chi={chi}")
            except GenerationError as e:
                bad.append(f"{text} chi={chi}: {e.reason}")
        if cg.realizable_nonorientable(X, Mod2Class.zero(X), 0).realizable:
            bad.append("zero class Klein bottle accepted")
        return bad

    return [
        ("pairing symmetric and bilinear", bilinear),
        ("Wu: A.A = K.A mod 2", wu),
        ("Pontrjagin square independent of lift", lift_invariance),
        ("quadratic refinement", refinement),
        ("Audin congruence implies immersion parity", audin_parity),
        ("Z_t: Z.K = 0 and Z.Z = -2 for t <= 100", zt),
        ("certificate round trip at max Euler and max-4", roundtrip),
        ("S2xS2 cases", product),
    ]


def cmd_selftest(args, out) -> int:
    if args.kmax > args.cap:
        raise UsageError(f"kmax={args.kmax} exceeds the cap {args.cap}")
    failed = 0
    for name, check in _selftest_checks(args.kmax, args.seed):
        bad = check()
        if bad:
            failed += 1
            out.write(f"FAIL\t{name}\t{len(bad)} failure(s)\n")
            for b in bad[:20]:
                out.write(f"\t{b}\n")
        else:
            out.write(f"PASS\t{name}\n")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lagsurf", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", help="Pontrjagin square, minimal genus and a certificate summary for one class")
    c.add_argument("--manifold", required=True, help="cp2+k or s2xs2")
    c.add_argument("--class", dest="cls", required=True, help="e.g. H+E1+E3, B+F, 0")
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_classify)

    c = sub.add_parser("certificate", help="emit a construction certificate")
    c.add_argument("--manifold", required=True)
    c.add_argument("--class", dest="cls", required=True)
    c.add_argument("--chi", type=int, required=True)
    c.add_argument("--out", help="output path (default stdout)")
    c.set_defaults(func=cmd_certificate)

    c = sub.add_parser("verify", help="replay a certificate file")
    c.add_argument("path")
    c.set_defaults(func=cmd_verify)

    c = sub.add_parser("enumerate", help="report every class of a manifold")
    c.add_argument("--k", type=int)
    c.add_argument("--manifold")
    c.add_argument("--include-zero", action="store_true")
    c.add_argument("--cap", type=int, default=DEFAULT_CAP)
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_enumerate)

    c = sub.add_parser("selftest", help="run the invariant sweep")
    c.add_argument("--kmax", type=int, default=6)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--cap", type=int, default=DEFAULT_CAP)
    c.set_defaults(func=cmd_selftest)

    c = sub.add_parser("wavefront", help="tangencies of two generating functions")
    c.add_argument("--h1", required=True, help="whitney+, whitney-, deformed-, const:<expr> or an expression")
    c.add_argument("--h2", required=True)
    c.add_argument("--box", required=True, help="lo,hi or x1lo,x1hi,x2lo,x2hi")
    c.add_argument("--grid", type=int, default=DEFAULT_GRID)
    c.set_defaults(func=cmd_wavefront)
    return p


def _glue_values(argv: list[str]) -> list[str]:
    # argparse mistakes "--box -0.5,0.5" for two options
    out = []
    it = iter(argv)
    for a in it:
        if a == "--box":
            nxt = next(it, None)
            out.append(a if nxt is None else f"--box={nxt}")
        else:
            out.append(a)
    return out


def main(argv: Optional[list[str]] = None, out=None) -> int:
    out = out or sys.stdout
    argv = _glue_values(list(sys.argv[1:] if argv is None else argv))
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, out)
    except UsageError as e:
        print(f"{parser.prog}: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
