"""The extendkit command line: every operation behind one binary with
JSON on stdout, diagnostics on stderr, reproducible seeds, and the exit
contract 0 = extendible/accept/valid, 1 = refuted (witness attached),
2 = usage or input error, 3 = resource cap."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import SCHEMA_VERSION, convex, lp, oracle, subadditive, submodular, testers, xos
from .errors import CertificateError, ExtendkitError, InputError, ResourceCapError
from .ground import (
    ConvexPartialFunction,
    PartialSetFunction,
    parse_partial_function,
    parse_rational,
    serialize,
    to_jsonable,
)

DEFAULT_SEED = 20240917

EXIT_OK = 0
EXIT_REFUTED = 1
EXIT_USAGE = 2
EXIT_CAP = 3

EXTEND_CLASSES = ("subadditive", "subadditive-nonmonotone", "xos", "submodular", "convex")
APPROX_CLASSES = ("subadditive", "xos", "submodular", "convex")
EVAL_CLASSES = ("xos-roof", "convex-roof", "convex-tilde")
TEST_CLASSES = ("subadditive", "xos", "subadditive-nonmonotone")


def _emit(doc) -> None:
    sys.stdout.write(json.dumps(doc, separators=(",", ":")) + "\n")


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _load_set_function(path: str, klass: str | None = None) -> PartialSetFunction:
    h = parse_partial_function(_read(path), klass)
    if not isinstance(h, PartialSetFunction):
        raise InputError(f"{path} holds a convex instance; a set function is needed")
    return h


def _load_convex(path: str) -> ConvexPartialFunction:
    h = parse_partial_function(_read(path))
    if not isinstance(h, ConvexPartialFunction):
        raise InputError(f"{path} holds a set function; a convex instance is needed")
    return h


def _write_or_emit(doc, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(doc, separators=(",", ":")) + "\n")
        print(f"wrote {out_path}", file=sys.stderr)
    else:
        _emit(doc)


# ---------------------------------------------------------------------------
# subcommands


def cmd_extend(args) -> int:
    klass = args.klass
    if klass == "convex":
        ch = _load_convex(args.input)
        violation = convex.extend_convex(ch)
        if violation is None:
            _emit({"verdict": "extendible"})
            return EXIT_OK
        _emit({"verdict": "not_extendible", "witness": to_jsonable(violation)})
        return EXIT_REFUTED
    h = _load_set_function(args.input, klass if klass != "submodular" else None)
    if klass == "subadditive":
        out = subadditive.extend_monotone_subadditive(h)
    elif klass == "subadditive-nonmonotone":
        out = subadditive.extend_general_subadditive(h)
    elif klass == "xos":
        w = xos.extend_xos(h)
        if isinstance(w, xos.XosExtendible):
            _emit({"verdict": "extendible", "vectors": to_jsonable(w)["vectors"]})
            return EXIT_OK
        _emit({"verdict": "not_extendible", "witness": to_jsonable(w)})
        return EXIT_REFUTED
    else:
        res = submodular.extend_submodular(h, args.cap)
        if res.extendible:
            doc = {"verdict": "extendible", "kind": res.kind}
            doc["family_values"] = {
                json.dumps(list(_els(s))): str(v) for s, v in sorted(res.values.items())
            }
            _emit(doc)
            return EXIT_OK
        _emit(
            {
                "verdict": "not_extendible",
                "certificate": to_jsonable(res.certificate),
            }
        )
        return EXIT_REFUTED
    if isinstance(out, subadditive.Extendible):
        _emit({"verdict": "extendible"})
        return EXIT_OK
    _emit({"verdict": "not_extendible", "witness": to_jsonable(out.violation)})
    return EXIT_REFUTED


def _els(mask):
    from .ground import elements

    return elements(mask)


def cmd_approx(args) -> int:
    klass = args.klass
    if klass == "convex":
        alpha = convex.approx_convex(_load_convex(args.input), audit=args.audit)
        _emit({"alpha": str(alpha)})
        return EXIT_OK
    h = _load_set_function(args.input, klass if klass != "submodular" else None)
    if klass == "subadditive":
        alpha, witness = subadditive.approx_monotone_subadditive_exact(h)
        _emit({"alpha": str(alpha), "witness": to_jsonable(witness)})
    elif klass == "xos":
        alpha, vectors = xos.approx_xos(h)
        _emit(
            {
                "alpha": str(alpha),
                "vectors": [[str(c) for c in w] for w in vectors],
            }
        )
    else:
        alpha = submodular.approx_submodular(h, args.cap)
        _emit({"alpha": str(alpha)})
    return EXIT_OK


def _parse_at_set(text: str, m: int) -> int:
    doc = json.loads(text)
    if not isinstance(doc, list) or not all(isinstance(i, int) for i in doc):
        raise InputError(f"--at must be a JSON array of element indices, got {text!r}")
    if any(i < 0 or i >= m for i in doc):
        raise InputError(f"--at indices must lie in [0,{m})")
    mask = 0
    for i in doc:
        mask |= 1 << i
    return mask


def _parse_at_vector(text: str, m: int):
    doc = json.loads(text)
    if not isinstance(doc, list) or len(doc) != m:
        raise InputError(f"--at must be a JSON array of {m} rationals")
    return tuple(parse_rational(str(c)) for c in doc)


def cmd_eval(args) -> int:
    if args.klass == "xos-roof":
        h = _load_set_function(args.input, "xos")
        mask = _parse_at_set(args.at, h.m)
        out = xos.eval_xos_roof(h, mask)
        if out is None:
            _emit({"status": "uncoverable", "value": None})
            return EXIT_OK
        value, weights = out
        _emit(
            {
                "status": "ok",
                "value": str(value),
                "weights": [
                    {"set": list(_els(s)), "weight": str(w)} for s, w in weights
                ],
            }
        )
        return EXIT_OK
    ch = _load_convex(args.input)
    x = _parse_at_vector(args.at, ch.m)
    if args.klass == "convex-roof":
        value = convex.roof_value(ch, x)
        if value is None:
            _emit({"status": "outside_hull", "value": None})
        else:
            _emit({"status": "ok", "value": str(value)})
        return EXIT_OK
    value, _vertices = convex.eval_tilde(ch, x, max_dim=args.max_dim)
    _emit({"status": "ok", "value": str(value)})
    return EXIT_OK


def cmd_certify(args) -> int:
    h = _load_set_function(args.input)
    res = submodular.extend_submodular(h, args.cap)
    if res.extendible:
        _emit({"verdict": "extendible", "kind": res.kind})
        return EXIT_OK
    _write_or_emit(to_jsonable(res.certificate), args.out)
    if args.out:
        _emit({"verdict": "not_extendible", "certificate_path": args.out})
    return EXIT_REFUTED


def cmd_verify_cert(args) -> int:
    h = _load_set_function(args.input)
    cert = submodular.parse_square_certificate(_read(args.cert), h)
    ok = submodular.verify_square_certificate(cert, h)
    _emit({"valid": bool(ok)})
    return EXIT_OK if ok else EXIT_REFUTED


def cmd_rewrite_cert(args) -> int:
    h = _load_set_function(args.input)
    cert = submodular.parse_square_certificate(_read(args.cert), h)
    try:
        rewritten = submodular.lattice_rewrite(cert, h)
    except CertificateError as exc:
        print(f"certificate rejected: {exc}", file=sys.stderr)
        _emit({"valid": False})
        return EXIT_REFUTED
    doc = to_jsonable(rewritten)
    doc["sizes"] = {"input": cert.size(), "output": rewritten.size()}
    _write_or_emit(doc, args.out)
    return EXIT_OK


def cmd_vertices(args) -> int:
    ch = _load_convex(args.input)
    verts = convex.enumerate_dual_vertices(ch)
    _emit({"vertices": [to_jsonable(v) for v in verts]})
    return EXIT_OK


_TESTERS = {
    "subadditive": testers.test_subadditive,
    "xos": testers.test_xos,
    "subadditive-nonmonotone": testers.test_nonmonotone_subadditive,
}


def _run_trial(table_path: str, klass: str, eps_str: str, seed: int):
    table = oracle.parse_full_table(_read(table_path))
    fn = _TESTERS[klass]
    report = fn(testers.FunctionOracle.from_table(table), Fraction(eps_str), seed)
    return to_jsonable(report)


def cmd_test(args) -> int:
    eps = Fraction(args.epsilon)
    table = oracle.parse_full_table(_read(args.oracle))
    if any(v < 0 for v in table.values):
        raise InputError("tester oracles must be nonnegative")
    fn = _TESTERS[args.klass]
    if args.trials <= 1:
        report = fn(testers.FunctionOracle.from_table(table), eps, args.seed)
        _emit(to_jsonable(report))
        return EXIT_OK if report.verdict == "accept" else EXIT_REFUTED
    seeds = [args.seed + i for i in range(args.trials)]
    if args.jobs > 1:
        from multiprocessing import Pool

        with Pool(args.jobs) as pool:
            reports = pool.starmap(
                _run_trial,
                [(args.oracle, args.klass, str(eps), s) for s in seeds],
            )
    else:
        reports = [
            _run_trial(args.oracle, args.klass, str(eps), s) for s in seeds
        ]
    rejections = sum(1 for r in reports if r["verdict"] == "reject")
    _emit(
        {
            "trials": args.trials,
            "rejections": rejections,
            "seed": args.seed,
            "reports": reports,
        }
    )
    return EXIT_REFUTED if rejections else EXIT_OK


def cmd_oracle(args) -> int:
    h = _load_set_function(args.input)
    ok = oracle.full_domain_extend(h, args.klass)
    _emit({"extendible": bool(ok)})
    return EXIT_OK if ok else EXIT_REFUTED


def cmd_gen(args) -> int:
    import random as _random

    rng = _random.Random(args.seed)
    if args.kind == "partial":
        h = oracle.random_partial_function(
            args.m, args.n, (args.lo, args.hi), rng, positive=args.positive
        )
        _emit(json.loads(serialize(h)))
    elif args.kind == "antichain":
        fam = oracle.random_antichain(args.m, args.n, rng)
        h = PartialSetFunction(
            args.m,
            tuple((s, oracle.random_rational(rng, args.lo, args.hi)) for s in fam),
        )
        _emit(json.loads(serialize(h)))
    else:
        cert, h = oracle.random_valid_square_certificate(args.m, rng)
        _emit({"certificate": to_jsonable(cert), "function": json.loads(serialize(h))})
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="extendkit",
        description="exact extension decisions, factors, and certificates "
        "for subadditive, XOS, submodular, and convex partial functions",
    )
    p.add_argument(
        "--version", action="version", version=f"extendkit schema {SCHEMA_VERSION}"
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, cap=False):
        sp.add_argument("--input", required=True, help="instance JSON path")
        sp.add_argument(
            "--debug-lp", action="store_true", help="dump simplex pivots to stderr"
        )
        if cap:
            sp.add_argument(
                "--cap",
                type=int,
                default=submodular.DEFAULT_CLOSURE_CAP,
                help="lattice-closure size cap",
            )

    sp = sub.add_parser("extend", help="decide extendibility")
    sp.add_argument("--class", dest="klass", required=True, choices=EXTEND_CLASSES)
    common(sp, cap=True)
    sp.set_defaults(fn=cmd_extend)

    sp = sub.add_parser("approx", help="optimal multiplicative factor")
    sp.add_argument("--class", dest="klass", required=True, choices=APPROX_CLASSES)
    sp.add_argument(
        "--audit",
        action="store_true",
        help="cross-check the convex closed form against the bisection path",
    )
    common(sp, cap=True)
    sp.set_defaults(fn=cmd_approx)

    sp = sub.add_parser("eval", help="evaluate a roof or the canonical extension")
    sp.add_argument("--class", dest="klass", required=True, choices=EVAL_CLASSES)
    sp.add_argument("--at", required=True, help="JSON point, e.g. [0,2] or [\"1/2\"]")
    sp.add_argument(
        "--max-dim",
        type=int,
        default=convex.EVAL_TILDE_MAX_DIM,
        help="dimension guard for vertex enumeration",
    )
    common(sp)
    sp.set_defaults(fn=cmd_eval)

    sp = sub.add_parser("certify", help="extract a submodular non-extension certificate")
    sp.add_argument("--out", help="write the certificate JSON here")
    common(sp, cap=True)
    sp.set_defaults(fn=cmd_certify)

    sp = sub.add_parser("verify-cert", help="check a square certificate")
    sp.add_argument("--cert", required=True)
    common(sp)
    sp.set_defaults(fn=cmd_verify_cert)

    sp = sub.add_parser("rewrite-cert", help="rewrite a certificate into the closure")
    sp.add_argument("--cert", required=True)
    sp.add_argument("--out")
    common(sp)
    sp.set_defaults(fn=cmd_rewrite_cert)

    sp = sub.add_parser("vertices", help="enumerate dual-polyhedron vertices")
    common(sp)
    sp.set_defaults(fn=cmd_vertices)

    sp = sub.add_parser("test", help="run a property tester against an oracle table")
    sp.add_argument("--class", dest="klass", required=True, choices=TEST_CLASSES)
    sp.add_argument("--oracle", required=True, help="full table JSON path")
    sp.add_argument("--epsilon", required=True)
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--trials", type=int, default=1)
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(fn=cmd_test)

    sp = sub.add_parser("oracle", help="full-domain LP ground truth (small m)")
    sp.add_argument("--class", dest="klass", required=True, choices=oracle.CLASSES)
    common(sp)
    sp.set_defaults(fn=cmd_oracle)

    sp = sub.add_parser("gen", help="random instances")
    sp.add_argument("--kind", required=True, choices=("partial", "antichain", "cert"))
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--n", type=int, default=4)
    sp.add_argument("--lo", type=int, default=0)
    sp.add_argument("--hi", type=int, default=10)
    sp.add_argument("--positive", action="store_true")
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.set_defaults(fn=cmd_gen)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "debug_lp", False):
        lp.DEBUG = True
    try:
        return args.fn(args)
    except ResourceCapError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (InputError, OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CertificateError as exc:
        print(f"certificate error: {exc}", file=sys.stderr)
        return EXIT_REFUTED
    except ExtendkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
