"""Command-line entry point.  Every invocation prints exactly one JSON document.

Exit status: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction

from .bounds import CONVENTIONS, NORM, BoundParams, as_fraction, default_precision, sin1_bound, thm1_bound, thm2_bound, thm2_constants
from .divisors import DivisorClass, c1_standard, degree_int, gael_check, pullback
from .generate import random_order, random_pipeline_phi
from .matrix import MorphMatrix, adjugate, dual_isogeny, maximal_minors
from .order import OrderDesc, elem_from_json, try_div
from .pipeline import SCHEMA_VERSION, PipelineError, PipelineInput, run_pipeline
from .saturation import all_minors_nonzero, saturate_minors, transform_for_H
from .torsion import DEFAULT_BUDGET, BudgetExceeded, count_kernel
from .verify import run_suite


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _emit(doc: dict, stream=None):
    doc = {"schema_version": SCHEMA_VERSION, **doc}
    print(json.dumps(doc, sort_keys=True, indent=2), file=stream or sys.stdout)


def _load(args) -> dict:
    if args.input is None:
        raise UsageError("--input/-i is required for this subcommand")
    try:
        if args.input == "-":
            return json.load(sys.stdin)
        with open(args.input) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"--input: cannot read {args.input}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"--input: invalid JSON ({exc})") from exc


def _matrix(data: dict, key: str = "phi") -> MorphMatrix:
    # accept either {"phi": {...}} or a bare matrix document
    if key in data:
        return MorphMatrix.from_json(data[key])
    return MorphMatrix.from_json(data)


# --- subcommands -------------------------------------------------------------


def cmd_order(args):
    data = _load(args)
    order = OrderDesc.from_json(data.get("order", {"kind": "rational"}))
    op = args.op or data.get("op")
    x = elem_from_json(data["x"], order)
    if op == "norm":
        return {"order": order.to_json(), "norm": str(x.norm())}
    if op == "conj":
        return {"order": order.to_json(), "result": x.conj().to_json()}
    y = elem_from_json(data["y"], order)
    if op == "add":
        res = x + y
    elif op == "mul":
        res = x * y
    elif op == "div":
        res = try_div(x, y)
    else:
        raise UsageError(f"--op: unknown operation {op!r}")
    return {"order": order.to_json(), "result": res.to_json()}


def cmd_det(args):
    m = _matrix(_load(args))
    out = {"rank": m.rank()}
    if m.is_square:
        d = m.det()
        out.update(det=d.to_json(), ker_cardinality=str(d.norm()))
    else:
        out["maximal_minors"] = [
            {"columns": list(c), "value": v.to_json()} for c, v in maximal_minors(m).items()
        ]
    return out


def cmd_dual(args):
    m = _matrix(_load(args))
    dr = dual_isogeny(m)
    out = {"alpha": str(dr.alpha), "dual": dr.dual.to_json()}
    if args.check_kernel:
        out["kernel_count"] = str(count_kernel(m, dr.alpha, args.budget))
        out["det_norm"] = str(m.det().norm())
    return out


def cmd_saturate(args):
    data = _load(args)
    if args.for_H is not None:
        phi = _matrix(data)
        T, T_inv, sat = transform_for_H(phi, args.for_H)
        N = phi.rows
        tail = adjugate(phi @ T).select_columns(range(N - args.for_H, N))
        return {
            "J": list(sat.perm),
            "T": T.to_json(),
            "T_inv": T_inv.to_json(),
            "trace": [r.to_json() for r in sat.trace],
            "verified": all_minors_nonzero(tail),
            "saturation": sat.to_json(),
        }
    psi = _matrix(data, "psi")
    sat = saturate_minors(psi)
    order = psi.order
    result = psi @ sat.J(order) @ sat.T(order)
    return {
        "J": list(sat.perm),
        "T": sat.T(order).to_json(),
        "trace": [r.to_json() for r in sat.trace],
        "verified": all_minors_nonzero(result),
        "saturation": sat.to_json(),
        "result": result.to_json(),
    }


def cmd_degree(args):
    data = _load(args)
    if "psi" in data:
        psi = MorphMatrix.from_json(data["psi"])
        cls = pullback(c1_standard(psi.rows, psi.order), psi)
    else:
        order = OrderDesc.from_json(data.get("order", {"kind": "rational"}))
        n = int(data["n"])
        rows = [([elem_from_json(x, order) for x in r["row"]], int(r.get("mult", 1))) for r in data["rows"]]
        cls = DivisorClass(n, order, rows)
    return {"degree": str(degree_int(cls))}


def cmd_gael(args):
    B = _matrix(_load(args), "B")
    g = gael_check(B)
    return {"lhs": str(g.lhs), "rhs": str(g.rhs), "equal": g.equal}


def _params(args) -> BoundParams:
    missing = [f"--{k}" for k in ("N", "n", "d") if getattr(args, k) is None]
    if missing:
        raise UsageError(f"missing required flag(s): {', '.join(missing)}")
    return BoundParams(args.N, args.n, args.d, args.eta, args.c0, args.convention)


def cmd_bound(args):
    params = _params(args)
    prec = args.precision
    if args.kind == "constants":
        return {"params": params.to_json(), "chain": thm2_constants(params, prec).to_json()}
    if args.degV is None:
        raise UsageError("--degV is required")
    if args.kind == "sin1":
        res = sin1_bound(args.degV, params, prec)
    elif args.kind == "thm1":
        if args.degA is None:
            raise UsageError("--degA is required for --kind thm1")
        res = thm1_bound(args.degA, args.degV, params, prec)
    else:
        if args.degH is None:
            raise UsageError("--degH is required")
        res = thm2_bound(args.degH, args.degV, params, args.translate, prec)
    return {"params": params.to_json(), **res.to_json()}


def cmd_pipeline(args):
    if args.random is not None:
        N, n = args.random
        rng = random.Random(args.seed)
        order = random_order(rng)
        phi = random_pipeline_phi(N, n, order, rng)
        inp = PipelineInput(phi, n, args.d, args.degV, args.eta, args.c0, args.convention, args.translate)
    else:
        data = _load(args)
        inp = PipelineInput.from_json(data)
        # flags override the file
        for attr, val in (("d", args.d), ("deg_V", args.degV)):
            if val is not None:
                setattr(inp, attr, val)
    report = run_pipeline(inp, args.precision)
    return {"ok": report.ok, **json.loads(report.dumps())}


def cmd_verify(args):
    return run_suite(args.seed, args.budget, args.trials)


# --- parser ------------------------------------------------------------------


def _frac(text: str) -> Fraction:
    try:
        return as_fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="isocalc", description="Exact isogeny and lower-bound computations over End(E).")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("-i", "--input", help="JSON input file, '-' for stdin")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="max points enumerated by oracles")
        sp.add_argument("--precision", type=int, default=None, help="bits (default: $ISOCALC_PRECISION or 128)")

    def bound_flags(sp):
        sp.add_argument("--N", type=int)
        sp.add_argument("--n", type=int)
        sp.add_argument("--d", type=int)
        sp.add_argument("--eta", type=_frac, default=Fraction(1, 100))
        sp.add_argument("--c0", type=_frac, default=Fraction(1))
        sp.add_argument("--degH", type=_frac)
        sp.add_argument("--degV", type=_frac)
        sp.add_argument("--convention", choices=CONVENTIONS, default=NORM)
        sp.add_argument("--translate", action="store_true", help="H is a translate: halve the constant")

    sp = sub.add_parser("order", help="arithmetic in the order")
    common(sp)
    sp.add_argument("--op", choices=["add", "mul", "conj", "norm", "div"])
    sp.set_defaults(fn=cmd_order)

    sp = sub.add_parser("det", help="determinant, rank, maximal minors")
    common(sp)
    sp.set_defaults(fn=cmd_det)

    sp = sub.add_parser("dual", help="dual isogeny and minimal alpha")
    common(sp)
    sp.add_argument("--check-kernel", action="store_true", help="also count the kernel by enumeration")
    sp.set_defaults(fn=cmd_dual)

    sp = sub.add_parser("saturate", help="make all maximal minors nonzero")
    common(sp)
    sp.add_argument("--for-H", type=int, metavar="n", help="treat input as phi and build T for the last n rows")
    sp.set_defaults(fn=cmd_saturate)

    sp = sub.add_parser("degree", help="self-intersection degree of a divisor class")
    common(sp)
    sp.set_defaults(fn=cmd_degree)

    sp = sub.add_parser("gael-check", help="tensor-degree identity for a row family B")
    common(sp)
    sp.set_defaults(fn=cmd_gael)

    sp = sub.add_parser("bound", help="certified lower bound")
    common(sp)
    bound_flags(sp)
    sp.add_argument("--kind", choices=["thm2", "thm1", "sin1", "constants"], default="thm2")
    sp.add_argument("--degA", type=_frac, help="ambient degree for --kind thm1")
    sp.set_defaults(fn=cmd_bound)

    sp = sub.add_parser("pipeline", help="full construction from an isogeny presenting H")
    common(sp)
    bound_flags(sp)
    sp.add_argument("--random", type=int, nargs=2, metavar=("N", "n"), help="use a seeded random phi")
    sp.set_defaults(fn=cmd_pipeline)

    sp = sub.add_parser("verify", help="randomized oracle suite")
    common(sp)
    sp.add_argument("--trials", type=int, default=40)
    sp.set_defaults(fn=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.precision is None:
            args.precision = default_precision()
        if args.precision < 8:
            raise UsageError("--precision: need at least 8 bits")
        doc = args.fn(args)
    except UsageError as exc:
        _emit({"ok": False, "error": "usage", "message": str(exc)})
        return 2
    except PipelineError as exc:
        _emit({"ok": False, "error": type(exc.cause).__name__, "stage": exc.stage, "message": str(exc.cause)})
        return 1
    except (ValueError, ArithmeticError, KeyError, BudgetExceeded) as exc:
        _emit({"ok": False, "error": type(exc).__name__, "message": str(exc)})
        return 1
    doc = {"command": args.command, "ok": True, **doc}
    _emit(doc)
    return 0 if doc["ok"] else 1


if __name__ == "__main__":
    sys.exit(main())
