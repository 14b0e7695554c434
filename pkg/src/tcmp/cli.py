"""
Command-line front end.

Moments files are JSON documents::

    {"degree": 6,
     "entries": [{"i": 0, "j": 0, "re": 1.0, "im": 0.0}, ...],
     "relation": {"k": 2, "coefficients": [{"n": 0, "m": 1, "re": 3.0, "im": 0.0}, ...]}}

holding the upper triangle ``i <= j``; measure files are
``{"atoms": [{"re": ..., "im": ..., "weight": ...}, ...]}``.
"""

from __future__ import annotations

import argparse
import ast
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import CubicParams, compute_xi, cubic_region, harmonic_cubic_zeros
from .errors import InconsistentExtension, RelationViolated, TcmpError
from .moment_matrix import build, psd_check
from .polynomials import ZBAR, BivarPoly, Z, monomials
from .rdis import MEMBERSHIP_TOL, MomentTable
from .solver import AtomicMeasure, ColumnRelation, Status, check_cubic_conditions, solve_table

EXIT_OK = 0
EXIT_MALFORMED = 2
EXIT_INFEASIBLE = 3
EXIT_INDETERMINATE = 4
EXIT_RELATION = 5

STATUS_EXIT = {
    Status.SOLVED: EXIT_OK,
    Status.INFEASIBLE: EXIT_INFEASIBLE,
    Status.INDETERMINATE: EXIT_INDETERMINATE,
}


class InputError(TcmpError):
    """Malformed input file or arguments."""


# ---------------------------------------------------------------------------
# file formats


def _number(obj, key, where) -> float:
    try:
        v = obj[key]
    except (KeyError, TypeError):
        raise InputError(f"{where}: missing field {key!r}") from None
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise InputError(f"{where}: field {key!r} must be a number, got {v!r}")
    v = float(v)
    if not math.isfinite(v):
        raise InputError(f"{where}: field {key!r} is not finite")
    return v


def _index(obj, key, where) -> int:
    v = obj.get(key) if isinstance(obj, dict) else None
    if isinstance(v, bool) or not isinstance(v, int) or v < 0:
        raise InputError(f"{where}: field {key!r} must be a nonnegative integer, got {v!r}")
    return v


def _read_json(path):
    try:
        text = sys.stdin.read() if str(path) == "-" else Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from None


def parse_moments(doc: dict, tol: float = 1e-9) -> tuple[MomentTable, ColumnRelation | None]:
    if not isinstance(doc, dict):
        raise InputError("moments file must be a JSON object")
    degree = _index(doc, "degree", "moments file")
    entries = doc.get("entries")
    if not isinstance(entries, list):
        raise InputError("moments file: 'entries' must be a list")
    upper: dict = {}
    lower: dict = {}
    for n, e in enumerate(entries):
        where = f"entry {n}"
        if not isinstance(e, dict):
            raise InputError(f"{where}: must be an object")
        i, j = _index(e, "i", where), _index(e, "j", where)
        if i + j > degree:
            raise InputError(f"{where}: ({i},{j}) exceeds degree {degree}")
        v = complex(_number(e, "re", where), _number(e, "im", where))
        target = upper if i <= j else lower
        if (i, j) in target:
            raise InputError(f"{where}: duplicate entry ({i},{j})")
        target[(i, j)] = v
    missing = [(i, d - i) for d in range(degree + 1) for i in range(d // 2 + 1) if (i, d - i) not in upper]
    if missing:
        raise InputError(f"moments file: missing entries {missing[:5]}")
    for (i, j), v in lower.items():
        ref = upper[(j, i)]
        if abs(v - np.conj(ref)) > tol * (1 + abs(v)):
            raise InputError(f"entry ({i},{j}) = {v} is not the conjugate of ({j},{i}) = {ref}")
    for i in range(degree // 2 + 1):
        v = upper[(i, i)]
        if abs(v.imag) > tol * (1 + abs(v)):
            raise InputError(f"diagonal entry ({i},{i}) = {v} is not real")
    g00 = upper[(0, 0)]
    if not g00.real > 0:
        raise InputError(f"gamma_00 must be positive, got {g00}")
    table = MomentTable(degree, upper)

    relation = None
    rel = doc.get("relation")
    if rel is not None:
        if not isinstance(rel, dict) or not isinstance(rel.get("coefficients"), list):
            raise InputError("relation must be an object with a 'coefficients' list")
        k = _index(rel, "k", "relation")
        coeffs: dict = {}
        for n, c in enumerate(rel["coefficients"]):
            where = f"relation coefficient {n}"
            if not isinstance(c, dict):
                raise InputError(f"{where}: must be an object")
            a, b = _index(c, "n", where), _index(c, "m", where)
            if a + b > k:
                raise InputError(f"{where}: ({a},{b}) exceeds total degree {k}")
            if (a, b) in coeffs:
                raise InputError(f"{where}: duplicate term ({a},{b})")
            coeffs[(a, b)] = complex(_number(c, "re", where), _number(c, "im", where))
        relation = ColumnRelation(k, coeffs)
        if 2 * k + 2 > degree:
            raise InputError(f"relation with k={k} needs degree {2 * k + 2}, file has {degree}")
    return table, relation


def dump_moments(table: MomentTable, relation: ColumnRelation | None = None) -> dict:
    doc = {
        "degree": table.degree,
        "entries": [
            {"i": i, "j": j, "re": v.real, "im": v.imag}
            for (i, j), v in sorted(table.upper.items(), key=lambda kv: (sum(kv[0]), kv[0][0]))
        ],
    }
    if relation is not None:
        doc["relation"] = dump_relation(relation)
    return doc


def dump_relation(relation: ColumnRelation) -> dict:
    return {
        "k": relation.k,
        "coefficients": [
            {"n": n, "m": m, "re": a.real, "im": a.imag}
            for (n, m), a in sorted(relation.coefficients.items())
        ],
    }


def parse_measure(doc: dict) -> AtomicMeasure:
    if not isinstance(doc, dict) or not isinstance(doc.get("atoms"), list) or not doc["atoms"]:
        raise InputError("measure file must hold a nonempty 'atoms' list")
    pts, wts = [], []
    for n, a in enumerate(doc["atoms"]):
        where = f"atom {n}"
        if not isinstance(a, dict):
            raise InputError(f"{where}: must be an object")
        w = _number(a, "weight", where)
        if not w > 0:
            raise InputError(f"{where}: weight must be positive, got {w}")
        pts.append(complex(_number(a, "re", where), _number(a, "im", where)))
        wts.append(w)
    try:
        return AtomicMeasure(tuple(pts), tuple(wts))
    except ValueError as exc:
        raise InputError(f"measure file: {exc}") from None


def dump_measure(mu: AtomicMeasure) -> dict:
    return {"atoms": [{"re": p.real, "im": p.imag, "weight": w} for p, w in mu.atoms]}


# ---------------------------------------------------------------------------
# polynomial expressions


_NAMES = {"z": Z, "zb": ZBAR, "zbar": ZBAR, "I": 1j}


def parse_poly(text: str) -> BivarPoly:
    """
    Parse an expression in ``z`` and ``zb`` (or ``zbar``), e.g.
    ``"zb*z^2 - zb^2*z - 2*z + 2*zb"``.  ``^`` and ``**`` both denote powers;
    complex constants use Python syntax (``2j``) or ``I``.
    """
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise InputError(f"cannot parse polynomial {text!r}: {exc.msg}") from None

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float, complex)):
            return node.value
        if isinstance(node, ast.Name) and node.id in _NAMES:
            return _NAMES[node.id]
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            left, right = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Add):
                return left + right
            if isinstance(node.op, ast.Sub):
                return left - right
            if isinstance(node.op, ast.Mult):
                return left * right
            if isinstance(node.op, ast.Pow) and isinstance(right, int) and right >= 0:
                return left**right
            if isinstance(node.op, ast.Div) and not isinstance(right, BivarPoly):
                return left * (1 / right)
        raise InputError(f"unsupported syntax in polynomial {text!r}")

    val = ev(tree)
    return val if isinstance(val, BivarPoly) else BivarPoly.constant(val)


# ---------------------------------------------------------------------------
# output helpers


def _c(v: complex) -> dict:
    return {"re": float(np.real(v)), "im": float(np.imag(v))}


def _fmt(v: complex) -> str:
    v = complex(v)
    return f"{v.real:.17g}{v.imag:+.17g}j"


def _emit(args, payload: dict, lines: list[str]):
    out = json.dumps(payload, indent=2) if args.json else "\n".join(lines)
    if getattr(args, "output", None) and args.command not in ("generate",):
        Path(args.output).write_text(out + "\n")
    else:
        print(out)


def _params(args) -> CubicParams:
    ab = args.a is not None or args.b is not None
    tu = args.t is not None or args.u is not None
    if ab == tu:
        raise InputError("give exactly one of --a/--b or --t/--u")
    if ab:
        if args.a is None or args.b is None:
            raise InputError("--a and --b must be given together")
        return CubicParams(args.a, args.b)
    if args.t is None or args.u is None:
        raise InputError("--t and --u must be given together")
    return CubicParams.from_tu(args.t, args.u)


def _psd_json(rep) -> dict | None:
    if rep is None:
        return None
    return {
        "level": rep.level,
        "is_psd": rep.is_psd,
        "min_eigenvalue": rep.min_eigenvalue,
        "max_eigenvalue": rep.max_eigenvalue,
        "rank": rep.rank,
        "tolerance": rep.tolerance,
    }


# ---------------------------------------------------------------------------
# commands


def cmd_generate(args) -> int:
    mu = parse_measure(_read_json(args.input))
    if args.degree is None or args.degree < 0:
        raise InputError("--degree must be a nonnegative integer")
    text = json.dumps(dump_moments(mu.table(args.degree)), indent=2)
    if args.output:
        Path(args.output).write_text(text + "\n")
    else:
        print(text)
    return EXIT_OK


def cmd_solve(args) -> int:
    table, relation = parse_moments(_read_json(args.input))
    tol = args.tol if args.tol is not None else MEMBERSHIP_TOL
    rep = solve_table(table, relation, tol=tol)
    d = rep.diagnostics
    xi = d.get("xi")
    zeros = d.get("zeros")
    psd = d.get("psd_2k")
    payload = {
        "status": str(rep.status),
        "exit_code": STATUS_EXIT[rep.status],
        "measure": dump_measure(rep.measure) if rep.measure is not None else None,
        "failed_test": None
        if rep.failed_test is None
        else {"name": rep.failed_test.name, "message": rep.failed_test.message, "value": rep.failed_test.value},
        "relation": dump_relation(d["relation"]),
        "xi": None if xi is None else {"alpha_c": xi.alpha_c, "xi": xi.xi},
        "zeros": None if zeros is None else [_c(p) for p in zeros.points],
        "psd": _psd_json(psd),
        "psd_witness": _psd_json(d.get("psd_witness")),
        "verify_residual": d.get("verify_residual"),
    }
    lines = [f"status: {rep.status}"]
    if rep.measure is not None:
        lines.append(f"measure ({len(rep.measure)} atoms):")
        lines += [f"  {_fmt(p)}  weight {w:.17g}" for p, w in rep.measure.atoms]
    if rep.failed_test is not None:
        lines.append(f"failed test: {rep.failed_test}")
    lines.append(f"relation: Z^{d['relation'].k + 1} = {BivarPoly(d['relation'].coefficients)}")
    if xi is not None:
        lines.append(f"xi: {xi.xi} (alpha_c = {xi.alpha_c})")
    if zeros is not None:
        lines.append("zero set: " + ", ".join(_fmt(p) for p in zeros.points))
    if psd is not None:
        lines.append(
            f"M({psd.level}): lambda_min = {psd.min_eigenvalue:.6g}, "
            f"lambda_max = {psd.max_eigenvalue:.6g}, rank = {psd.rank}"
        )
    if d.get("verify_residual") is not None:
        lines.append(f"reintegration residual: {d['verify_residual']:.3e}")
    _emit(args, payload, lines)
    return STATUS_EXIT[rep.status]


def cmd_roots(args) -> int:
    params = _params(args)
    zs = harmonic_cubic_zeros(params)
    reg = cubic_region(params.a, params.b)
    form = (
        f"z^3 = i*{params.t:g}*z + {params.u:g}*zb" if params.rotated else f"z^3 + {params.a:g}*z + {params.b:g}*zb = 0"
    )
    payload = {
        "polynomial": form,
        "region": reg.name,
        "count": zs.count,
        "roots": [_c(p) for p in zs.points],
    }
    lines = [form, f"region: {reg.name}", f"count: {zs.count}"] + [f"  {_fmt(p)}" for p in zs.points]
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_check(args) -> int:
    table, _ = parse_moments(_read_json(args.input))
    params = _params(args)
    reg = cubic_region(params.a, params.b)
    if table.degree < 2 * reg.level:
        raise InputError(f"region {reg.name} needs a table of degree {2 * reg.level}, got {table.degree}")
    tol = args.tol if args.tol is not None else 1e-8
    rep = check_cubic_conditions(table, params, tol=tol)
    bound = rep.tol * rep.scale
    if not rep.supported:
        verdict = "unsupported"
    else:
        verdict = "pass" if rep.passed else "fail"
    payload = {
        "region": rep.region,
        "table_count": rep.table_count,
        "h": None if rep.h is None else str(rep.h),
        "tolerance": bound,
        "equalities": [{"condition": lab, "residual": r, "ok": r <= bound} for lab, r in rep.equalities],
        "riesz": [{"condition": lab, "residual": r, "ok": r <= bound} for lab, r in rep.riesz],
        "psd": _psd_json(rep.psd),
        "verdict": verdict,
    }
    lines = [f"region: {rep.region} (table {rep.table}, N = {rep.table_count})"]
    if rep.h is not None:
        lines.append(f"h = {rep.h}")
    for lab, r in rep.equalities:
        lines.append(f"  [{'ok' if r <= bound else 'FAIL'}] {lab}  residual {r:.3e}")
    for lab, r in rep.riesz:
        lines.append(f"  [{'ok' if r <= bound else 'FAIL'}] {lab}  residual {r:.3e}")
    p = rep.psd
    lines.append(f"M({p.level}): psd = {p.is_psd}, lambda_min = {p.min_eigenvalue:.6g}, rank = {p.rank}")
    lines.append(f"verdict: {verdict}")
    _emit(args, payload, lines)
    if verdict == "unsupported":
        return EXIT_INDETERMINATE
    return EXIT_OK if rep.passed else EXIT_INFEASIBLE


def cmd_build_matrix(args) -> int:
    table, _ = parse_moments(_read_json(args.input))
    n = args.degree if args.degree is not None else table.degree // 2
    if n < 0 or 2 * n > table.degree:
        raise InputError(f"level {n} needs degree {2 * n}, table has {table.degree}")
    M = build(table, n)
    rep = psd_check(M)
    basis = [str(BivarPoly.monomial(m.i, m.j)) for m in monomials(n)]
    payload = {
        "level": n,
        "basis": basis,
        "re": M.entries.real.tolist(),
        "im": M.entries.imag.tolist(),
        "psd": _psd_json(rep),
    }
    lines = [f"M({n}) in basis {', '.join(basis)}"]
    for row in M.entries:
        lines.append("  " + "  ".join(_fmt(v) for v in row))
    lines.append(f"psd = {rep.is_psd}, lambda_min = {rep.min_eigenvalue:.6g}, rank = {rep.rank}")
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_xi(args) -> int:
    h = parse_poly(args.h)
    if args.r is None or args.r < 1:
        raise InputError("--r must be a positive integer")
    try:
        x = compute_xi(h, args.r)
    except ValueError as exc:
        raise InputError(str(exc)) from None

    def num(v):
        return None if v == float("-inf") else v

    payload = {
        "h": str(h),
        "r": args.r,
        "d_h": x.d_h,
        "A_h": [str(BivarPoly.monomial(m.i, m.j)) for m in x.A_h],
        "c1": num(x.c1),
        "c1p": num(x.c1p),
        "c2": num(x.c2),
        "c2p": num(x.c2p),
        "c": num(x.c),
        "alpha_c": x.alpha_c,
        "xi": x.xi,
    }
    lines = [
        f"h = {h}, r = {args.r}",
        f"d_h = {x.d_h}, A_h = {payload['A_h']}",
        f"c1 = {x.c1}, c1' = {x.c1p}, c2 = {x.c2}, c2' = {x.c2p}",
        f"alpha_c = {x.alpha_c}, xi = {x.xi}",
    ]
    _emit(args, payload, lines)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tcmp", description=__doc__.strip().splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, inp=True):
        if inp:
            p.add_argument("--input", "-i", required=True, help="input JSON file ('-' for stdin)")
        p.add_argument("--output", "-o", help="write output here instead of stdout")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.add_argument("--tol", type=float, help="override the default tolerance")

    def cubic(p):
        p.add_argument("--a", type=float)
        p.add_argument("--b", type=float)
        p.add_argument("--t", type=float)
        p.add_argument("--u", type=float)

    p = sub.add_parser("generate", help="moments of an atomic measure")
    common(p)
    p.add_argument("--degree", "-d", type=int, required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("solve", help="solve a truncated moment problem")
    common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("roots", help="zeros of z^3 + a z + b zbar (or z^3 = i t z + u zbar)")
    common(p, inp=False)
    cubic(p)
    p.set_defaults(func=cmd_roots)

    p = sub.add_parser("check", help="evaluate the cubic root-count table conditions")
    common(p)
    cubic(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("build-matrix", help="dump the moment matrix M(n)")
    common(p)
    p.add_argument("--degree", "--level", "-d", type=int, dest="degree", help="matrix level n")
    p.set_defaults(func=cmd_build_matrix)

    p = sub.add_parser("xi", help="truncation level data for h")
    common(p, inp=False)
    p.add_argument("--h", required=True, help="polynomial in z and zb, e.g. 'zb*z^2 - z'")
    p.add_argument("--r", type=int, required=True)
    p.set_defaults(func=cmd_xi)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (RelationViolated, InconsistentExtension) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RELATION
    except TcmpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED


if __name__ == "__main__":
    sys.exit(main())
