"""Command-line front end.

    ghl validate FILE [--params ...]
    ghl report   FILE [--t symbolic|RAT] [--params ...] [--format json|text]
                      [--output PATH]
    ghl check    FILE EXPECTED [--t ...] [--params ...]
    ghl singer   FILE --params ... [--kmax N]
    ghl killing  FILE --params ...
    ghl sweep    FILE --grid "p=a:b:n,..." --quantity scal|sec_max_basis|singer_k
                      [--params ...] [--output PATH]

Exit codes: 0 success, 1 semantic failure (validation/check mismatch),
2 usage, parse or I/O errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import geometry as geo
from .exprparse import ExprSyntaxError, UndeclaredParameterError
from .fileio import (GhlFormatError, build_report, compare_reports, load_ghl,
                     parse_assignments, serialize_report)
from .multilinear import FrameError, basis_vector
from .scalars import (DEFAULT_TOLERANCE, DegreeGuardError, PoleError,
                      RationalFunction, set_degree_cap)

USAGE_ERROR = 2
SEMANTIC_ERROR = 1


def _common(parser):
    parser.add_argument("--params", default="", help="rational assignments a=1,b=2/3")
    parser.add_argument("--tol", type=float, default=DEFAULT_TOLERANCE)
    parser.add_argument("--max-degree", type=int, default=None)


def _load(path: str, params: str, tol: float):
    sample = parse_assignments(params) if params else None
    loaded = load_ghl(path, sample=sample, tol=tol)
    if loaded.kind == "algebra" and sample:
        spec = loaded.spec.instantiate(sample)
        loaded.spec = spec
        loaded.report = geo.validate(spec)
        loaded.sample = sample
    return loaded


def _parse_t(text: str | None, loaded):
    dom = loaded.spec.domain
    if text is None or text == "symbolic":
        if dom.backend == "numeric":
            return dom.one(), "1"
        return geo.symbolic_t(), "symbolic"
    frac = Fraction(text)
    if dom.backend == "numeric":
        return dom.from_fraction(frac), text
    return RationalFunction.const(frac), text


def cmd_validate(args) -> int:
    loaded = _load(args.file, args.params, args.tol)
    rep = loaded.report
    for c in rep.conditions:
        status = "pass" if c.passed else ("no" if c.name == "h5" else "FAIL")
        line = f"{c.name}: {status}"
        if c.witness and not c.passed:
            line += f"  [{c.witness}]"
        print(line)
    print(f"integrable: {'yes' if rep.integrable else 'no'}")
    return 0 if rep.ok else SEMANTIC_ERROR


def cmd_report(args) -> int:
    loaded = _load(args.file, args.params, args.tol)
    t, label = _parse_t(args.t, loaded)
    report = build_report(loaded, t, t_label=label)
    text = serialize_report(report)
    if args.format == "text":
        buf = io.StringIO()
        _print_text_report(report, buf)
        text = buf.getvalue()
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def _print_text_report(report: dict, out) -> None:
    out.write(f"# {report['name']}  (q={report['q']}, m={report['m']}, "
              f"backend={report['backend']}, t={report['t']})\n")
    flags = report["flags"]
    out.write("flags: " + ", ".join(f"{k}={'yes' if v else 'no'}"
                                    for k, v in sorted(flags.items())) + "\n")
    out.write(f"scal = {report['scal']}\n")
    out.write("lee  = [" + ", ".join(report["lee"]) + "]\n")
    for key in ("N", "F", "F_plus", "F_minus", "rho1"):
        out.write(f"{key}:\n")
        for k, v in report[key].items():
            body = "[" + ", ".join(v) + "]" if isinstance(v, list) else v
            out.write(f"  {k} -> {body}\n")
    for key in ("S", "A"):
        for i, M in enumerate(report[key]):
            out.write(f"{key}(e{i}):\n")
            for row in M:
                out.write("  [" + ", ".join(row) + "]\n")
    for key in ("Rm", "Omega"):
        for k, M in report[key].items():
            out.write(f"{key}({k}):\n")
            for row in M:
                out.write("  [" + ", ".join(row) + "]\n")
    out.write("rho2:\n")
    for row in report["rho2"]:
        out.write("  [" + ", ".join(row) + "]\n")


def cmd_check(args) -> int:
    loaded = _load(args.file, args.params, args.tol)
    t, label = _parse_t(args.t, loaded)
    actual = build_report(loaded, t, t_label=label)
    expected = json.loads(Path(args.expected).read_text(encoding="utf-8"))
    diffs = compare_reports(actual, expected, tol=args.tol)
    if not diffs:
        print("check: OK")
        return 0
    print(f"check: {len(diffs)} mismatching field(s):")
    for d in diffs:
        print(f"  {d}")
    return SEMANTIC_ERROR


def cmd_singer(args) -> int:
    loaded = _load(args.file, args.params, args.tol)
    res = geo.singer_invariant(loaded.spec, kmax=args.kmax)
    print("j-dims:", " ".join(str(d) for d in res.dims))
    print(f"k_Jg = {res.k_jg}")
    return 0


def cmd_killing(args) -> int:
    loaded = _load(args.file, args.params, args.tol)
    res = geo.killing_generators(loaded.spec)
    print(f"dim kill = {res.dim}")
    print(f"orders used = {res.orders_used}")
    print("closure under Nomizu bracket: ok")
    print("v-components span the tangent space: ok")
    return 0


def _grid_points(text: str):
    axes = []
    for piece in text.split(","):
        piece = piece.strip()
        if not piece:
            continue
        if "=" not in piece:
            raise GhlFormatError(f"bad grid component {piece!r}")
        name, spec_ = piece.split("=", 1)
        parts = spec_.split(":")
        if len(parts) != 3:
            raise GhlFormatError(f"grid component must be name=start:stop:count, got {piece!r}")
        start, stop = Fraction(parts[0]), Fraction(parts[1])
        count = int(parts[2])
        if count < 1:
            raise GhlFormatError("grid count must be >= 1")
        if count == 1:
            vals = [start]
        else:
            step = (stop - start) / (count - 1)
            vals = [start + i * step for i in range(count)]
        axes.append((name.strip(), vals))
    import itertools
    names = [a[0] for a in axes]
    for combo in itertools.product(*(a[1] for a in axes)):
        yield names, dict(zip(names, combo))


def cmd_sweep(args) -> int:
    fixed = parse_assignments(args.params) if args.params else {}
    rows = []
    names = None
    for gnames, point in _grid_points(args.grid):
        names = gnames
        assignment = dict(fixed)
        tval = None
        for k, v in point.items():
            if k == "t":
                tval = v
            else:
                assignment[k] = v
        try:
            value = _sweep_value(args, assignment, tval)
        except PoleError:
            value = "pole"
        rows.append([str(point[k]) for k in gnames] + [value])
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(list(names or []) + [args.quantity])
    w.writerows(rows)
    text = out.getvalue()
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def _sweep_value(args, assignment, tval) -> str:
    loaded = load_ghl(args.file, sample=assignment or None, tol=args.tol)
    spec = loaded.spec
    if loaded.kind == "algebra" and assignment:
        spec = spec.instantiate(assignment)
    dom = spec.domain
    if args.quantity == "scal":
        if tval is None:
            tval = Fraction(args.t) if args.t not in (None, "symbolic") else Fraction(1)
        t = dom.from_fraction(tval)
        Om, _ = geo.gauduchon_curvature_torsion(spec, t)
        _, _, scal = geo.ricci_and_scalar(spec, Om)
        if dom.backend == "numeric":
            return dom.text(scal)
        return str(geo.as_fraction(scal))
    if args.quantity == "sec_max_basis":
        Rm = geo.riemann_curvature(spec)
        n2 = 2 * spec.m
        best = None
        for a in range(n2):
            for b in range(a + 1, n2):
                X = basis_vector(n2, a, dom)
                Y = basis_vector(n2, b, dom)
                v = geo.sectional_curvature(spec, Rm, X, Y)
                fv = float(v.value) if dom.backend == "numeric" else geo.as_fraction(v)
                best = fv if best is None else max(best, fv)
        return str(best)
    if args.quantity == "singer_k":
        res = geo.singer_invariant(spec)
        return str(res.k_jg)
    raise GhlFormatError(f"unknown sweep quantity {args.quantity!r}")


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ghl", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="verb", required=True)

    v = sub.add_parser("validate", help="check conditions h1-h5 of a .ghl file")
    v.add_argument("file")
    _common(v)
    v.set_defaults(fn=cmd_validate)

    r = sub.add_parser("report", help="emit the full geometry report")
    r.add_argument("file")
    r.add_argument("--t", default=None, help="Gauduchon parameter (rational or 'symbolic')")
    r.add_argument("--format", choices=("json", "text"), default="json")
    r.add_argument("--output", default=None)
    _common(r)
    r.set_defaults(fn=cmd_report)

    c = sub.add_parser("check", help="compare a report against an expected fixture")
    c.add_argument("file")
    c.add_argument("expected")
    c.add_argument("--t", default=None)
    _common(c)
    c.set_defaults(fn=cmd_check)

    s = sub.add_parser("singer", help="Singer filtration dimensions and k_Jg")
    s.add_argument("file")
    s.add_argument("--kmax", type=int, default=None)
    _common(s)
    s.set_defaults(fn=cmd_singer)

    k = sub.add_parser("killing", help="holomorphic Killing generator algebra")
    k.add_argument("file")
    _common(k)
    k.set_defaults(fn=cmd_killing)

    w = sub.add_parser("sweep", help="evaluate a quantity over a parameter grid (CSV)")
    w.add_argument("file")
    w.add_argument("--grid", required=True, help="param=start:stop:count,...")
    w.add_argument("--quantity", choices=("scal", "sec_max_basis", "singer_k"),
                   required=True)
    w.add_argument("--t", default=None)
    w.add_argument("--output", default=None)
    _common(w)
    w.set_defaults(fn=cmd_sweep)
    return p


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code not in (0, None) else 0
    if args.max_degree:
        set_degree_cap(args.max_degree)
    try:
        return args.fn(args)
    except (GhlFormatError, ExprSyntaxError, UndeclaredParameterError,
            FrameError, FileNotFoundError, IsADirectoryError, PermissionError,
            json.JSONDecodeError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (DegreeGuardError, PoleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except geo.InternalConsistencyError as exc:
        print(f"internal consistency error: {exc}", file=sys.stderr)
        return SEMANTIC_ERROR


if __name__ == "__main__":
    sys.exit(main())
