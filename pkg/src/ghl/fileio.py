"""On-disk formats: .ghl input files (direct bracket files and frame-metric
files) and the deterministic JSON report.

Direct bracket file:

    [algebra]
    name = iwasawa
    q = 0
    m = 3
    params = alpha
    backend = exact
    [brackets]
    e0,e2 = alpha*e4

Frame-metric file (arbitrary real frame + J + metric expressions + at least
one rational sample assignment; loading runs unitary Gram-Schmidt, so the
result is a numeric-backend spec):

    [frame]
    name = kodaira-thurston
    m = 2
    params = r, sigma, x, y
    [brackets]
    e0,e1 = -e3
    [J]
    row0 = 0,0,-1,0
    ...
    [metric]
    e0,e0 = r^2
    ...
    [samples]
    s0 = r=1, sigma=2, x=0, y=0

'#' starts a comment; files are UTF-8 with LF newlines; bracket keys use the
reserved basis tokens e0..e{n-1}; parameters may not be named e<digits> or t.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .exprparse import _BASIS_RE, parse_expression, to_linear_combination, to_scalar
from .geometry import BracketSpec, ValidationReport, validate
from .multilinear import gram_schmidt_unitary, mat_vec, dot
from .scalars import DEFAULT_TOLERANCE, ExactDomain, NumericDomain, NumericScalar

__all__ = ["GhlFormatError", "LoadedSpec", "load_ghl", "load_algebra",
           "load_frame_metric", "serialize_report", "parse_assignments",
           "compare_reports", "bundled_path"]

REPORT_SCHEMA = 1


class GhlFormatError(ValueError):
    pass


@dataclass
class LoadedSpec:
    spec: BracketSpec
    report: ValidationReport
    kind: str                      # "algebra" | "frame"
    sample: dict | None = None     # assignment used for frame-metric files


def _read_sections(path: Path) -> dict[str, list[tuple[str, str]]]:
    sections: dict[str, list[tuple[str, str]]] = {}
    current = None
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip().lower()
            sections.setdefault(current, [])
            continue
        if current is None:
            raise GhlFormatError(f"{path}:{lineno}: content before any section")
        if "=" not in line:
            raise GhlFormatError(f"{path}:{lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        sections[current].append((key.strip(), value.strip()))
    return sections


def _section_dict(entries: list[tuple[str, str]], path, name: str) -> dict[str, str]:
    out = {}
    for k, v in entries:
        if k in out:
            raise GhlFormatError(f"{path}: duplicate key {k!r} in [{name}]")
        out[k] = v
    return out


def _parse_params(text: str) -> tuple[str, ...]:
    names = tuple(p.strip() for p in text.split(",") if p.strip())
    for p in names:
        if _BASIS_RE.match(p):
            raise GhlFormatError(f"parameter may not be named like a basis vector: {p}")
        if p == "t":
            raise GhlFormatError("parameter name 't' is reserved for the Gauduchon parameter")
    return names


def parse_assignments(text: str) -> dict[str, Fraction]:
    """Parse 'a=1, b=2/3, c=-1/2' into rational values."""
    out = {}
    for piece in text.split(","):
        piece = piece.strip()
        if not piece:
            continue
        if "=" not in piece:
            raise GhlFormatError(f"bad assignment {piece!r} (expected name=num/den)")
        k, v = piece.split("=", 1)
        try:
            out[k.strip()] = Fraction(v.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise GhlFormatError(f"bad rational literal {v.strip()!r}: {exc}") from None
    return out


def _parse_bracket_key(key: str, n: int, path) -> tuple[int, int]:
    parts = [p.strip() for p in key.split(",")]
    if len(parts) != 2:
        raise GhlFormatError(f"{path}: bracket key must be 'ea,eb', got {key!r}")
    idx = []
    for p in parts:
        m = _BASIS_RE.match(p)
        if not m:
            raise GhlFormatError(f"{path}: bad basis token {p!r}")
        idx.append(int(m.group(1)))
    a, b = idx
    if not (0 <= a < b < n):
        raise GhlFormatError(f"{path}: bracket key {key!r} needs 0 <= a < b < {n}")
    return a, b


def load_ghl(path: str | Path, sample: dict | None = None,
             tol: float = DEFAULT_TOLERANCE) -> LoadedSpec:
    """Load either file kind, dispatching on the leading section."""
    path = Path(path)
    sections = _read_sections(path)
    if "algebra" in sections:
        return load_algebra(path)
    if "frame" in sections:
        return load_frame_metric(path, sample=sample, tol=tol)
    raise GhlFormatError(f"{path}: expected an [algebra] or [frame] section")


def load_algebra(path: str | Path) -> LoadedSpec:
    path = Path(path)
    sections = _read_sections(path)
    if "algebra" not in sections:
        raise GhlFormatError(f"{path}: missing [algebra] section")
    head = _section_dict(sections["algebra"], path, "algebra")
    try:
        q = int(head["q"])
        m = int(head["m"])
    except KeyError as exc:
        raise GhlFormatError(f"{path}: [algebra] needs q and m") from None
    name = head.get("name", path.stem)
    params = _parse_params(head.get("params", ""))
    backend = head.get("backend", "exact")
    if backend != "exact":
        raise GhlFormatError(f"{path}: direct bracket files are exact-backend only")
    dom = ExactDomain(params)
    n = q + 2 * m
    mu = {}
    for key, value in sections.get("brackets", []):
        a, b = _parse_bracket_key(key, n, path)
        node = parse_expression(value)
        mu[(a, b)] = to_linear_combination(node, dom, n)
    spec = BracketSpec(q, m, mu, dom, name, params)
    return LoadedSpec(spec, validate(spec), "algebra")


def load_frame_metric(path: str | Path, sample: dict | None = None,
                      tol: float = DEFAULT_TOLERANCE) -> LoadedSpec:
    path = Path(path)
    sections = _read_sections(path)
    head = _section_dict(sections.get("frame", []), path, "frame")
    try:
        m = int(head["m"])
    except KeyError:
        raise GhlFormatError(f"{path}: [frame] needs m") from None
    name = head.get("name", path.stem)
    params = _parse_params(head.get("params", ""))
    n = 2 * m
    exact = ExactDomain(params)

    # original-frame brackets as exact linear combinations
    brackets = {}
    for key, value in sections.get("brackets", []):
        a, b = _parse_bracket_key(key, n, path)
        brackets[(a, b)] = to_linear_combination(parse_expression(value), exact, n)

    # J matrix (integer entries, column action), given row by row
    jrows = _section_dict(sections.get("j", []), path, "J")
    J = []
    for r in range(n):
        key = f"row{r}"
        if key not in jrows:
            raise GhlFormatError(f"{path}: [J] missing {key}")
        try:
            row = [int(x) for x in jrows[key].split(",")]
        except ValueError:
            raise GhlFormatError(f"{path}: [J] {key} must be integers") from None
        if len(row) != n:
            raise GhlFormatError(f"{path}: [J] {key} must have {n} entries")
        J.append(row)
    J2 = [[sum(J[i][k] * J[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    if any(J2[i][j] != (-1 if i == j else 0) for i in range(n) for j in range(n)):
        raise GhlFormatError(f"{path}: J^2 != -Id")

    # metric entries, symmetric fill, unspecified = 0
    Gexpr = [[None] * n for _ in range(n)]
    for key, value in sections.get("metric", []):
        parts = [p.strip() for p in key.split(",")]
        if len(parts) != 2:
            raise GhlFormatError(f"{path}: metric key must be 'ea,eb'")
        ij = []
        for p in parts:
            mm = _BASIS_RE.match(p)
            if not mm or int(mm.group(1)) >= n:
                raise GhlFormatError(f"{path}: bad metric index {p!r}")
            ij.append(int(mm.group(1)))
        i, j = ij
        val = to_scalar(parse_expression(value), exact)
        if Gexpr[i][j] is not None:
            raise GhlFormatError(f"{path}: duplicate metric entry {key}")
        Gexpr[i][j] = val
        if i != j:
            Gexpr[j][i] = val

    samples = {}
    for key, value in sections.get("samples", []):
        samples[key] = parse_assignments(value)
    if sample is None:
        if not samples:
            raise GhlFormatError(f"{path}: frame-metric file needs a [samples] entry")
        sample = samples[sorted(samples)[0]]
    missing = [p for p in params if p not in sample]
    if missing:
        raise GhlFormatError(f"{path}: sample misses parameter(s) {', '.join(missing)}")

    num = NumericDomain((), tol)

    def ev(x):
        if x is None:
            return num.zero()
        return NumericScalar(float(x.evaluate(sample)), tol)

    G = [[ev(Gexpr[i][j]) for j in range(n)] for i in range(n)]
    Jnum = [[num.from_fraction(J[i][j]) for j in range(n)] for i in range(n)]
    frame = gram_schmidt_unitary(G, Jnum, num)

    def lie(u, v):
        out = [num.zero()] * n
        for a in range(n):
            if num.is_zero(u[a]):
                continue
            for b in range(n):
                if num.is_zero(v[b]):
                    continue
                if a == b:
                    continue
                vec = brackets.get((a, b)) if a < b else brackets.get((b, a))
                if vec is None:
                    continue
                sign = 1.0 if a < b else -1.0
                coeff = u[a] * v[b] * sign
                for c, x in enumerate(vec):
                    out[c] = out[c] + coeff * float(x.evaluate(sample))
        return out

    mu = {}
    for a in range(n):
        for b in range(a + 1, n):
            br = lie(frame[a], frame[b])
            vec = [dot(br, mat_vec(G, frame[c])) for c in range(n)]
            mu[(a, b)] = vec
    spec = BracketSpec(0, m, mu, num, name, ())
    return LoadedSpec(spec, validate(spec), "frame", sample=dict(sample))


# -- reports ---------------------------------------------------------------------


def build_report(loaded: LoadedSpec, t=None, t_label: str | None = None) -> dict:
    """Full geometry report of a loaded spec as a JSON-ready dict.

    t defaults to symbolic on the exact backend and to 1 (Chern) on the
    numeric backend.  Matrices are row-major arrays of canonical scalar
    strings; forms are maps from sorted index keys like "0,2" to strings.
    """
    from . import geometry as geo

    spec = loaded.spec
    dom = spec.domain
    n2 = 2 * spec.m
    if t is None:
        t = geo.symbolic_t() if dom.backend == "exact" else dom.one()
        if t_label is None:
            t_label = "symbolic" if dom.backend == "exact" else "1"
    elif t_label is None:
        t_label = dom.text(t)

    tors = geo.torsion_ingredients(spec)
    S = geo.levi_civita(spec)
    A = geo.gauduchon_connection(spec, t, tors=tors, S=S)
    Rm = geo.riemann_curvature(spec, S)
    Om, T = geo.gauduchon_curvature_torsion(spec, t, A=A)
    rho1, rho2, scal = geo.ricci_and_scalar(spec, Om)
    W = geo.rho2_matrix(spec, Om)
    theta = geo.lee_form(spec, tors=tors)
    flags = geo.metric_flags(spec)

    def s(x) -> str:
        return dom.text(x)

    def matrix(M) -> list:
        return [[s(x) for x in row] for row in M]

    def vecdict(d) -> dict:
        return {f"{a},{b}": [s(x) for x in v] for (a, b), v in sorted(d.items())}

    def matdict(d) -> dict:
        out = {}
        for (a, b), M in sorted(d.items()):
            if not all(dom.is_zero(x) for row in M for x in row):
                out[f"{a},{b}"] = matrix(M)
        return out

    def formdict(f) -> dict:
        return {",".join(map(str, k)): s(v) for k, v in sorted(f.comp.items())}

    report = {
        "schema": REPORT_SCHEMA,
        "name": spec.name,
        "q": spec.q,
        "m": spec.m,
        "backend": dom.backend,
        "params": list(spec.params),
        "t": t_label,
        "validation": [
            {"name": c.name, "passed": c.passed, "witness": c.witness}
            for c in loaded.report.conditions
        ],
        "flags": flags,
        "N": vecdict(tors.N),
        "F": formdict(tors.F),
        "F_plus": formdict(tors.F_plus),
        "F_minus": formdict(tors.F_minus),
        "S": [matrix(S[i]) for i in range(n2)],
        "A": [matrix(A[i]) for i in range(n2)],
        "Rm": matdict(Rm),
        "Omega": matdict(Om),
        "T": vecdict({k: v for k, v in T.items()
                      if any(not dom.is_zero(x) for x in v)}),
        "rho1": formdict(rho1),
        "rho2": matrix(W),
        "scal": s(scal),
        "lee": [s(x) for x in theta],
    }
    if loaded.sample is not None:
        report["sample"] = {k: str(v) for k, v in sorted(loaded.sample.items())}
    return report


def serialize_report(report: dict) -> str:
    """Deterministic JSON: sorted keys, two-space indent, trailing newline."""
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def compare_reports(actual: dict, expected: dict, tol: float = DEFAULT_TOLERANCE):
    """Field-by-field comparison; scalars are compared semantically
    (are_equal for the exact backend, tolerance for numeric).  Returns a list
    of mismatch paths; raises GhlFormatError on schema mismatch."""
    if actual.get("schema") != expected.get("schema"):
        raise GhlFormatError("report schema mismatch")
    backend = actual.get("backend", "exact")
    params = tuple(actual.get("params", ())) + ("t",)
    dom = ExactDomain(params)
    diffs: list[str] = []

    def scalar_eq(a: str, b: str) -> bool:
        """Semantic comparison; falls back to string equality for fields that
        are not scalars (names, 'symbolic', flags serialized as text)."""
        if a == b:
            return True
        if backend == "numeric":
            try:
                x, y = float(a), float(b)
            except ValueError:
                return False
            return abs(x - y) <= tol * max(1.0, abs(x), abs(y))
        try:
            va = to_scalar(parse_expression(a), dom)
            vb = to_scalar(parse_expression(b), dom)
        except Exception:
            return False
        return va.eq(vb)

    def walk(a, b, path):
        if isinstance(a, dict) and isinstance(b, dict):
            for k in sorted(set(a) | set(b)):
                if k not in a or k not in b:
                    diffs.append(f"{path}/{k} (missing on one side)")
                    continue
                walk(a[k], b[k], f"{path}/{k}")
        elif isinstance(a, list) and isinstance(b, list):
            if len(a) != len(b):
                diffs.append(f"{path} (length {len(a)} != {len(b)})")
                return
            for i, (x, y) in enumerate(zip(a, b)):
                walk(x, y, f"{path}[{i}]")
        elif isinstance(a, str) and isinstance(b, str):
            if not scalar_eq(a, b):
                diffs.append(path)
        else:
            if a != b:
                diffs.append(path)

    walk(actual, expected, "")
    return diffs


_DATA_FILES = {
    "abelian2": "abelian2.ghl",
    "sphere": "sphere.ghl",
    "iwasawa": "iwasawa.ghl",
    "kodaira": "kodaira.ghl",
    "kodaira-thurston": "kodaira-thurston.ghl",
}


def bundled_path(name: str) -> Path:
    """Path of a bundled example (.ghl) or expected report (.expected.json)."""
    from importlib.resources import files
    base = files("ghl") / "data"
    fname = _DATA_FILES.get(name, name)
    p = Path(str(base / fname))
    if not p.exists():
        raise FileNotFoundError(f"no bundled data file {name!r}")
    return p
