"""Gauduchon-family geometry of a locally homogeneous almost-Hermitian space
presented by Lie-bracket structure constants in an adapted frame.

A BracketSpec stores mu^c_{ab} on R^{q+2m}; the first q coordinates span the
isotropy, the last 2m carry the standard complex structure I (pairs adjacent,
I e_{2k} = e_{2k+1}) and the standard inner product.  All operators on the
reductive complement are 2m x 2m matrices in column action.

Sign conventions are normalized against the worked examples (see tests):

    F(X,Y,Z)   = <mu(IX,IY),Z> + <mu(IY,IZ),X> + <mu(IZ,IX),Y>     (= d^c w)
    N(X,Y)     = mu(IX,IY) - mu(X,Y) - I(mu(IX,Y) + mu(X,IY))
    <S(X)Y,Z>  = -1/2(<mu(X,Y),Z> + <mu(Z,X),Y> + <mu(Z,Y),X>)
    <A_t(X)Y,Z>= <S(X)Y,Z> - (t+1)/4 F+(X,IY,IZ) - (t-1)/4 F+(X,Y,Z)
                 + 1/4 <N(Y,Z),X> - 1/2 F-(X,Y,Z)
    Rm(X,Y)    = ad(mu_h(X,Y)) - [S(X),S(Y)] - S(mu_m(X,Y))
    Om_t(X,Y)  = ad(mu_h(X,Y)) - [A(X),A(Y)] - A(mu_m(X,Y))
    T_t(X,Y)   = A(X)Y - A(Y)X - mu_m(X,Y)

Ricci forms and the scalar follow the m-pair traces: rho2 is the matrix
sum_k Om(e_{2k}, e_{2k+1}), rho1(X,Y) = 1/2(c(Om(X,Y)) + c(Om(IX,IY))) with
c(W) = sum_k W[2k, 2k+1], and scal = 2 sum_k rho[2k, 2k+1] from either.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from .multilinear import (
    KForm, MultiTensor, basis_vector, commutator, complex_trace,
    coboundary, derivation_action, dot, istd, mat_add, mat_is_zero,
    mat_mul, mat_scale, mat_sub, mat_vec, mat_zero, lambda3_minus,
    vec_add, vec_sub, wedge, complex_trace_form,
)
from .scalars import FractionDomain, RationalFunction

__all__ = [
    "BracketSpec", "ValidationReport", "ConditionResult", "TorsionData",
    "DerivativeTuple", "SingerResult", "KillingResult", "AuditReport",
    "InternalConsistencyError", "validate", "reduce_non_effective",
    "split_bracket", "torsion_ingredients", "levi_civita",
    "gauduchon_connection", "riemann_curvature", "gauduchon_curvature_torsion",
    "ricci_and_scalar", "rho2_matrix", "lee_form", "covariant_derivative",
    "hermitian_s_tuple", "check_x1_identities", "singer_invariant",
    "killing_generators", "nomizu_bracket", "rescale", "rescaling_exponent",
    "sectional_curvature", "metric_flags", "connection_audit",
    "unitary_basis", "so_basis", "symbolic_t", "as_fraction", "curvature_value",
]


class InternalConsistencyError(AssertionError):
    """A theorem-level identity failed: engine defect, not bad data."""


def symbolic_t() -> RationalFunction:
    """The Gauduchon parameter as a polynomial variable."""
    return RationalFunction.param("t")


def as_fraction(v) -> Fraction:
    """Constant scalar of the exact backend as a Fraction."""
    return v if isinstance(v, Fraction) else v.as_fraction()


class BracketSpec:
    """Unitary transitive Lie algebra data in an adapted frame."""

    def __init__(self, q: int, m: int, mu: dict, domain, name: str = "",
                 params: Sequence[str] = ()):
        if q < 0 or m < 1:
            raise ValueError("need q >= 0 and m >= 1")
        self.q = q
        self.m = m
        self.n = q + 2 * m
        self.name = name
        self.params = tuple(params)
        self.domain = domain
        zero = domain.zero()
        store = {}
        for (a, b), vec in mu.items():
            if not (0 <= a < b < self.n):
                raise ValueError(f"bad bracket key ({a},{b})")
            vec = list(vec)
            if len(vec) != self.n:
                raise ValueError("bracket value has wrong length")
            if any(not domain.is_zero(c) for c in vec):
                store[(a, b)] = vec
        self.mu_store = store
        self._zero_vec = [zero] * self.n

    # -- bracket access ------------------------------------------------------

    def mu_full(self, a: int, b: int) -> list:
        if a == b:
            return list(self._zero_vec)
        if a < b:
            v = self.mu_store.get((a, b))
            return list(v) if v else list(self._zero_vec)
        v = self.mu_store.get((b, a))
        return [-c for c in v] if v else list(self._zero_vec)

    def mu_vec(self, x: Sequence, y: Sequence) -> list:
        out = list(self._zero_vec)
        dom = self.domain
        for a in range(self.n):
            if dom.is_zero(x[a]):
                continue
            for b in range(self.n):
                if dom.is_zero(y[b]):
                    continue
                coeff = x[a] * y[b]
                for c, val in enumerate(self.mu_full(a, b)):
                    if not dom.is_zero(val):
                        out[c] = out[c] + coeff * val
        return out

    def mu_m(self, a: int, b: int) -> list:
        """m-block of mu(e_{q+a}, e_{q+b}), indices a,b in 0..2m-1."""
        return self.mu_full(self.q + a, self.q + b)[self.q:]

    def mu_h(self, a: int, b: int) -> list:
        return self.mu_full(self.q + a, self.q + b)[:self.q]

    def mu_m_vec(self, x: Sequence, y: Sequence) -> list:
        """mu_m of two R^{2m} vectors."""
        out = [self.domain.zero()] * (2 * self.m)
        dom = self.domain
        for a in range(2 * self.m):
            if dom.is_zero(x[a]):
                continue
            for b in range(2 * self.m):
                if dom.is_zero(y[b]):
                    continue
                coeff = x[a] * y[b]
                for c, val in enumerate(self.mu_m(a, b)):
                    if not dom.is_zero(val):
                        out[c] = out[c] + coeff * val
        return out

    @cached_property
    def I(self) -> list[list]:
        return istd(self.m, self.domain)

    def ad_h(self, hvec: Sequence) -> list[list]:
        """ad of an isotropy vector restricted to R^{2m} (column action)."""
        n2 = 2 * self.m
        M = mat_zero(n2, self.domain)
        dom = self.domain
        for z in range(self.q):
            if dom.is_zero(hvec[z]):
                continue
            for b in range(n2):
                col = self.mu_full(z, self.q + b)[self.q:]
                for r in range(n2):
                    if not dom.is_zero(col[r]):
                        M[r][b] = M[r][b] + hvec[z] * col[r]
        return M

    def with_name(self, name: str) -> "BracketSpec":
        out = BracketSpec(self.q, self.m, {}, self.domain, name, self.params)
        out.mu_store = self.mu_store
        return out

    def instantiate(self, assignment: dict) -> "BracketSpec":
        """Substitute rational values for all parameters (exact backend)."""
        if self.domain.backend != "exact":
            raise TypeError("instantiate applies to the exact backend")
        assignment = {k: Fraction(v) for k, v in assignment.items()}
        missing = [p for p in self.params if p not in assignment]
        if missing:
            raise ValueError(f"missing assignment for parameter(s): {', '.join(missing)}")
        dom = FractionDomain()
        mu = {k: [c.evaluate(assignment) for c in vec] for k, vec in self.mu_store.items()}
        return BracketSpec(self.q, self.m, mu, dom, self.name, ())


# -- validation ----------------------------------------------------------------


@dataclass
class ConditionResult:
    name: str
    passed: bool
    witness: str = ""


@dataclass
class ValidationReport:
    conditions: list[ConditionResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        """h1-h4 all pass (h5 is an informational flag)."""
        return all(c.passed for c in self.conditions if c.name != "h5")

    @property
    def integrable(self) -> bool:
        return next(c.passed for c in self.conditions if c.name == "h5")

    def condition(self, name: str) -> ConditionResult:
        return next(c for c in self.conditions if c.name == name)


def validate(spec: BracketSpec) -> ValidationReport:
    dom = spec.domain
    n, q, m = spec.n, spec.q, spec.m
    rep = ValidationReport()

    jac_ok, jac_wit = True, ""
    for a, b, c in itertools.combinations(range(n), 3):
        ea, eb, ec = (basis_vector(n, i, dom) for i in (a, b, c))
        s = vec_add(vec_add(spec.mu_vec(spec.mu_full(a, b), ec),
                            spec.mu_vec(spec.mu_full(b, c), ea)),
                    spec.mu_vec(spec.mu_full(c, a), eb))
        if any(not dom.is_zero(x) for x in s):
            jac_ok, jac_wit = False, f"Jacobi fails on (e{a},e{b},e{c})"
            break
    closure_ok, closure_wit = True, ""
    for a, b in itertools.combinations(range(q), 2):
        if any(not dom.is_zero(x) for x in spec.mu_full(a, b)[q:]):
            closure_ok, closure_wit = False, f"mu(e{a},e{b}) leaves the isotropy block"
            break
    if closure_ok:
        for z in range(q):
            for b in range(q, n):
                if any(not dom.is_zero(x) for x in spec.mu_full(z, b)[:q]):
                    closure_ok, closure_wit = False, f"mu(e{z},e{b}) has an isotropy component"
                    break
            if not closure_ok:
                break
    rep.conditions.append(ConditionResult(
        "h1", jac_ok and closure_ok, jac_wit or closure_wit))

    # h2: ad(Z) skew on the m-block (metric invariance), diagonal included
    h2_ok, h2_wit = True, ""
    for z in range(q):
        for a in range(2 * m):
            for b in range(a, 2 * m):
                lhs = spec.mu_full(z, q + a)[q + b] + spec.mu_full(z, q + b)[q + a]
                if not dom.is_zero(lhs):
                    h2_ok, h2_wit = False, f"<mu(e{z},.),.> not skew on (e{q + a},e{q + b})"
                    break
            if not h2_ok:
                break
        if not h2_ok:
            break
    rep.conditions.append(ConditionResult("h2", h2_ok, h2_wit))

    # h3: ad(Z) commutes with I
    h3_ok, h3_wit = True, ""
    I = spec.I
    for z in range(q):
        hv = basis_vector(q, z, dom) if q else []
        M = spec.ad_h(hv)
        if not mat_is_zero(commutator(M, I), dom):
            h3_ok, h3_wit = False, f"ad(e{z}) does not commute with I"
            break
    rep.conditions.append(ConditionResult("h3", h3_ok, h3_wit))

    # h4: effectiveness
    kernel = _isotropy_kernel(spec)
    h4_ok = not kernel
    wit = "" if h4_ok else f"isotropy kernel of dimension {len(kernel)}"
    rep.conditions.append(ConditionResult("h4", h4_ok, wit))

    # h5: integrability flag (pass = integrable)
    h5_ok, h5_wit = True, ""
    for a, b in itertools.combinations(range(2 * m), 2):
        X = basis_vector(2 * m, a, dom)
        Y = basis_vector(2 * m, b, dom)
        IX, IY = mat_vec(I, X), mat_vec(I, Y)
        lhs = vec_sub(spec.mu_m_vec(IX, IY), spec.mu_m_vec(X, Y))
        rhs = mat_vec(I, vec_add(spec.mu_m_vec(IX, Y), spec.mu_m_vec(X, IY)))
        if any(not dom.is_zero(u) for u in vec_sub(lhs, rhs)):
            h5_ok, h5_wit = False, f"integrability fails on (e{q + a},e{q + b})"
            break
    rep.conditions.append(ConditionResult("h5", h5_ok, h5_wit))
    return rep


def _isotropy_kernel(spec: BracketSpec) -> list[list]:
    """Exact basis of {Z in R^q : mu(Z, R^2m) = 0}."""
    dom = spec.domain
    q, m, n = spec.q, spec.m, spec.n
    if q == 0:
        return []
    rows = []
    for b in range(2 * m):
        for c in range(n):
            rows.append([spec.mu_full(z, spec.q + b)[c] for z in range(q)])
    return _nullspace(rows, q, dom)


def _nullspace(rows: list[list], ncols: int, dom) -> list[list]:
    """Null space basis of a matrix given by rows, over the scalar domain."""
    mat = [list(r) for r in rows if any(not dom.is_zero(x) for x in r)]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(mat)):
            if not dom.is_zero(mat[i][c]):
                piv = i
                break
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = dom.one() / mat[r][c]
        mat[r] = [inv * x for x in mat[r]]
        for i in range(len(mat)):
            if i != r and not dom.is_zero(mat[i][c]):
                f = mat[i][c]
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fcol in free:
        v = [dom.zero()] * ncols
        v[fcol] = dom.one()
        for rr, pc in enumerate(pivots):
            v[pc] = -mat[rr][fcol]
        basis.append(v)
    return basis


def reduce_non_effective(spec: BracketSpec):
    """Drop the trivially acting part of the isotropy; returns (q', new spec)."""
    dom = spec.domain
    kernel = _isotropy_kernel(spec)
    if not kernel:
        return spec.q, spec
    q, m, n = spec.q, spec.m, spec.n
    # complement: coordinate vectors independent from the kernel
    chosen: list[list] = [list(k) for k in kernel]
    comp_idx: list[int] = []
    for z in range(q):
        cand = basis_vector(q, z, dom)
        if _independent(chosen + [cand], q, dom):
            chosen.append(cand)
            comp_idx.append(z)
    qp = len(comp_idx)
    # basis matrix B: columns = kernel vectors then complement vectors
    cols = [list(k) for k in kernel] + [basis_vector(q, z, dom) for z in comp_idx]
    nnew = qp + 2 * m

    def reexpress_h(hvec):
        """Coordinates of an R^q vector in the (kernel | complement) basis,
        keeping only the complement part."""
        coords = _solve(cols, hvec, dom)
        return coords[len(kernel):]

    def old_vector(i_new):
        # new basis vector i (0..qp-1 complement isotropy, then m-block)
        if i_new < qp:
            return basis_vector(n, comp_idx[i_new], dom)
        return basis_vector(n, q + (i_new - qp), dom)

    mu_new = {}
    for a, b in itertools.combinations(range(nnew), 2):
        v = spec.mu_vec(old_vector(a), old_vector(b))
        out = reexpress_h(v[:q]) + v[q:]
        if any(not dom.is_zero(x) for x in out):
            mu_new[(a, b)] = out
    new = BracketSpec(qp, m, mu_new, dom, spec.name + "|effective", spec.params)
    if _isotropy_kernel(new):
        raise InternalConsistencyError("reduction left a non-effective isotropy part")
    return qp, new


def _independent(vectors: list[list], ncols: int, dom) -> bool:
    rows = [list(v) for v in vectors]
    # columns of the relation matrix are the candidate vectors
    return not _nullspace([list(col) for col in zip(*rows)], len(rows), dom)


def _solve(cols: list[list], target: list, dom) -> list:
    """Solve sum_i x_i cols[i] = target exactly (unique solution expected)."""
    k = len(cols)
    nrows = len(target)
    aug = [[cols[j][i] for j in range(k)] + [target[i]] for i in range(nrows)]
    r = 0
    pivots = []
    for c in range(k):
        piv = None
        for i in range(r, nrows):
            if not dom.is_zero(aug[i][c]):
                piv = i
                break
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = dom.one() / aug[r][c]
        aug[r] = [inv * x for x in aug[r]]
        for i in range(nrows):
            if i != r and not dom.is_zero(aug[i][c]):
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
    sol = [dom.zero()] * k
    for rr, pc in enumerate(pivots):
        sol[pc] = aug[rr][k]
    return sol


# -- bracket split and torsion ingredients --------------------------------------


def split_bracket(spec: BracketSpec):
    """Coordinate projections of mu on m-pairs: (mu_h, mu_m) as dicts."""
    mu_h, mu_m = {}, {}
    dom = spec.domain
    for a, b in itertools.combinations(range(2 * spec.m), 2):
        h = spec.mu_h(a, b)
        mm = spec.mu_m(a, b)
        if any(not dom.is_zero(x) for x in h):
            mu_h[(a, b)] = h
        if any(not dom.is_zero(x) for x in mm):
            mu_m[(a, b)] = mm
    return mu_h, mu_m


@dataclass
class TorsionData:
    N: dict                    # (a,b) a<b -> R^{2m} vector
    F: KForm
    F_plus: KForm
    F_minus: KForm

    def N_vec(self, spec, x, y):
        dom = spec.domain
        out = [dom.zero()] * (2 * spec.m)
        for a in range(2 * spec.m):
            if dom.is_zero(x[a]):
                continue
            for b in range(2 * spec.m):
                if dom.is_zero(y[b]):
                    continue
                v = self.N.get((a, b)) if a < b else None
                if a > b and (b, a) in self.N:
                    v = [-c for c in self.N[(b, a)]]
                if v is None:
                    continue
                coeff = x[a] * y[b]
                for c, val in enumerate(v):
                    out[c] = out[c] + coeff * val
        return out


def torsion_ingredients(spec: BracketSpec) -> TorsionData:
    dom = spec.domain
    n2 = 2 * spec.m
    I = spec.I
    e = [basis_vector(n2, i, dom) for i in range(n2)]
    Ie = [mat_vec(I, v) for v in e]

    N = {}
    for a, b in itertools.combinations(range(n2), 2):
        v = vec_sub(spec.mu_m_vec(Ie[a], Ie[b]), spec.mu_m(a, b))
        v = vec_sub(v, mat_vec(I, vec_add(spec.mu_m_vec(Ie[a], e[b]),
                                          spec.mu_m_vec(e[a], Ie[b]))))
        if any(not dom.is_zero(x) for x in v):
            N[(a, b)] = v

    comp = {}
    for a, b, c in itertools.combinations(range(n2), 3):
        val = (dot(spec.mu_m_vec(Ie[a], Ie[b]), e[c])
               + dot(spec.mu_m_vec(Ie[b], Ie[c]), e[a])
               + dot(spec.mu_m_vec(Ie[c], Ie[a]), e[b]))
        if not dom.is_zero(val):
            comp[(a, b, c)] = val
    F = KForm(n2, 3, comp)
    F_minus = lambda3_minus(F, I, dom)
    F_plus = F.sub(F_minus, dom)
    return TorsionData(N, F, F_plus, F_minus)


# -- connections -----------------------------------------------------------------


def levi_civita(spec: BracketSpec) -> list[list[list]]:
    """S: R^{2m} -> so(2m), one matrix per m-basis vector."""
    dom = spec.domain
    n2 = 2 * spec.m
    half = dom.from_fraction("1/2")
    e = [basis_vector(n2, i, dom) for i in range(n2)]
    out = []
    for x in range(n2):
        M = mat_zero(n2, dom)
        for y in range(n2):
            for z in range(n2):
                v = dot(spec.mu_m(x, y), e[z]) + dot(spec.mu_m(z, x), e[y]) \
                    + dot(spec.mu_m(z, y), e[x])
                M[z][y] = -half * v
        out.append(M)
    return out


def gauduchon_connection(spec: BracketSpec, t, tors: TorsionData | None = None,
                         S: list | None = None) -> list[list[list]]:
    """A^t: R^{2m} -> u(m).  t is a scalar of the spec's domain (or symbolic)."""
    dom = spec.domain
    n2 = 2 * spec.m
    I = spec.I
    tors = tors or torsion_ingredients(spec)
    S = S or levi_civita(spec)
    quarter = dom.from_fraction("1/4")
    half = dom.from_fraction("1/2")
    cp = (t + 1) * quarter
    cm = (t - 1) * quarter
    e = [basis_vector(n2, i, dom) for i in range(n2)]
    Ie = [mat_vec(I, v) for v in e]
    out = []
    for x in range(n2):
        M = mat_zero(n2, dom)
        for y in range(n2):
            for z in range(n2):
                val = S[x][z][y] \
                    - cp * tors.F_plus.evaluate([e[x], Ie[y], Ie[z]], dom) \
                    - cm * tors.F_plus.evaluate([e[x], e[y], e[z]], dom) \
                    + quarter * dot(tors.N_vec(spec, e[y], e[z]), e[x]) \
                    - half * tors.F_minus.evaluate([e[x], e[y], e[z]], dom)
                M[z][y] = val
        _assert_unitary(M, I, dom, f"A^t(e{x})")
        out.append(M)
    return out


def _assert_unitary(M, I, dom, label: str):
    n = len(M)
    for i in range(n):
        for j in range(i, n):
            if not dom.is_zero(M[i][j] + M[j][i]):
                raise InternalConsistencyError(f"{label} is not skew-symmetric")
    if not mat_is_zero(commutator(M, I), dom):
        raise InternalConsistencyError(f"{label} does not commute with I")


# -- curvature --------------------------------------------------------------------


def _conn_endo(C: list, v: Sequence, dom):
    M = mat_zero(len(v), dom)
    for a, c in enumerate(v):
        if not dom.is_zero(c):
            M = mat_add(M, mat_scale(c, C[a]))
    return M


def _curvature(spec: BracketSpec, C: list) -> dict:
    dom = spec.domain
    n2 = 2 * spec.m
    out = {}
    for a, b in itertools.combinations(range(n2), 2):
        M = spec.ad_h(spec.mu_h(a, b))
        M = mat_sub(M, commutator(C[a], C[b]))
        M = mat_sub(M, _conn_endo(C, spec.mu_m(a, b), dom))
        out[(a, b)] = M
    return out


def riemann_curvature(spec: BracketSpec, S: list | None = None) -> dict:
    return _curvature(spec, S or levi_civita(spec))


def gauduchon_curvature_torsion(spec: BracketSpec, t, A: list | None = None):
    """(Omega_t, T_t); Omega entries are in u(m), T values are vectors."""
    dom = spec.domain
    A = A or gauduchon_connection(spec, t)
    Om = _curvature(spec, A)
    n2 = 2 * spec.m
    e = [basis_vector(n2, i, dom) for i in range(n2)]
    T = {}
    for a, b in itertools.combinations(range(n2), 2):
        v = vec_sub(vec_sub(mat_vec(A[a], e[b]), mat_vec(A[b], e[a])), spec.mu_m(a, b))
        T[(a, b)] = v
    return Om, T


def curvature_value(curv: dict, a: int, b: int, n2: int, dom):
    if a == b:
        return mat_zero(n2, dom)
    if a < b:
        return curv[(a, b)]
    return mat_scale(-dom.one(), curv[(b, a)])


def rho2_matrix(spec: BracketSpec, Om: dict) -> list[list]:
    W = mat_zero(2 * spec.m, spec.domain)
    for k in range(spec.m):
        W = mat_add(W, Om[(2 * k, 2 * k + 1)])
    return W


def ricci_and_scalar(spec: BracketSpec, Om: dict):
    """(rho1, rho2, scal) with both Ricci forms as KForms; asserts the two
    scalar traces agree."""
    dom = spec.domain
    n2 = 2 * spec.m
    I = spec.I
    half = dom.from_fraction("1/2")
    Icol = [[I[r][c] for r in range(n2)] for c in range(n2)]
    comp1 = {}
    for i, j in itertools.combinations(range(n2), 2):
        cij = complex_trace(curvature_value(Om, i, j, n2, dom), dom)
        MJ = mat_zero(n2, dom)
        for a in range(n2):
            if dom.is_zero(Icol[i][a]):
                continue
            for b in range(n2):
                if dom.is_zero(Icol[j][b]):
                    continue
                MJ = mat_add(MJ, mat_scale(Icol[i][a] * Icol[j][b],
                                           curvature_value(Om, a, b, n2, dom)))
        v = half * (cij + complex_trace(MJ, dom))
        if not dom.is_zero(v):
            comp1[(i, j)] = v
    rho1 = KForm(n2, 2, comp1)

    W = rho2_matrix(spec, Om)
    comp2 = {}
    for i, j in itertools.combinations(range(n2), 2):
        if not dom.is_zero(W[i][j]):
            comp2[(i, j)] = W[i][j]
    rho2 = KForm(n2, 2, comp2)

    two = dom.from_fraction(2)
    scal1 = two * complex_trace_form(rho1, dom)
    scal2 = two * complex_trace_form(rho2, dom)
    if not dom.is_zero(scal1 - scal2):
        raise InternalConsistencyError("2Tr(rho1) != 2Tr(rho2)")
    return rho1, rho2, scal2


def lee_form(spec: BracketSpec, tors: TorsionData | None = None) -> list:
    """Lee form extracted at t = 1 via tr(T^t(X, .)) = (t+1)/2 theta(X).

    The extraction degenerates only at t = -1; independence of the choice is
    asserted by re-extracting at t = 0."""
    dom = spec.domain
    tors = tors or torsion_ingredients(spec)

    def torsion_trace(t):
        A = gauduchon_connection(spec, t, tors=tors)
        _, T = gauduchon_curvature_torsion(spec, t, A=A)
        n2 = 2 * spec.m
        out = []
        for x in range(n2):
            acc = dom.zero()
            for b in range(n2):
                if x == b:
                    continue
                v = T[(x, b)] if x < b else [-c for c in T[(b, x)]]
                acc = acc + v[b]
            out.append(acc)
        return out

    theta = torsion_trace(dom.one())
    half = dom.from_fraction(Fraction(1, 2))
    other = torsion_trace(dom.zero())
    for a, b in zip(theta, other):
        if not dom.is_zero(half * a - b):
            raise InternalConsistencyError("Lee form extraction is t-dependent")
    return theta


# -- covariant derivatives and s-tuples --------------------------------------------


def covariant_derivative(spec: BracketSpec, Q: MultiTensor, C: list,
                         order: int = 1) -> MultiTensor:
    """Iterated covariant derivative of an invariant tensor:
    (D Q)(X; rest) = (-C(X) . Q)(rest)."""
    dom = spec.domain
    n2 = 2 * spec.m
    T = Q
    for _ in range(order):
        out = MultiTensor(n2, T.rank + 1, T.has_endo, dom.zero())
        for x in range(n2):
            U = derivation_action(mat_scale(-dom.one(), C[x]), T, dom)
            for key, val in U.comp.items():
                out.set((x,) + key, val, dom)
        T = out
    return T


def _rm_tensor(spec: BracketSpec, Rm: dict) -> MultiTensor:
    dom = spec.domain
    n2 = 2 * spec.m
    T = MultiTensor(n2, 2, True, dom.zero())
    for (a, b), M in Rm.items():
        for r in range(n2):
            for c in range(n2):
                if not dom.is_zero(M[r][c]):
                    T.set((a, b, r, c), M[r][c], dom)
                    T.set((b, a, r, c), -M[r][c], dom)
    return T


@dataclass
class DerivativeTuple:
    """theta^s: covariant J-derivatives D^1J..D^{s+2}J and Rm-derivatives
    D^0Rm..D^sRm, all with respect to the Levi-Civita connection."""
    s: int
    J_derivs: list          # [D^1 J, ..., D^{s+2} J]
    Rm_derivs: list         # [Rm, D Rm, ..., D^s Rm]


def hermitian_s_tuple(spec: BracketSpec, s: int = 2, verify: bool = True) -> DerivativeTuple:
    if s < 0:
        raise ValueError("s must be >= 0")
    dom = spec.domain
    S = levi_civita(spec)
    Rm = riemann_curvature(spec, S)
    Jt = MultiTensor.from_endo(spec.I, dom)
    J_derivs = []
    T = Jt
    for _ in range(s + 2):
        T = covariant_derivative(spec, T, S, 1)
        J_derivs.append(T)
    Rm_derivs = [_rm_tensor(spec, Rm)]
    for _ in range(s):
        Rm_derivs.append(covariant_derivative(spec, Rm_derivs[-1], S, 1))
    tup = DerivativeTuple(s, J_derivs, Rm_derivs)
    if verify:
        check_x1_identities(spec, tup, Rm)
    return tup


def check_x1_identities(spec: BracketSpec, tup: DerivativeTuple, Rm: dict | None = None):
    """Assert the curvature-model identities (pair symmetry, first Bianchi,
    and the Ricci-type alternations on higher derivatives)."""
    dom = spec.domain
    n2 = 2 * spec.m
    Rm = Rm or riemann_curvature(spec)
    e = [basis_vector(n2, i, dom) for i in range(n2)]

    # (i) pair symmetry <Rm(a,b)e_c, e_d> = <Rm(c,d)e_a, e_b>
    for a, b in itertools.combinations(range(n2), 2):
        for c, d in itertools.combinations(range(n2), 2):
            lhs = curvature_value(Rm, a, b, n2, dom)[d][c]
            rhs = curvature_value(Rm, c, d, n2, dom)[b][a]
            if not dom.is_zero(lhs - rhs):
                raise InternalConsistencyError(f"pair symmetry fails on ({a},{b},{c},{d})")
    # (ii) first Bianchi
    for a, b, c in itertools.combinations(range(n2), 3):
        v = vec_add(vec_add(mat_vec(curvature_value(Rm, a, b, n2, dom), e[c]),
                            mat_vec(curvature_value(Rm, b, c, n2, dom), e[a])),
                    mat_vec(curvature_value(Rm, c, a, n2, dom), e[b]))
        if any(not dom.is_zero(x) for x in v):
            raise InternalConsistencyError(f"first Bianchi fails on ({a},{b},{c})")

    def antisym_check(T: MultiTensor, base: MultiTensor, label: str):
        # T(x1,x2,rest) - T(x2,x1,rest) = -(Rm(x1,x2) . base)(rest)
        for x1, x2 in itertools.combinations(range(n2), 2):
            R = curvature_value(Rm, x1, x2, n2, dom)
            D = derivation_action(R, base, dom)
            keys = set()
            for key in T.comp:
                if key[0] == x1 and key[1] == x2:
                    keys.add(key[2:])
                if key[0] == x2 and key[1] == x1:
                    keys.add(key[2:])
            keys |= set(D.comp.keys())
            for rest in keys:
                lhs = T.get((x1, x2) + rest) - T.get((x2, x1) + rest)
                if not dom.is_zero(lhs + D.get(rest)):
                    raise InternalConsistencyError(f"identity {label} fails at {x1},{x2},{rest}")

    # (vii): D^2J alternation against Rm acting on I
    Jt = MultiTensor.from_endo(spec.I, dom)
    if tup.s >= 0 and len(tup.J_derivs) >= 2:
        antisym_check(tup.J_derivs[1], Jt, "vii")
    # (viii): D^{k+2}J vs D^kJ for 1 <= k <= s
    for k in range(1, tup.s + 1):
        antisym_check(tup.J_derivs[k + 1], tup.J_derivs[k - 1], "viii")
    # (vi): D^{k+2}Rm vs D^kRm for 0 <= k <= s-2
    for k in range(0, tup.s - 1):
        antisym_check(tup.Rm_derivs[k + 2], tup.Rm_derivs[k], "vi")


# -- Singer invariant and Killing generators -----------------------------------------


def unitary_basis(m: int, dom) -> list[list[list]]:
    """Basis of u(m) as real 2m x 2m matrices (complex pairs adjacent)."""
    out = []
    n2 = 2 * m
    one = dom.one()

    def put(M, p, qq, block):
        for i in range(2):
            for j in range(2):
                if block[i][j]:
                    M[2 * p + i][2 * qq + j] = one if block[i][j] > 0 else -one

    rot = [[0, -1], [1, 0]]
    ident = [[1, 0], [0, 1]]
    for p in range(m):
        M = mat_zero(n2, dom)
        put(M, p, p, rot)
        out.append(M)
    for p, qq in itertools.combinations(range(m), 2):
        M = mat_zero(n2, dom)
        put(M, p, qq, ident)
        put(M, qq, p, [[-1, 0], [0, -1]])
        out.append(M)
        M = mat_zero(n2, dom)
        put(M, p, qq, rot)
        put(M, qq, p, rot)
        out.append(M)
    return out


def so_basis(n2: int, dom) -> list[list[list]]:
    out = []
    for a, b in itertools.combinations(range(n2), 2):
        M = mat_zero(n2, dom)
        M[a][b] = -dom.one()
        M[b][a] = dom.one()
        out.append(M)
    return out


def _constant_domain_check(spec: BracketSpec, what: str):
    if spec.domain.backend != "exact" or spec.params:
        raise TypeError(f"{what} requires an exact spec with all parameters "
                        f"instantiated to rationals")
    for vec in spec.mu_store.values():
        for c in vec:
            if isinstance(c, RationalFunction) and not c.is_constant():
                raise TypeError(f"{what} requires constant structure constants")


@dataclass
class SingerResult:
    dims: list[int]
    k_jg: int


def singer_invariant(spec: BracketSpec, kmax: int | None = None) -> SingerResult:
    """Isotropy filtration dims j(0) >= j(1) >= ... and the first
    stabilization order."""
    _constant_domain_check(spec, "singer_invariant")
    dom = spec.domain
    m = spec.m
    kmax = kmax if kmax is not None else m * m + 1
    S = levi_civita(spec)
    Rm = riemann_curvature(spec, S)
    U = unitary_basis(m, dom)
    Jt = MultiTensor.from_endo(spec.I, dom)
    J_derivs = [covariant_derivative(spec, Jt, S, 1)]
    Rm_derivs = [_rm_tensor(spec, Rm)]

    def rows_for(tensor):
        acts = [derivation_action(B, tensor, dom) for B in U]
        keys = set()
        for a in acts:
            keys.update(a.comp.keys())
        return [[a.get(k) for a in acts] for k in sorted(keys)]

    dims = []
    rows: list[list] = []
    k = 0
    while True:
        while len(J_derivs) < k + 2:
            J_derivs.append(covariant_derivative(spec, J_derivs[-1], S, 1))
        while len(Rm_derivs) < k + 1:
            Rm_derivs.append(covariant_derivative(spec, Rm_derivs[-1], S, 1))
        if k == 0:
            for i in range(0, 1):
                rows += rows_for(Rm_derivs[i])
            for j in range(1, 3):
                rows += rows_for(J_derivs[j - 1])
        else:
            rows += rows_for(Rm_derivs[k])
            rows += rows_for(J_derivs[k + 2 - 1])
        dims.append(len(_nullspace(rows, len(U), dom)))
        if len(dims) >= 2 and dims[-1] == dims[-2]:
            return SingerResult(dims, len(dims) - 2)
        if k >= kmax:
            raise InternalConsistencyError(
                f"Singer filtration did not stabilize within kmax={kmax}")
        k += 1


@dataclass
class KillingResult:
    basis: list        # list of (v: list, A: matrix) pairs
    dim: int
    orders_used: int


def killing_generators(spec: BracketSpec, kmax: int | None = None) -> KillingResult:
    """Basis of the real holomorphic Killing generators (v, A), by solving
    v . D^{k+1}J + A . D^kJ = 0 and v . D^{k+1}Rm + A . D^kRm = 0 for
    increasing k until the solution space stabilizes."""
    _constant_domain_check(spec, "killing_generators")
    dom = spec.domain
    m = spec.m
    n2 = 2 * m
    kmax = kmax if kmax is not None else m * m + 2
    S = levi_civita(spec)
    Rm = riemann_curvature(spec, S)
    SO = so_basis(n2, dom)
    nA = len(SO)
    Jt = MultiTensor.from_endo(spec.I, dom)
    J_derivs = [Jt, covariant_derivative(spec, Jt, S, 1)]
    Rm_derivs = [_rm_tensor(spec, Rm), covariant_derivative(spec, _rm_tensor(spec, Rm), S, 1)]

    def eq_rows(Tk: MultiTensor, Tk1: MultiTensor):
        """Rows of v . Tk1 + A . Tk = 0 in the unknowns (v, A-coords)."""
        acts = [derivation_action(B, Tk, dom) for B in SO]
        keys = set()
        for a in acts:
            keys.update(a.comp.keys())
        for key in Tk1.comp:
            keys.add(key[1:])
        rows = []
        for key in sorted(keys):
            row = [Tk1.get((x,) + key) for x in range(n2)]
            row += [a.get(key) for a in acts]
            rows.append(row)
        return rows

    rows: list[list] = []
    dims: list[int] = []
    k = 0
    while True:
        while len(J_derivs) < k + 2:
            J_derivs.append(covariant_derivative(spec, J_derivs[-1], S, 1))
        while len(Rm_derivs) < k + 2:
            Rm_derivs.append(covariant_derivative(spec, Rm_derivs[-1], S, 1))
        rows += eq_rows(J_derivs[k], J_derivs[k + 1])
        rows += eq_rows(Rm_derivs[k], Rm_derivs[k + 1])
        sol = _nullspace(rows, n2 + nA, dom)
        dims.append(len(sol))
        if len(dims) >= 2 and dims[-1] == dims[-2]:
            basis = []
            for vec in sol:
                v = vec[:n2]
                A = mat_zero(n2, dom)
                for c, B in zip(vec[n2:], SO):
                    if not dom.is_zero(c):
                        A = mat_add(A, mat_scale(c, B))
                basis.append((v, A))
            res = KillingResult(basis, len(basis), k + 1)
            _check_killing(spec, res, Rm)
            return res
        if k >= kmax:
            raise InternalConsistencyError(
                f"Killing solution space did not stabilize within kmax={kmax}")
        k += 1


def _check_killing(spec: BracketSpec, res: KillingResult, Rm: dict):
    dom = spec.domain
    n2 = 2 * spec.m
    # v-components span R^{2m}
    vrows = [list(v) for v, _ in res.basis]
    if vrows:
        nullity = len(_nullspace([[row[i] for row in vrows] for i in range(n2)],
                                 len(vrows), dom))
        rank = len(vrows) - nullity
    else:
        rank = 0
    if rank != n2:
        raise InternalConsistencyError(
            "Killing generators do not span the tangent space: invalid bracket input")
    # closure under the Nomizu bracket
    flat = []
    for v, A in res.basis:
        flat.append(list(v) + [A[r][c] for r in range(n2) for c in range(n2)])
    for (v, A), (w, B) in itertools.combinations(res.basis, 2):
        bv, bA = nomizu_bracket(spec, (v, A), (w, B), Rm)
        cand = list(bv) + [bA[r][c] for r in range(n2) for c in range(n2)]
        if _independent(flat + [cand], len(cand), dom):
            raise InternalConsistencyError(
                "Killing generators are not closed under the Nomizu bracket")


def nomizu_bracket(spec: BracketSpec, a, b, Rm: dict):
    """[(v,A),(w,B)] = (Aw - Bv, [A,B] + Rm(v,w))."""
    dom = spec.domain
    n2 = 2 * spec.m
    v, A = a
    w, B = b
    first = vec_sub(mat_vec(A, w), mat_vec(B, v))
    R = mat_zero(n2, dom)
    for i in range(n2):
        if dom.is_zero(v[i]):
            continue
        for j in range(n2):
            if dom.is_zero(w[j]):
                continue
            R = mat_add(R, mat_scale(v[i] * w[j], curvature_value(Rm, i, j, n2, dom)))
    second = mat_add(commutator(A, B), R)
    return first, second


# -- rescaling, sectional curvature, flags ----------------------------------------


def rescale(spec: BracketSpec, c) -> BracketSpec:
    """(c.mu): h-argument brackets unchanged, mu_h -> mu_h/c^2, mu_m -> mu_m/c."""
    dom = spec.domain
    if isinstance(c, (int, Fraction)):
        c = dom.from_fraction(c)
    if dom.is_zero(c):
        raise ValueError("rescaling constant must be nonzero")
    q = spec.q
    inv2 = dom.one() / (c * c)
    inv1 = dom.one() / c
    mu = {}
    for (a, b), vec in spec.mu_store.items():
        if a < q:
            mu[(a, b)] = list(vec)
        else:
            mu[(a, b)] = [x * inv2 for x in vec[:q]] + [x * inv1 for x in vec[q:]]
    out = BracketSpec(spec.q, spec.m, mu, dom, spec.name + "|rescaled", spec.params)
    rep = validate(out)
    if not rep.ok:
        raise InternalConsistencyError("rescaling broke h1-h4")
    return out


def sectional_curvature(spec: BracketSpec, Rm: dict, X: Sequence, Y: Sequence,
                        normalize: bool = False):
    """sec(X,Y) = <Rm(X,Y)X, Y>, optionally divided by |X|^2|Y|^2 - <X,Y>^2."""
    dom = spec.domain
    n2 = 2 * spec.m
    M = mat_zero(n2, dom)
    for i in range(n2):
        if dom.is_zero(X[i]):
            continue
        for j in range(n2):
            if dom.is_zero(Y[j]):
                continue
            M = mat_add(M, mat_scale(X[i] * Y[j], curvature_value(Rm, i, j, n2, dom)))
    val = dot(mat_vec(M, X), Y)
    if normalize:
        denom = dot(X, X) * dot(Y, Y) - dot(X, Y) * dot(X, Y)
        if dom.is_zero(denom):
            raise ValueError("sectional curvature of linearly dependent vectors")
        val = val / denom
    return val


def rescaling_exponent(spec: BracketSpec, a: int = 0, b: int = 1,
                       cs: Sequence[int] = (2, 3, 5)) -> int:
    """Empirical integer e with sec(c.mu) = c^-e sec(mu) on the basis plane
    (a,b).  Measured because the source material prints 1/c where the metric
    scaling g -> c^2 g classically forces 1/c^2; this measures, not asserts."""
    dom = spec.domain
    n2 = 2 * spec.m
    X = basis_vector(n2, a, dom)
    Y = basis_vector(n2, b, dom)
    base = sectional_curvature(spec, riemann_curvature(spec), X, Y)
    if dom.is_zero(base):
        raise ValueError("base sectional curvature vanishes; pick another plane")
    exps = set()
    for c in cs:
        scaled_spec = rescale(spec, c)
        scaled = sectional_curvature(scaled_spec, riemann_curvature(scaled_spec), X, Y)
        ratio = as_fraction(base / scaled)
        neg = abs(ratio) < 1
        if neg:
            ratio = 1 / ratio
        e = 0
        while ratio % c == 0:
            ratio /= c
            e += 1
        if ratio != 1:
            raise InternalConsistencyError(f"non-integer rescaling exponent at c={c}")
        exps.add(-e if neg else e)
    if len(exps) != 1:
        raise InternalConsistencyError(f"inconsistent rescaling exponents {exps}")
    return exps.pop()


def metric_flags(spec: BracketSpec) -> dict:
    dom = spec.domain
    n2 = 2 * spec.m
    tors = torsion_ingredients(spec)
    integrable = not tors.N

    def mu_m(a, b):
        return spec.mu_m(a, b)

    omega = KForm(n2, 2, {(2 * k, 2 * k + 1): dom.one() for k in range(spec.m)})
    domega = coboundary(mu_m, n2, omega, dom)
    almost_kahler = domega.is_zero(dom)
    if spec.m == 1:
        balanced = True
    else:
        power = omega
        for _ in range(spec.m - 2):
            power = wedge(power, omega, dom)
        dpow = coboundary(mu_m, n2, power, dom)
        balanced = dpow.is_zero(dom)
    return {"integrable": integrable, "almost_kahler": almost_kahler,
            "balanced": balanced}


# -- audits ------------------------------------------------------------------------


@dataclass
class AuditReport:
    torsion_identity_ok: bool
    curvature_identity_ok: bool
    max_residual: float | None   # None for exact backend (residuals exactly 0)

    @property
    def ok(self) -> bool:
        return self.torsion_identity_ok and self.curvature_identity_ok


def connection_audit(spec: BracketSpec, t) -> AuditReport:
    """Two theorem-level identities linking the Gauduchon data back to the
    Levi-Civita data, each computed along two independent formula paths:

      torsion:   2<G+(X,Y),Z> = <T(X,Y),Z> - <T(Y,Z),X> + <T(Z,X),Y>
                 with G+ := S + A
      curvature: Om - Rm = X . (D_Y G-) - Y . (D_X G-) - [G-_X, G-_Y]
                 with G- := S - A  (the (1,2)-tensor nabla - D)
    """
    dom = spec.domain
    n2 = 2 * spec.m
    S = levi_civita(spec)
    A = gauduchon_connection(spec, t)
    Om, T = gauduchon_curvature_torsion(spec, t, A=A)
    Rm = riemann_curvature(spec, S)
    e = [basis_vector(n2, i, dom) for i in range(n2)]

    def tval(x, y):
        if x == y:
            return [dom.zero()] * n2
        return T[(x, y)] if x < y else [-c for c in T[(y, x)]]

    residuals = []
    tors_ok = True
    Gp = [mat_add(S[i], A[i]) for i in range(n2)]
    for X in range(n2):
        for Y in range(n2):
            GXY = mat_vec(Gp[X], e[Y])
            for Z in range(n2):
                r = (dom.from_fraction(2) * GXY[Z]
                     - tval(X, Y)[Z] + tval(Y, Z)[X] - tval(Z, X)[Y])
                if not dom.is_zero(r):
                    tors_ok = False
                residuals.append(r)

    Gm = [mat_sub(S[i], A[i]) for i in range(n2)]

    def gm_of(v):
        return _conn_endo(Gm, v, dom)

    curv_ok = True
    for X, Y in itertools.combinations(range(n2), 2):
        # X . (D_Y Gm) as an endomorphism: -[S(Y), Gm_X] + Gm_{S(Y)X}
        E1 = mat_add(mat_sub(mat_mul(Gm[X], S[Y]), mat_mul(S[Y], Gm[X])),
                     gm_of(mat_vec(S[Y], e[X])))
        E2 = mat_add(mat_sub(mat_mul(Gm[Y], S[X]), mat_mul(S[X], Gm[Y])),
                     gm_of(mat_vec(S[X], e[Y])))
        rhs = mat_sub(mat_sub(E1, E2), commutator(Gm[X], Gm[Y]))
        lhs = mat_sub(Om[(X, Y)], Rm[(X, Y)])
        Dm = mat_sub(lhs, rhs)
        for row in Dm:
            for val in row:
                if not dom.is_zero(val):
                    curv_ok = False
                residuals.append(val)

    max_res = None
    if dom.backend == "numeric":
        max_res = max(abs(r.value) for r in residuals) if residuals else 0.0
    return AuditReport(tors_ok, curv_ok, max_res)
