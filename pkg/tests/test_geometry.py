"""Core geometry: validation, bracket splitting, torsion ingredients,
connections, curvature, Ricci data, Lee form, flags, rescaling, audits.

Worked-example targets are transcribed by hand from the source tables; the
independent oracles (Koszul, wedge-equation, formula re-evaluation) never
share code paths with the operations they check."""

import itertools
from fractions import Fraction

import pytest

from ghl import geometry as geo
from ghl.fileio import load_ghl
from ghl.multilinear import (basis_vector, mat_is_zero, mat_mul, mat_sub,
                             mat_vec, mat_zero, dot)
from ghl.scalars import ExactDomain, FractionDomain, RationalFunction

from conftest import TEST_DATA


def RF(name):
    return RationalFunction.param(name)


def mats_equal(dom, M, rows):
    """Compare a scalar matrix against a matrix of parseable expressions."""
    from ghl.exprparse import parse_expression, to_scalar
    edom = ExactDomain(("alpha", "beta", "r", "v", "t"))
    for i, row in enumerate(rows):
        for j, cell in enumerate(row):
            want = to_scalar(parse_expression(str(cell)), edom)
            if not dom.eq(M[i][j], want):
                return False
    return True


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


def test_validate_iwasawa(iwasawa):
    rep = iwasawa.report
    assert rep.ok
    assert all(rep.condition(h).passed for h in ("h1", "h2", "h3", "h4"))
    assert rep.integrable


def test_validate_kodaira_thurston(kodaira_thurston):
    rep = kodaira_thurston.report
    assert rep.ok
    assert not rep.integrable


def test_validate_broken_jacobi_witness():
    loaded = load_ghl(TEST_DATA / "broken-jacobi.ghl")
    rep = loaded.report
    assert not rep.ok
    h1 = rep.condition("h1")
    assert not h1.passed
    assert "(e0,e1,e2)" in h1.witness


def test_validate_broken_h2_witness():
    loaded = load_ghl(TEST_DATA / "broken-h2.ghl")
    rep = loaded.report
    assert rep.condition("h1").passed
    h2 = rep.condition("h2")
    assert not h2.passed and h2.witness


# ---------------------------------------------------------------------------
# non-effective reduction
# ---------------------------------------------------------------------------


def test_reduce_effective_unchanged(sphere):
    qp, out = geo.reduce_non_effective(sphere.spec)
    assert qp == sphere.spec.q == 1
    assert out is sphere.spec


def _sphere_plus_dead_generator():
    """Sphere spec extended by a second isotropy generator acting trivially."""
    dom = FractionDomain()
    z = lambda: [Fraction(0)] * 4

    def vec(**kw):
        v = z()
        for k, val in kw.items():
            v[int(k[1:])] = Fraction(val)
        return v
    # coordinates: e0 = Z (live), e1 = Z' (dead), e2,e3 = m-block
    mu = {(0, 2): vec(i3=1), (0, 3): vec(i2=-1), (2, 3): vec(i0=1)}
    return geo.BracketSpec(2, 1, mu, dom, "sphere+dead")


def test_reduce_drops_dead_generator():
    spec = _sphere_plus_dead_generator()
    assert not geo.validate(spec).condition("h4").passed
    qp, out = geo.reduce_non_effective(spec)
    assert qp == 1
    rep = geo.validate(out)
    assert rep.ok
    # reduced algebra is the sphere: mu_h(e0,e1) = Z, sec = 1
    Rm = geo.riemann_curvature(out)
    dom = out.domain
    X = basis_vector(2, 0, dom)
    Y = basis_vector(2, 1, dom)
    assert geo.sectional_curvature(out, Rm, X, Y) == 1


def test_reduce_symbolic_parameters():
    """Reduction also works over the rational-function field: a dead
    generator next to a live one whose action is scaled by a parameter."""
    dom = ExactDomain(("a",))
    s = RF("a")
    z = dom.zero()
    o = dom.one()
    mu = {(0, 2): [z, z, z, s], (0, 3): [z, z, -s, z], (2, 3): [o, z, z, z]}
    spec = geo.BracketSpec(2, 1, mu, dom, "sym-dead", ("a",))
    qp, out = geo.reduce_non_effective(spec)
    assert qp == 1
    assert geo.validate(out).condition("h4").passed


def test_reduce_kernel_dimension_matches_rank_oracle():
    """Null-space oracle: kernel dimension of Z -> ad(Z)|m via sympy."""
    sympy = pytest.importorskip("sympy")
    spec = _sphere_plus_dead_generator()
    rows = []
    for b in range(2):
        for c in range(4):
            rows.append([spec.mu_full(z, 2 + b)[c] for z in range(2)])
    M = sympy.Matrix([[sympy.Rational(x) for x in row] for row in rows])
    assert len(M.nullspace()) == 2 - 1
    qp, _ = geo.reduce_non_effective(spec)
    assert qp == 2 - len(M.nullspace())


# ---------------------------------------------------------------------------
# bracket split and torsion ingredients
# ---------------------------------------------------------------------------


def test_split_iwasawa(iwasawa):
    mu_h, mu_m = geo.split_bracket(iwasawa.spec)
    assert mu_h == {}
    assert set(mu_m) == {(0, 2), (0, 3), (1, 2), (1, 3)}


def test_split_sphere(sphere):
    mu_h, mu_m = geo.split_bracket(sphere.spec)
    assert list(mu_h) == [(0, 1)]
    assert mu_m == {}
    assert mu_h[(0, 1)][0] == 1


def test_split_kodaira_printed_bracket(kodaira):
    _, mu_m = geo.split_bracket(kodaira.spec)
    dom = kodaira.spec.domain
    a, b, r, v = (RF(n) for n in ("alpha", "beta", "r", "v"))
    val = mu_m[(0, 1)]
    assert dom.eq(val[0], a / r)
    assert dom.eq(val[1], -b / r)
    assert dom.eq(val[3], -v / r ** 2)
    assert dom.is_zero(val[2])


def test_iwasawa_torsion_ingredients(iwasawa):
    spec = iwasawa.spec
    dom = spec.domain
    tors = geo.torsion_ingredients(spec)
    assert tors.N == {}
    assert tors.F_minus.is_zero(dom)
    a = RF("alpha")
    expected = {(0, 2, 4): -a, (0, 3, 5): -a, (1, 2, 5): -a, (1, 3, 4): a}
    assert set(tors.F.comp) == set(expected)
    for key, want in expected.items():
        assert dom.eq(tors.F.comp[key], want)
    assert tors.F_plus.eq(tors.F, dom)


def test_iwasawa_F_equals_dc_omega_via_coboundary(iwasawa):
    """Dual route: F = -J(d omega) through the coboundary machinery."""
    from ghl.multilinear import KForm, coboundary, wedge
    spec = iwasawa.spec
    dom = spec.domain
    n2 = 6
    omega = KForm(n2, 2, {(2 * k, 2 * k + 1): dom.one() for k in range(3)})
    domega = coboundary(spec.mu_m, n2, omega, dom)
    # F = -J(d omega) with coframe transport J e^i = sum_k J[k][i] e^k;
    # evaluated on vectors that reads F(X,Y,Z) = (d omega)(JX, JY, JZ).
    J = spec.I
    Jcols = [[J[r][c] for r in range(n2)] for c in range(n2)]
    F = geo.torsion_ingredients(spec).F
    for key in itertools.combinations(range(n2), 3):
        vecs = [Jcols[k] for k in key]
        lhs = domega.evaluate(vecs, dom)
        assert dom.eq(lhs, F.component(key, dom))


def test_kodaira_F_printed(kodaira):
    spec = kodaira.spec
    dom = spec.domain
    tors = geo.torsion_ingredients(spec)
    a, b, r, v = (RF(n) for n in ("alpha", "beta", "r", "v"))
    want = {
        (0, 1, 3): -(a ** 2 / v + b ** 2 / v + v / r ** 2),
        (0, 2, 3): (a ** 2 + b ** 2) * a * r / v ** 2 + a / r,
        (1, 2, 3): -((a ** 2 + b ** 2) * b * r / v ** 2 + b / r),
    }
    assert set(tors.F.comp) == set(want)
    for key, value in want.items():
        assert dom.eq(tors.F.comp[key], value)
    assert tors.N == {}          # integrable
    assert tors.F_minus.is_zero(dom)


def test_kodaira_thurston_ingredients(kodaira_thurston):
    spec = kodaira_thurston.spec
    dom = spec.domain
    tors = geo.torsion_ingredients(spec)
    assert tors.F.is_zero(dom)   # almost-Kaehler
    assert tors.N                # non-integrable


def test_fplus_fminus_relation_random_two_step():
    """F+ + F- = F and F- = 1/4 cyclic<N> on random 2-step nilpotent
    brackets (image in the center: Jacobi automatic).  In real dimension 4
    both sides of the N-relation vanish identically (Lambda^3_- = 0 for
    m = 2); the m = 3 cases with nonzero F- live in test_nonintegrable."""
    import random
    rng = random.Random(3)
    dom = FractionDomain()
    n2 = 4
    quarter = dom.from_fraction(Fraction(1, 4))
    for _ in range(8):
        mu = {}
        for (aa, bb) in ((0, 1), (0, 2), (1, 2)):
            vec = [Fraction(0)] * 4
            vec[3] = Fraction(rng.randint(-2, 2))
            if vec[3]:
                mu[(aa, bb)] = vec
        spec = geo.BracketSpec(0, 2, mu, dom, "rand2step")
        if not geo.validate(spec).ok:
            continue
        tors = geo.torsion_ingredients(spec)
        assert tors.F_plus.add(tors.F_minus, dom).eq(tors.F, dom)
        e = [basis_vector(n2, i, dom) for i in range(n2)]
        for key in itertools.combinations(range(n2), 3):
            X, Y, Z = (e[k] for k in key)
            cyc = (dot(tors.N_vec(spec, X, Y), Z)
                   + dot(tors.N_vec(spec, Y, Z), X)
                   + dot(tors.N_vec(spec, Z, X), Y))
            assert dom.eq(tors.F_minus.component(key, dom), quarter * cyc)


# ---------------------------------------------------------------------------
# connections
# ---------------------------------------------------------------------------

# S^mu(e_a) for the Iwasawa threefold, transcribed from the worked example:
# entries are (row, col) positions of +1/-1 inside a factor alpha/2.
IWASAWA_S = {
    0: {(2, 4): 1, (3, 5): 1, (4, 2): -1, (5, 3): -1},
    1: {(2, 5): 1, (3, 4): -1, (4, 3): 1, (5, 2): -1},
    2: {(0, 4): -1, (1, 5): -1, (4, 0): 1, (5, 1): 1},
    3: {(0, 5): -1, (1, 4): 1, (4, 1): -1, (5, 0): 1},
    4: {(0, 2): -1, (1, 3): 1, (2, 0): 1, (3, 1): -1},
    5: {(0, 3): -1, (1, 2): -1, (2, 1): 1, (3, 0): 1},
}

IWASAWA_A = {
    0: {(2, 4): -1, (3, 5): -1, (4, 2): 1, (5, 3): 1},
    1: {(2, 5): -1, (3, 4): 1, (4, 3): -1, (5, 2): 1},
    2: {(0, 4): 1, (1, 5): 1, (4, 0): -1, (5, 1): -1},
    3: {(0, 5): 1, (1, 4): -1, (4, 1): 1, (5, 0): -1},
    4: {},
    5: {},
}


def sparse_mat(n, entries, coeff, dom):
    M = mat_zero(n, dom)
    for (i, j), sign in entries.items():
        M[i][j] = coeff * dom.from_fraction(sign)
    return M


def test_levi_civita_abelian_zero(abelian2):
    S = geo.levi_civita(abelian2.spec)
    dom = abelian2.spec.domain
    assert all(mat_is_zero(M, dom) for M in S)


def test_levi_civita_iwasawa_printed(iwasawa):
    spec = iwasawa.spec
    dom = spec.domain
    S = geo.levi_civita(spec)
    half_a = RF("alpha") / 2
    for x, entries in IWASAWA_S.items():
        want = sparse_mat(6, entries, half_a, dom)
        assert all(dom.eq(S[x][i][j], want[i][j]) for i in range(6) for j in range(6))


def test_levi_civita_numeric_matches_formula_reevaluation(kodaira_thurston):
    """Numeric backend: re-evaluate the defining cyclic formula directly."""
    spec = kodaira_thurston.spec
    dom = spec.domain
    S = geo.levi_civita(spec)
    n2 = 4
    e = [basis_vector(n2, i, dom) for i in range(n2)]
    for x in range(n2):
        for y in range(n2):
            for z in range(n2):
                want = -0.5 * (dot(spec.mu_m_vec(e[x], e[y]), e[z]).value
                               + dot(spec.mu_m_vec(e[z], e[x]), e[y]).value
                               + dot(spec.mu_m_vec(e[z], e[y]), e[x]).value)
                assert abs(S[x][z][y].value - want) < 1e-12


def test_gauduchon_iwasawa_printed(iwasawa):
    spec = iwasawa.spec
    dom = spec.domain
    t = geo.symbolic_t()
    A = geo.gauduchon_connection(spec, t)
    coeff = RF("alpha") * (t - 1) / 2
    for x, entries in IWASAWA_A.items():
        want = sparse_mat(6, entries, coeff, dom)
        assert all(dom.eq(A[x][i][j], want[i][j]) for i in range(6) for j in range(6))
    assert mat_is_zero(A[4], dom) and mat_is_zero(A[5], dom)


def test_gauduchon_abelian_zero_any_t(abelian2):
    A = geo.gauduchon_connection(abelian2.spec, geo.symbolic_t())
    assert all(mat_is_zero(M, abelian2.spec.domain) for M in A)


def test_gauduchon_kt_t_independent(kodaira_thurston, kt_exact):
    # exact variant: A carries no t symbolically
    A = geo.gauduchon_connection(kt_exact.spec, geo.symbolic_t())
    dom = kt_exact.spec.domain
    for M in A:
        for row in M:
            for x in row:
                if isinstance(x, RationalFunction):
                    assert "t" not in x.num.vars and "t" not in x.den.vars
    # numeric variant: equal at two sample t values
    spec = kodaira_thurston.spec
    ndom = spec.domain
    A0 = geo.gauduchon_connection(spec, ndom.from_fraction(0))
    A7 = geo.gauduchon_connection(spec, ndom.from_fraction(Fraction(7, 3)))
    for M0, M7 in zip(A0, A7):
        for r0, r7 in zip(M0, M7):
            for x0, x7 in zip(r0, r7):
                assert abs(x0.value - x7.value) < 1e-9


# ---------------------------------------------------------------------------
# curvature
# ---------------------------------------------------------------------------


def koszul_oracle(spec):
    """Independent Riemann curvature for q = 0 specs: Levi-Civita matrices
    from the Koszul formula, then Rm(X,Y) = C_{mu(X,Y)} - [C_X, C_Y]."""
    dom = spec.domain
    n2 = 2 * spec.m
    e = [basis_vector(n2, i, dom) for i in range(n2)]
    C = []
    for a in range(n2):
        M = mat_zero(n2, dom)
        for b in range(n2):
            for c in range(n2):
                val = (dot(spec.mu_m(a, b), e[c]) - dot(spec.mu_m(b, c), e[a])
                       + dot(spec.mu_m(c, a), e[b]))
                M[c][b] = dom.from_fraction(Fraction(1, 2)) * val
        C.append(M)

    def Cv(v):
        M = mat_zero(n2, dom)
        for a in range(n2):
            if not dom.is_zero(v[a]):
                for i in range(n2):
                    for j in range(n2):
                        M[i][j] = M[i][j] + v[a] * C[a][i][j]
        return M

    out = {}
    for a, b in itertools.combinations(range(n2), 2):
        out[(a, b)] = mat_sub(Cv(spec.mu_m(a, b)),
                              mat_sub(mat_mul(C[a], C[b]), mat_mul(C[b], C[a])))
    return out


def test_riemann_abelian_zero(abelian2):
    Rm = geo.riemann_curvature(abelian2.spec)
    assert all(mat_is_zero(M, abelian2.spec.domain) for M in Rm.values())


def test_riemann_sphere(sphere):
    spec = sphere.spec
    dom = spec.domain
    Rm = geo.riemann_curvature(spec)
    assert dom.eq(Rm[(0, 1)][0][1], dom.from_fraction(-1))
    assert dom.eq(Rm[(0, 1)][1][0], dom.from_fraction(1))
    X = basis_vector(2, 0, dom)
    Y = basis_vector(2, 1, dom)
    assert geo.sectional_curvature(spec, Rm, X, Y) == 1


def test_riemann_iwasawa_matches_koszul_oracle(iwasawa):
    inst = iwasawa.spec.instantiate({"alpha": 1})
    Rm = geo.riemann_curvature(inst)
    oracle = koszul_oracle(inst)
    dom = inst.domain
    for key in oracle:
        assert all(dom.eq(Rm[key][i][j], oracle[key][i][j])
                   for i in range(6) for j in range(6))


IWASAWA_OMEGA = {
    (0, 1): (Fraction(1, 2), {(2, 3): -1, (3, 2): 1, (4, 5): 1, (5, 4): -1}),
    (0, 2): (Fraction(1, 4), {(0, 2): 1, (1, 3): 1, (2, 0): -1, (3, 1): -1}),
    (0, 3): (Fraction(1, 4), {(0, 3): 1, (1, 2): -1, (2, 1): 1, (3, 0): -1}),
    (1, 2): (Fraction(1, 4), {(0, 3): -1, (1, 2): 1, (2, 1): -1, (3, 0): 1}),
    (1, 3): (Fraction(1, 4), {(0, 2): 1, (1, 3): 1, (2, 0): -1, (3, 1): -1}),
    (2, 3): (Fraction(1, 2), {(0, 1): -1, (1, 0): 1, (4, 5): 1, (5, 4): -1}),
}


def test_gauduchon_curvature_iwasawa_printed(iwasawa):
    spec = iwasawa.spec
    dom = spec.domain
    t = geo.symbolic_t()
    Om, T = geo.gauduchon_curvature_torsion(spec, t)
    base = RF("alpha") ** 2 * (t - 1) ** 2
    for key, M in Om.items():
        if key in IWASAWA_OMEGA:
            frac, entries = IWASAWA_OMEGA[key]
            want = sparse_mat(6, entries, base * frac, dom)
        else:
            want = mat_zero(6, dom)
        assert all(dom.eq(M[i][j], want[i][j]) for i in range(6) for j in range(6))


def test_chern_flatness_iwasawa(iwasawa):
    spec = iwasawa.spec
    Om, _ = geo.gauduchon_curvature_torsion(spec, RationalFunction.const(1))
    assert all(mat_is_zero(M, spec.domain) for M in Om.values())


def test_gauduchon_abelian_curvature_torsion_zero(abelian2):
    Om, T = geo.gauduchon_curvature_torsion(abelian2.spec, geo.symbolic_t())
    dom = abelian2.spec.domain
    assert all(mat_is_zero(M, dom) for M in Om.values())
    assert all(all(dom.is_zero(x) for x in v) for v in T.values())


def test_kaehler_case_reduces_to_riemannian(sphere):
    """F = N = 0: the Gauduchon family collapses onto Levi-Civita."""
    spec = sphere.spec
    dom = spec.domain
    t = geo.symbolic_t()
    S = geo.levi_civita(spec)
    A = geo.gauduchon_connection(spec, t)
    assert all(all(dom.eq(a, s) for ra, rs in zip(MA, MS) for a, s in zip(ra, rs))
               for MA, MS in zip(A, S))
    Om, T = geo.gauduchon_curvature_torsion(spec, t)
    Rm = geo.riemann_curvature(spec)
    for key in Om:
        assert all(dom.eq(Om[key][i][j], Rm[key][i][j]) for i in range(2) for j in range(2))
    assert all(all(dom.is_zero(x) for x in v) for v in T.values())


# ---------------------------------------------------------------------------
# Ricci forms and scalar curvature
# ---------------------------------------------------------------------------


def test_ricci_iwasawa_printed(iwasawa):
    spec = iwasawa.spec
    dom = spec.domain
    t = geo.symbolic_t()
    Om, _ = geo.gauduchon_curvature_torsion(spec, t)
    rho1, rho2, scal = geo.ricci_and_scalar(spec, Om)
    assert rho1.is_zero(dom)
    assert dom.is_zero(scal)
    W = geo.rho2_matrix(spec, Om)
    coeff = RF("alpha") ** 2 * (t - 1) ** 2 / 2
    want = sparse_mat(6, {(0, 1): -1, (1, 0): 1, (2, 3): -1, (3, 2): 1,
                          (4, 5): 2, (5, 4): -2}, coeff, dom)
    assert all(dom.eq(W[i][j], want[i][j]) for i in range(6) for j in range(6))


def test_scal_kodaira_closed_form(kodaira):
    spec = kodaira.spec
    dom = spec.domain
    t = geo.symbolic_t()
    Om, _ = geo.gauduchon_curvature_torsion(spec, t)
    _, _, scal = geo.ricci_and_scalar(spec, Om)
    a, b, r, v = (RF(n) for n in ("alpha", "beta", "r", "v"))
    want = -(t - 1) * (a ** 2 * r ** 2 + b ** 2 * r ** 2 + v ** 2) ** 3 / (r ** 4 * v ** 4)
    assert dom.eq(scal, want)


def test_rho2_kodaira_chern_printed(kodaira):
    spec = kodaira.spec
    dom = spec.domain
    Om, _ = geo.gauduchon_curvature_torsion(spec, RationalFunction.const(1))
    rho1, _, scal = geo.ricci_and_scalar(spec, Om)
    assert rho1.is_zero(dom)       # first Chern-Ricci form vanishes
    assert dom.is_zero(scal)
    W = geo.rho2_matrix(spec, Om)
    a, b, r, v = (RF(n) for n in ("alpha", "beta", "r", "v"))
    L1 = a ** 2 * r ** 2 + b ** 2 * r ** 2 + v ** 2
    L2 = a ** 2 * r ** 2 + b ** 2 * r ** 2 - v ** 2
    e01 = -L1 ** 2 * L2 / (2 * r ** 4 * v ** 4)
    e02 = -L1 ** 2 * a / (r ** 3 * v ** 3)
    e03 = -L1 ** 2 * b / (r ** 3 * v ** 3)
    e12 = L1 ** 2 * b / (r ** 3 * v ** 3)
    e13 = -L1 ** 2 * a / (r ** 3 * v ** 3)
    e23 = L1 ** 2 * L2 / (2 * r ** 4 * v ** 4)
    want = [[0, e01, e02, e03],
            [-e01, 0, e12, e13],
            [-e02, -e12, 0, e23],
            [-e03, -e13, -e23, 0]]
    for i in range(4):
        for j in range(4):
            w = want[i][j]
            w = RationalFunction.const(0) if isinstance(w, int) else w
            assert dom.eq(W[i][j], w)


def test_ricci_abelian_all_zero(abelian2):
    spec = abelian2.spec
    dom = spec.domain
    Om, _ = geo.gauduchon_curvature_torsion(spec, geo.symbolic_t())
    rho1, rho2, scal = geo.ricci_and_scalar(spec, Om)
    assert rho1.is_zero(dom) and rho2.is_zero(dom) and dom.is_zero(scal)


# ---------------------------------------------------------------------------
# Lee form
# ---------------------------------------------------------------------------


def test_lee_iwasawa_balanced_zero(iwasawa):
    theta = geo.lee_form(iwasawa.spec)
    dom = iwasawa.spec.domain
    assert all(dom.is_zero(x) for x in theta)


def test_lee_abelian_zero(abelian2):
    theta = geo.lee_form(abelian2.spec)
    assert all(abelian2.spec.domain.is_zero(x) for x in theta)


def test_lee_kodaira_wedge_equation_oracle(kodaira):
    """Solve d(omega) = theta ^ omega by exact linear algebra and compare."""
    from ghl.multilinear import KForm, coboundary
    spec = kodaira.spec
    dom = spec.domain
    theta = geo.lee_form(spec)
    assert any(not dom.is_zero(x) for x in theta)
    n2 = 4
    omega = KForm(n2, 2, {(0, 1): dom.one(), (2, 3): dom.one()})
    domega = coboundary(spec.mu_m, n2, omega, dom)
    # theta ^ omega on basis triples, theta treated as unknown -> solved
    # here directly with the engine's theta, then checked component-wise.
    for key in itertools.combinations(range(n2), 3):
        acc = dom.zero()
        for pos in range(3):
            x = key[pos]
            rest = tuple(k for i, k in enumerate(key) if i != pos)
            sign = (-1) ** pos
            acc = acc + dom.from_fraction(sign) * theta[x] * omega.component(rest, dom)
        assert dom.eq(domega.component(key, dom), acc)


def test_lee_proportionality_symbolic_t(all_bundled):
    """tr T^t(X, .) = (t+1)/2 theta(X) identically in t on every spec."""
    for name, loaded in all_bundled.items():
        spec = loaded.spec
        dom = spec.domain
        n2 = 2 * spec.m
        theta = geo.lee_form(spec)
        if dom.backend == "numeric":
            ts = [dom.from_fraction(Fraction(1, 3)), dom.from_fraction(4)]
        else:
            ts = [geo.symbolic_t()]
        for t in ts:
            _, T = geo.gauduchon_curvature_torsion(spec, t)
            for x in range(n2):
                acc = dom.zero()
                for b in range(n2):
                    if b == x:
                        continue
                    v = T[(x, b)] if x < b else [-c for c in T[(b, x)]]
                    acc = acc + v[b]
                want = (t + 1) * theta[x] * dom.from_fraction(Fraction(1, 2))
                assert dom.is_zero(acc - want), (name, x)


# ---------------------------------------------------------------------------
# flags, rescaling, sectional curvature, audit
# ---------------------------------------------------------------------------


def test_metric_flags_all_bundled(all_bundled):
    expected = {
        "abelian2": (True, True, True),
        "sphere": (True, True, True),
        "iwasawa": (True, False, True),
        "kodaira": (True, False, False),
        "kodaira-thurston": (False, True, True),
    }
    for name, loaded in all_bundled.items():
        flags = geo.metric_flags(loaded.spec)
        want = expected[name]
        assert (flags["integrable"], flags["almost_kahler"], flags["balanced"]) == want, name


def test_rescale_iwasawa(iwasawa):
    out = geo.rescale(iwasawa.spec, 2)
    dom = out.domain
    assert dom.eq(out.mu_m(0, 2)[4], RF("alpha") / 2)


def test_rescale_sphere_isotropy_part(sphere):
    out = geo.rescale(sphere.spec, 3)
    dom = out.domain
    assert dom.eq(out.mu_h(0, 1)[0], dom.from_fraction(Fraction(1, 9)))
    # brackets with an isotropy argument are unchanged
    assert dom.eq(out.mu_full(0, 1)[2], dom.from_fraction(1))


def test_rescaling_exponent_measured(sphere):
    # recorded empirical exponent: sec(c.mu) = c^-2 sec(mu)
    assert geo.rescaling_exponent(sphere.spec) == 2


def test_sectional_curvature_normalized(sphere):
    spec = sphere.spec
    dom = spec.domain
    Rm = geo.riemann_curvature(spec)
    X = [dom.from_fraction(2), dom.from_fraction(0)]
    Y = [dom.from_fraction(1), dom.from_fraction(3)]
    raw = geo.sectional_curvature(spec, Rm, X, Y)
    norm = geo.sectional_curvature(spec, Rm, X, Y, normalize=True)
    assert norm == 1
    assert raw == 36        # |X|^2 |Y|^2 - <X,Y>^2 = 4*10 - 4 = 36
    with pytest.raises(ValueError):
        geo.sectional_curvature(spec, Rm, X, X, normalize=True)


def test_connection_audit_all_bundled(all_bundled):
    for name, loaded in all_bundled.items():
        spec = loaded.spec
        t = geo.symbolic_t() if spec.domain.backend == "exact" \
            else spec.domain.from_fraction(Fraction(5, 7))
        rep = geo.connection_audit(spec, t)
        assert rep.ok, name
        if rep.max_residual is not None:
            assert rep.max_residual < 1e-9
