"""Exterior/tensor algebra over an abstract scalar domain.

Vectors are plain lists of scalars, endomorphisms are row-major lists of rows
in column-action convention (column b holds the image of e_b).  KForm stores
sparse antisymmetric components on strictly increasing index tuples.
MultiTensor is a dense-by-meaning, sparse-by-storage covariant tensor with an
optional endomorphism slot (used for covariant derivatives of J and Rm).

Form-evaluation convention: (e^{i1}^...^e^{ik})(e_{j1},...,e_{jk}) =
det(delta^{i_a}_{j_b}), no 1/k! factors.  The coboundary follows the sign the
worked examples pin down: (d phi)(X0,...,Xk) =
-sum_{i<j} (-1)^{i+j} phi(mu(X_i,X_j), X_0,...,^X_i,...,^X_j,...,X_k),
so for brackets [e0,e1] = -e3 one gets d(e^3) = -e^0^e^1.
"""

from __future__ import annotations

import itertools
from typing import Callable, Sequence

__all__ = [
    "basis_vector", "vec_add", "vec_sub", "vec_scale", "dot",
    "mat_zero", "mat_identity", "istd", "mat_add", "mat_sub", "mat_scale",
    "mat_mul", "mat_vec", "commutator", "mat_is_zero", "mat_eq",
    "KForm", "MultiTensor", "wedge", "interior_product", "coboundary",
    "derivation_action", "pi_11", "lambda3_minus", "complex_trace",
    "complex_trace_sym", "complex_trace_form", "gram_schmidt_unitary",
    "FrameError",
]


# -- vectors ----------------------------------------------------------------

def basis_vector(n: int, i: int, dom) -> list:
    v = [dom.zero()] * n
    v[i] = dom.one()
    return v


def vec_add(u, v):
    return [a + b for a, b in zip(u, v)]


def vec_sub(u, v):
    return [a - b for a, b in zip(u, v)]


def vec_scale(c, u):
    return [c * a for a in u]


def dot(u, v):
    it = iter(zip(u, v))
    a, b = next(it)
    acc = a * b
    for a, b in it:
        acc = acc + a * b
    return acc


# -- matrices (column action) ------------------------------------------------

def mat_zero(n: int, dom) -> list[list]:
    z = dom.zero()
    return [[z] * n for _ in range(n)]


def mat_identity(n: int, dom) -> list[list]:
    M = mat_zero(n, dom)
    for i in range(n):
        M[i][i] = dom.one()
    return M


def istd(m: int, dom) -> list[list]:
    """Standard complex structure on R^{2m}: I e_{2k} = e_{2k+1}."""
    M = mat_zero(2 * m, dom)
    one = dom.one()
    for k in range(m):
        M[2 * k + 1][2 * k] = one
        M[2 * k][2 * k + 1] = -one
    return M


def mat_add(A, B):
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_sub(A, B):
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_scale(c, A):
    return [[c * a for a in row] for row in A]


def mat_mul(A, B):
    n = len(A)
    return [[dot(A[i], [B[k][j] for k in range(n)]) for j in range(n)] for i in range(n)]


def mat_vec(A, v):
    return [dot(row, v) for row in A]


def commutator(A, B):
    return mat_sub(mat_mul(A, B), mat_mul(B, A))


def mat_is_zero(A, dom) -> bool:
    return all(dom.is_zero(a) for row in A for a in row)


def mat_eq(A, B, dom) -> bool:
    return all(dom.eq(a, b) for ra, rb in zip(A, B) for a, b in zip(ra, rb))


# -- k-forms ------------------------------------------------------------------

def _sort_sign(idx: Sequence[int]):
    """Sort an index tuple; return (sorted tuple, permutation sign) or
    (None, 0) when an index repeats."""
    idx = list(idx)
    sign = 1
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    for a, b in zip(idx, idx[1:]):
        if a == b:
            return None, 0
    return tuple(idx), sign


class KForm:
    """Sparse antisymmetric k-form on an n-dimensional space."""

    __slots__ = ("n", "degree", "comp")

    def __init__(self, n: int, degree: int, comp=None):
        self.n = n
        self.degree = degree
        self.comp = dict(comp or {})  # strictly increasing tuples -> scalar

    @staticmethod
    def basis(n: int, indices: Sequence[int], dom) -> "KForm":
        key, sign = _sort_sign(indices)
        if key is None:
            return KForm(n, len(indices))
        c = dom.one() if sign > 0 else -dom.one()
        return KForm(n, len(indices), {key: c})

    def component(self, idx: Sequence[int], dom):
        key, sign = _sort_sign(idx)
        if key is None or key not in self.comp:
            return dom.zero()
        c = self.comp[key]
        return c if sign > 0 else -c

    def add(self, other: "KForm", dom) -> "KForm":
        comp = dict(self.comp)
        for k, c in other.comp.items():
            s = comp.get(k)
            s = c if s is None else s + c
            if dom.is_zero(s):
                comp.pop(k, None)
            else:
                comp[k] = s
        return KForm(self.n, self.degree, comp)

    def scale(self, c, dom) -> "KForm":
        if dom.is_zero(c):
            return KForm(self.n, self.degree)
        return KForm(self.n, self.degree, {k: c * v for k, v in self.comp.items()})

    def neg(self) -> "KForm":
        return KForm(self.n, self.degree, {k: -v for k, v in self.comp.items()})

    def sub(self, other: "KForm", dom) -> "KForm":
        return self.add(other.neg(), dom)

    def is_zero(self, dom) -> bool:
        return all(dom.is_zero(c) for c in self.comp.values())

    def eq(self, other: "KForm", dom) -> bool:
        return self.sub(other, dom).is_zero(dom)

    def evaluate(self, vectors: Sequence[Sequence], dom):
        """Full evaluation on self.degree vectors."""
        assert len(vectors) == self.degree
        total = dom.zero()
        for key, c in self.comp.items():
            # sum over permutations of key against the vector slots
            for perm in itertools.permutations(range(self.degree)):
                sign = _perm_sign(perm)
                prod = c if sign > 0 else -c
                ok = True
                for slot, pos in enumerate(perm):
                    fac = vectors[slot][key[pos]]
                    if dom.is_zero(fac):
                        ok = False
                        break
                    prod = prod * fac
                if ok:
                    total = total + prod
        return total


def _perm_sign(perm) -> int:
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j = i
        length = 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def wedge(a: KForm, b: KForm, dom) -> KForm:
    if a.n != b.n:
        raise ValueError("wedge of forms on different spaces")
    deg = a.degree + b.degree
    if deg > a.n:
        return KForm(a.n, deg)
    comp: dict[tuple, object] = {}
    for ka, ca in a.comp.items():
        for kb, cb in b.comp.items():
            key, sign = _sort_sign(ka + kb)
            if key is None:
                continue
            c = ca * cb
            if sign < 0:
                c = -c
            s = comp.get(key)
            s = c if s is None else s + c
            if dom.is_zero(s):
                comp.pop(key, None)
            else:
                comp[key] = s
    return KForm(a.n, deg, comp)


def interior_product(phi: KForm, vectors: Sequence[Sequence], dom):
    """Contract phi against up to phi.degree vectors (in the leading slots).

    Full contraction returns a scalar, partial contraction a lower-degree
    KForm."""
    l = len(vectors)
    if l > phi.degree:
        raise ValueError("more vectors than form slots")
    if any(len(v) != phi.n for v in vectors):
        raise ValueError("dimension mismatch")
    if l == phi.degree:
        return phi.evaluate(vectors, dom)
    out = KForm(phi.n, phi.degree - l)
    comp: dict[tuple, object] = {}
    for key, c in phi.comp.items():
        # choose which positions of key the vectors hit
        for chosen in itertools.permutations(range(phi.degree), l):
            rest = [key[p] for p in sorted(set(range(phi.degree)) - set(chosen))]
            # sign of moving chosen slots to the front, preserving order of rest
            perm = list(chosen) + sorted(set(range(phi.degree)) - set(chosen))
            sign = _perm_sign(_inverse_perm(perm))
            prod = c if sign > 0 else -c
            ok = True
            for slot, pos in enumerate(chosen):
                fac = vectors[slot][key[pos]]
                if dom.is_zero(fac):
                    ok = False
                    break
                prod = prod * fac
            if not ok:
                continue
            rkey, rsign = _sort_sign(rest)
            if rkey is None:
                continue
            if rsign < 0:
                prod = -prod
            s = comp.get(rkey)
            s = prod if s is None else s + prod
            if dom.is_zero(s):
                comp.pop(rkey, None)
            else:
                comp[rkey] = s
    out.comp = comp
    return out


def _inverse_perm(perm):
    inv = [0] * len(perm)
    for i, p in enumerate(perm):
        inv[p] = i
    return inv


def coboundary(mu: Callable[[int, int], Sequence], n: int, phi: KForm, dom) -> KForm:
    """Chevalley-Eilenberg differential in the worked examples' sign:

        (d phi)(X0..Xk) = -sum_{i<j} (-1)^{i+j} phi(mu(Xi,Xj), rest)
    """
    k = phi.degree
    out = KForm(n, k + 1)
    if k + 1 > n:
        return out
    comp: dict[tuple, object] = {}
    for key in itertools.combinations(range(n), k + 1):
        total = dom.zero()
        nonzero = False
        for i, j in itertools.combinations(range(k + 1), 2):
            rest = [key[p] for p in range(k + 1) if p != i and p != j]
            bracket = mu(key[i], key[j])
            acc = dom.zero()
            for c in range(n):
                fc = bracket[c]
                if dom.is_zero(fc):
                    continue
                val = phi.component((c, *rest), dom)
                if dom.is_zero(val):
                    continue
                acc = acc + fc * val
                nonzero = True
            if (i + j) % 2 == 0:
                total = total - acc
            else:
                total = total + acc
        if nonzero and not dom.is_zero(total):
            comp[key] = total
    out.comp = comp
    return out


# -- multi tensors -------------------------------------------------------------

class MultiTensor:
    """Covariant tensor with `rank` vector slots and an optional End slot.

    Components are stored sparsely: keys are (i1..irank) or
    (i1..irank, row, col) when End-valued."""

    __slots__ = ("n", "rank", "has_endo", "comp", "_zero")

    def __init__(self, n: int, rank: int, has_endo: bool, zero, comp=None):
        self.n = n
        self.rank = rank
        self.has_endo = has_endo
        self._zero = zero
        self.comp = dict(comp or {})

    @staticmethod
    def from_endo(M, dom) -> "MultiTensor":
        n = len(M)
        t = MultiTensor(n, 0, True, dom.zero())
        for r in range(n):
            for c in range(n):
                if not dom.is_zero(M[r][c]):
                    t.comp[(r, c)] = M[r][c]
        return t

    @staticmethod
    def from_bilinear(rows, dom) -> "MultiTensor":
        """(0,2)-tensor from a matrix of values T(e_i, e_j) = rows[i][j]."""
        n = len(rows)
        t = MultiTensor(n, 2, False, dom.zero())
        for i in range(n):
            for j in range(n):
                if not dom.is_zero(rows[i][j]):
                    t.comp[(i, j)] = rows[i][j]
        return t

    def get(self, key):
        return self.comp.get(key, self._zero)

    def set(self, key, value, dom):
        if dom.is_zero(value):
            self.comp.pop(key, None)
        else:
            self.comp[key] = value

    def is_zero(self, dom) -> bool:
        return all(dom.is_zero(v) for v in self.comp.values())

    def sub(self, other: "MultiTensor", dom) -> "MultiTensor":
        out = MultiTensor(self.n, self.rank, self.has_endo, self._zero, self.comp)
        for k, v in other.comp.items():
            out.set(k, out.get(k) - v, dom)
        return out

    def endo_at(self, idx: tuple, dom):
        """The End-slot value at covariant indices idx, as a matrix."""
        assert self.has_endo and len(idx) == self.rank
        M = mat_zero(self.n, dom)
        for key, v in self.comp.items():
            if key[:self.rank] == idx:
                M[key[self.rank]][key[self.rank + 1]] = v
        return M


def derivation_action(A, T, dom):
    """Derivation action of A in gl(n) on vectors, forms, endomorphisms and
    MultiTensors: A.v = Av, (A.phi)(X..) = -sum phi(..AXi..), A.M = [A, M],
    and on End-valued tensors the End slot transforms by commutator."""
    if isinstance(T, list) and T and isinstance(T[0], list):   # endomorphism
        return commutator(A, T)
    if isinstance(T, list):                                    # vector
        return mat_vec(A, T)
    if isinstance(T, KForm):
        n = T.n
        comp: dict[tuple, object] = {}
        for key, c in T.comp.items():
            for slot in range(T.degree):
                # (A.phi)_J = -sum_r A[r][J_i] phi_{J:i->r}; scattering from the
                # stored component phi_K this lands at J = K:i->r with weight
                # -A[K_i][r].
                col = key[slot]
                for r in range(n):
                    a = A[col][r]
                    if dom.is_zero(a):
                        continue
                    newkey, sign = _sort_sign(key[:slot] + (r,) + key[slot + 1:])
                    if newkey is None:
                        continue
                    add = -(a * c) if sign > 0 else (a * c)
                    s = comp.get(newkey)
                    s = add if s is None else s + add
                    if dom.is_zero(s):
                        comp.pop(newkey, None)
                    else:
                        comp[newkey] = s
        return KForm(n, T.degree, comp)
    if isinstance(T, MultiTensor):
        n = T.n
        out = MultiTensor(n, T.rank, T.has_endo, T._zero)
        # sparse structure of A, by row and by column
        row_nz = [[(c, A[r][c]) for c in range(n) if not dom.is_zero(A[r][c])]
                  for r in range(n)]
        col_nz = [[(r, A[r][c]) for r in range(n) if not dom.is_zero(A[r][c])]
                  for c in range(n)]
        comp = out.comp
        zero = out._zero
        for key, c in T.comp.items():
            cov = key[:T.rank]
            # covariant slots: same scattering rule as for forms
            for slot in range(T.rank):
                for r, a in row_nz[cov[slot]]:
                    nk = key[:slot] + (r,) + key[slot + 1:]
                    comp[nk] = comp.get(nk, zero) - a * c
            if T.has_endo:
                row, col = key[T.rank], key[T.rank + 1]
                # [A, W]: A@W part
                for r, a in col_nz[row]:
                    nk = cov + (r, col)
                    comp[nk] = comp.get(nk, zero) + a * c
                # -W@A part
                for j, a in row_nz[col]:
                    nk = cov + (row, j)
                    comp[nk] = comp.get(nk, zero) - c * a
        for k in [k for k, v in comp.items() if dom.is_zero(v)]:
            del comp[k]
        return out
    raise TypeError(f"unsupported tensor kind {type(T)!r}")


# -- complex linear algebra helpers -------------------------------------------

def pi_11(alpha: KForm, J, dom) -> KForm:
    """(1,1)-projection of a 2-form: 1/2(a(X,Y) + a(JX,JY))."""
    assert alpha.degree == 2
    n = alpha.n
    half = dom.from_fraction("1/2")
    comp: dict[tuple, object] = {}
    Jcols = [[J[r][c] for r in range(n)] for c in range(n)]
    for i, j in itertools.combinations(range(n), 2):
        v = alpha.component((i, j), dom) + alpha.evaluate([Jcols[i], Jcols[j]], dom)
        v = half * v
        if not dom.is_zero(v):
            comp[(i, j)] = v
    return KForm(n, 2, comp)


def lambda3_minus(F: KForm, J, dom) -> KForm:
    """Projection onto Lambda^3_- : (3,0)+(0,3) part of a real 3-form:
    F^-(X,Y,Z) = 1/4 (F(X,Y,Z) - F(JX,JY,Z) - F(JX,Y,JZ) - F(X,JY,JZ))."""
    assert F.degree == 3
    n = F.n
    quarter = dom.from_fraction("1/4")
    Jcols = [[J[r][c] for r in range(n)] for c in range(n)]
    ident = [basis_vector(n, i, dom) for i in range(n)]
    comp: dict[tuple, object] = {}
    for key in itertools.combinations(range(n), 3):
        e = [ident[k] for k in key]
        je = [Jcols[k] for k in key]
        v = F.component(key, dom) \
            - F.evaluate([je[0], je[1], e[2]], dom) \
            - F.evaluate([je[0], e[1], je[2]], dom) \
            - F.evaluate([e[0], je[1], je[2]], dom)
        v = quarter * v
        if not dom.is_zero(v):
            comp[key] = v
    return KForm(n, 3, comp)


def complex_trace(W, dom):
    """tr^C(J o W) for skew W commuting with I_st: sum_k W[2k, 2k+1]."""
    n = len(W)
    acc = dom.zero()
    for k in range(n // 2):
        acc = acc + W[2 * k][2 * k + 1]
    return acc


def complex_trace_sym(h, dom):
    """tr^C of h in Sym^{1,1}: half the real trace."""
    n = len(h)
    acc = dom.zero()
    for i in range(n):
        acc = acc + h[i][i]
    return dom.from_fraction("1/2") * acc


def complex_trace_form(alpha: KForm, dom):
    """Tr^C_g of a 2-form in a unitary frame: sum_k alpha(e_{2k}, e_{2k+1}).

    Insensitive to the (2,0)+(0,2) part, so no explicit pi_11 is needed."""
    acc = dom.zero()
    for k in range(alpha.n // 2):
        acc = acc + alpha.component((2 * k, 2 * k + 1), dom)
    return acc


# -- unitary Gram-Schmidt (numeric backend) ------------------------------------

class FrameError(ValueError):
    """Gram-Schmidt input is not a positive-definite J-compatible metric."""


def gram_schmidt_unitary(G, J, dom):
    """J-adapted orthonormal frame for a positive-definite symmetric G with
    G(J.,J.) = G.  Input basis is processed in order; each new direction is
    orthonormalized and immediately followed by its J-image, so the output
    satisfies G(w_a,w_b) = delta and J w_{2k} = w_{2k+1}."""
    n = len(G)
    for i in range(n):
        for j in range(n):
            if not dom.eq(G[i][j], G[j][i]):
                raise FrameError("metric matrix is not symmetric")
    JG = mat_mul([list(r) for r in zip(*J)], mat_mul(G, J))  # J^T G J
    for i in range(n):
        for j in range(n):
            if not dom.eq(JG[i][j], G[i][j]):
                raise FrameError("metric is not J-compatible: G(J.,J.) != G")

    def ip(u, v):
        return dot(u, mat_vec(G, v))

    frame: list[list] = []
    for idx in range(n):
        if len(frame) == n:
            break
        v = basis_vector(n, idx, dom)
        for w in frame:
            v = vec_sub(v, vec_scale(ip(v, w), w))
        norm2 = ip(v, v)
        if dom.is_zero(norm2):
            continue
        if float(norm2.value) < 0:
            raise FrameError("metric is not positive definite")
        inv = dom.one() / dom.sqrt(norm2)
        w = vec_scale(inv, v)
        frame.append(w)
        frame.append(mat_vec(J, w))
    if len(frame) != n:
        raise FrameError("metric is not positive definite (rank deficiency)")
    return frame
