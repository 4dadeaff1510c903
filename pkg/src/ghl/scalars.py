"""Exact scalar kernel: sparse multivariate polynomials and rational functions
over Q, plus a tolerance-carrying float backend.

Representation:

  Polynomial      vars:  tuple of parameter names, always sorted alphabetically
                  terms: dict mapping exponent tuples (one int per variable)
                         to Fraction coefficients; zero coefficients are never
                         stored, the zero polynomial has terms == {}
  RationalFunction  num/den Polynomials; den != 0 and its leading coefficient
                  (graded-lex order) is positive.  The pair is NOT reduced to
                  lowest terms: equality and zero tests go through
                  cross-multiplication, which is exact without any GCD.
  NumericScalar   float value + comparison tolerance, used by the numeric
                  backend (square-root-bearing frames).

Term order everywhere is graded lexicographic over the alphabetically sorted
variable list, which makes serialization deterministic.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd as _gcd, isfinite, sqrt as _math_sqrt
from typing import Iterable, Mapping

__all__ = [
    "DegreeGuardError",
    "PoleError",
    "Polynomial",
    "RationalFunction",
    "NumericScalar",
    "ExactDomain",
    "NumericDomain",
    "set_degree_cap",
    "get_degree_cap",
    "DEFAULT_DEGREE_CAP",
    "DEFAULT_TOLERANCE",
]

DEFAULT_DEGREE_CAP = 64
DEFAULT_TOLERANCE = 1e-9

_degree_cap = DEFAULT_DEGREE_CAP


class DegreeGuardError(ArithmeticError):
    """Total degree exceeded the configured cap: expression blowup."""


class PoleError(ZeroDivisionError):
    """A denominator vanished at the requested parameter point."""


def set_degree_cap(cap: int) -> None:
    global _degree_cap
    if cap < 1:
        raise ValueError("degree cap must be positive")
    _degree_cap = cap


def get_degree_cap() -> int:
    return _degree_cap


def _grlex_key(exp: tuple[int, ...]) -> tuple:
    # graded lex: compare total degree first, then exponents left to right.
    return (sum(exp), exp)


class Polynomial:
    """Immutable sparse polynomial with Fraction coefficients."""

    __slots__ = ("vars", "terms")

    def __init__(self, variables: tuple[str, ...], terms: Mapping[tuple[int, ...], Fraction]):
        # Internal constructor; inputs must already be canonical
        # (sorted variables, no zero coefficients).
        object.__setattr__(self, "vars", variables)
        object.__setattr__(self, "terms", dict(terms))

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("Polynomial is immutable")

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero() -> "Polynomial":
        return Polynomial((), {})

    @staticmethod
    def const(c) -> "Polynomial":
        c = Fraction(c)
        return Polynomial((), {} if c == 0 else {(): c})

    @staticmethod
    def variable(name: str) -> "Polynomial":
        return Polynomial((name,), {(1,): Fraction(1)})

    # -- basic queries ------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def leading(self) -> tuple[tuple[int, ...], Fraction]:
        """Leading (monomial, coefficient) in graded-lex order."""
        if not self.terms:
            return ((0,) * len(self.vars), Fraction(0))
        m = max(self.terms, key=_grlex_key)
        return m, self.terms[m]

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.terms)

    def constant_value(self) -> Fraction:
        if not self.terms:
            return Fraction(0)
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return next(iter(self.terms.values()))

    # -- variable alignment -------------------------------------------------

    def _aligned_to(self, variables: tuple[str, ...]) -> "Polynomial":
        if variables == self.vars:
            return self
        pos = [variables.index(v) for v in self.vars]
        n = len(variables)
        terms = {}
        for exp, c in self.terms.items():
            new = [0] * n
            for p, e in zip(pos, exp):
                new[p] = e
            terms[tuple(new)] = c
        return Polynomial(variables, terms)

    @staticmethod
    def _align(a: "Polynomial", b: "Polynomial"):
        if a.vars == b.vars:
            return a, b
        union = tuple(sorted(set(a.vars) | set(b.vars)))
        return a._aligned_to(union), b._aligned_to(union)

    def _trim(self) -> "Polynomial":
        """Drop variables that no longer occur (keeps keys short)."""
        if not self.vars:
            return self
        used = [i for i in range(len(self.vars)) if any(e[i] for e in self.terms)]
        if len(used) == len(self.vars):
            return self
        newvars = tuple(self.vars[i] for i in used)
        terms = {tuple(e[i] for i in used): c for e, c in self.terms.items()}
        return Polynomial(newvars, terms)

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.const(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        a, b = Polynomial._align(self, other)
        terms = dict(a.terms)
        for e, c in b.terms.items():
            s = terms.get(e, Fraction(0)) + c
            if s == 0:
                terms.pop(e, None)
            else:
                terms[e] = s
        return Polynomial(a.vars, terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.const(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return Polynomial.const(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            if c == 0:
                return Polynomial.zero()
            return Polynomial(self.vars, {e: k * c for e, k in self.terms.items()})
        if not isinstance(other, Polynomial):
            return NotImplemented
        a, b = Polynomial._align(self, other)
        if a.is_zero() or b.is_zero():
            return Polynomial.zero()
        cap = _degree_cap
        if a.total_degree() + b.total_degree() > cap:
            raise DegreeGuardError(
                f"product degree {a.total_degree() + b.total_degree()} exceeds cap {cap}"
            )
        if len(b.terms) == 1:
            a, b = b, a
        if len(a.terms) == 1:
            # monomial * polynomial: exponent shift + coefficient scale
            (e1, c1), = a.terms.items()
            if not any(e1):
                return Polynomial(b.vars, {e: c1 * c for e, c in b.terms.items()})
            terms = {tuple(x + y for x, y in zip(e1, e)): c1 * c
                     for e, c in b.terms.items()}
            return Polynomial(a.vars, terms)
        terms: dict[tuple[int, ...], Fraction] = {}
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                s = terms.get(e, Fraction(0)) + c1 * c2
                if s == 0:
                    terms.pop(e, None)
                else:
                    terms[e] = s
        return Polynomial(a.vars, terms)._trim()

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial power must be a non-negative integer")
        result = Polynomial.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.const(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        a, b = Polynomial._align(self, other)
        return a.terms == b.terms

    def __hash__(self):
        return hash((self.vars, tuple(sorted(self.terms.items()))))

    # -- substitution -------------------------------------------------------

    def substitute(self, assignment: Mapping[str, Fraction]) -> "Polynomial":
        """Replace some variables by rational values; others remain."""
        keep = [i for i, v in enumerate(self.vars) if v not in assignment]
        vals = {i: Fraction(assignment[v]) for i, v in enumerate(self.vars) if v in assignment}
        newvars = tuple(self.vars[i] for i in keep)
        terms: dict[tuple[int, ...], Fraction] = {}
        for exp, c in self.terms.items():
            for i, val in vals.items():
                c = c * val ** exp[i]
            key = tuple(exp[i] for i in keep)
            s = terms.get(key, Fraction(0)) + c
            if s == 0:
                terms.pop(key, None)
            else:
                terms[key] = s
        return Polynomial(newvars, terms)._trim()

    def evaluate(self, assignment: Mapping[str, Fraction]) -> Fraction:
        missing = [v for v in self.vars if v not in assignment]
        if missing:
            raise ValueError(f"missing assignment for parameter(s): {', '.join(missing)}")
        return self.substitute(assignment).constant_value()

    # -- serialization ------------------------------------------------------

    def sorted_terms(self):
        """Terms in descending graded-lex order (leading term first)."""
        return sorted(self.terms.items(), key=lambda kv: _grlex_key(kv[0]), reverse=True)

    def text(self) -> str:
        # Round-trip safe under the expression grammar, where unary minus
        # binds inside '^' ("-t^2" would read back as (+t)^2): a leading
        # negative term always spells its coefficient, e.g. "-1*t^2 + 1".
        if not self.terms:
            return "0"
        parts = []
        for exp, c in self.sorted_terms():
            mono = "*".join(
                v if e == 1 else f"{v}^{e}"
                for v, e in zip(self.vars, exp)
                if e
            )
            mag = abs(c)
            coeff = str(mag) if mag.denominator == 1 else f"{mag.numerator}/{mag.denominator}"
            body = coeff if not mono else (mono if mag == 1 else f"{coeff}*{mono}")
            parts.append((c < 0, mono, coeff, body))
        neg, mono, coeff, body = parts[0]
        if not neg:
            out = body
        elif mono:
            out = f"-{coeff}*{mono}"   # explicit coefficient: "-1*t^2", "-3/4*a"
        else:
            out = "-" + body
        for neg, _, _, body in parts[1:]:
            out += (" - " if neg else " + ") + body
        return out

    def __repr__(self):  # pragma: no cover
        return f"Polynomial({self.text()})"


def _content(p: Polynomial) -> Fraction:
    """Positive rational content (gcd of numerators / lcm of denominators)."""
    num_gcd = 0
    den_lcm = 1
    for c in p.terms.values():
        num_gcd = _gcd(num_gcd, c.numerator)
        den_lcm = den_lcm * c.denominator // _gcd(den_lcm, c.denominator)
        if num_gcd == 1 and den_lcm == 1:
            return Fraction(1)
    return Fraction(num_gcd, den_lcm) if num_gcd else Fraction(1)


def _monomial_content(p: Polynomial) -> tuple[int, ...]:
    """Componentwise min exponent over all terms (common monomial factor)."""
    if not p.terms or not p.vars:
        return (0,) * len(p.vars)
    mins = None
    for e in p.terms:
        mins = e if mins is None else tuple(map(min, mins, e))
        if not any(mins):
            break
    return mins


def _divide_monomial(p: Polynomial, mono: tuple[int, ...]) -> Polynomial:
    if not any(mono):
        return p
    return Polynomial(p.vars, {tuple(a - b for a, b in zip(e, mono)): c for e, c in p.terms.items()})._trim()


class RationalFunction:
    """num/den of Polynomials; equality via exact cross-multiplication."""

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Polynomial | None = None):
        if den is None:
            den = Polynomial.const(1)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator polynomial")
        num, den = _heuristic_reduce(num, den)
        _, lead = den.leading()
        if lead < 0:
            num, den = -num, -den
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("RationalFunction is immutable")

    # -- constructors -------------------------------------------------------

    @staticmethod
    def const(c) -> "RationalFunction":
        return RationalFunction(Polynomial.const(c))

    @staticmethod
    def param(name: str) -> "RationalFunction":
        return RationalFunction(Polynomial.variable(name))

    # -- queries ------------------------------------------------------------

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def eq(self, other: "RationalFunction") -> bool:
        """Representation-independent equality (cross-multiplication)."""
        other = _as_rf(other)
        return (self.num * other.den - other.num * self.den).is_zero()

    def variables(self) -> tuple[str, ...]:
        return tuple(sorted(set(self.num.vars) | set(self.den.vars)))

    def as_fraction(self) -> Fraction:
        return self.num.constant_value() / self.den.constant_value()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        other = _as_rf(other)
        if other is NotImplemented:
            return NotImplemented
        if self.den == other.den:
            return RationalFunction(self.num + other.num, self.den)
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other):
        other = _as_rf(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return _as_rf(other) - self

    def __mul__(self, other):
        other = _as_rf(other)
        if other is NotImplemented:
            return NotImplemented
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_rf(other)
        if other is NotImplemented:
            return NotImplemented
        if other.num.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return _as_rf(other) / self

    def inv(self) -> "RationalFunction":
        return RationalFunction.const(1) / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise ValueError("power must be an integer")
        if n < 0:
            return self.inv() ** (-n)
        return RationalFunction(self.num ** n, self.den ** n)

    def __eq__(self, other):
        other = _as_rf(other)
        if other is NotImplemented:
            return NotImplemented
        return self.eq(other)

    def __hash__(self):  # pragma: no cover
        raise TypeError("RationalFunction is unhashable (equality is semantic)")

    # -- substitution / evaluation ------------------------------------------

    def substitute(self, assignment: Mapping[str, Fraction]) -> "RationalFunction":
        den = self.den.substitute(assignment)
        if den.is_zero():
            point = ", ".join(f"{k}={v}" for k, v in sorted(assignment.items()))
            raise PoleError(f"pole at assignment {point}")
        return RationalFunction(self.num.substitute(assignment), den)

    def evaluate(self, assignment: Mapping[str, Fraction]) -> Fraction:
        assignment = {k: Fraction(v) for k, v in assignment.items()}
        den = self.den.evaluate(assignment)
        if den == 0:
            point = ", ".join(f"{k}={v}" for k, v in sorted(assignment.items()))
            raise PoleError(f"pole at assignment {point}")
        return self.num.evaluate(assignment) / den

    # -- serialization ------------------------------------------------------

    def text(self) -> str:
        """Canonical text: expanded polynomials, integer coefficients where
        possible, `(num) / (den)` with den omitted when it is 1."""
        num, den = self.num, self.den
        scale = _content(den)
        if scale != 1:
            num, den = num * (1 / scale), den * (1 / scale)
        nc = _content(num)
        if nc != 0 and nc.denominator != 1:
            # clear remaining fractions in num by scaling both sides
            num = num * nc.denominator
            den = den * nc.denominator
        if den == Polynomial.const(1):
            return num.text()
        if num.is_constant() and den.is_constant():
            return str(num.constant_value() / den.constant_value())
        return f"({num.text()}) / ({den.text()})"

    def __repr__(self):  # pragma: no cover
        return f"RationalFunction({self.text()})"


_ONE_TERMS = {(): Fraction(1)}


def _heuristic_reduce(num: Polynomial, den: Polynomial):
    """Cancel integer content and common monomial content. Keeps blowup in
    check; correctness never depends on it."""
    if num.is_zero():
        return Polynomial.zero(), Polynomial.const(1)
    if not den.vars and den.terms == _ONE_TERMS:
        return num, den
    if len(den.terms) == 1 and den.total_degree() <= 6 and len(num.terms) <= 12:
        # small monomial denominator: cheap integer-content pass only
        cb = _content(den)
        if cb != 1:
            inv = 1 / cb
            return num * inv, den * inv
        return num, den
    a, b = Polynomial._align(num, den)
    mono = tuple(map(min, _monomial_content(a), _monomial_content(b))) if a.vars else ()
    if mono and any(mono):
        a, b = _divide_monomial(a, mono), _divide_monomial(b, mono)
    ca, cb = _content(a), _content(b)
    if ca != 1 or cb != 1:
        g = Fraction(_gcd(ca.numerator * cb.denominator, cb.numerator * ca.denominator),
                     ca.denominator * cb.denominator)
        if g not in (0, 1):
            inv = 1 / g
            a, b = a * inv, b * inv
    return a._trim(), b._trim()


def _as_rf(x):
    if isinstance(x, RationalFunction):
        return x
    if isinstance(x, (int, Fraction)):
        return RationalFunction.const(x)
    if isinstance(x, Polynomial):
        return RationalFunction(x)
    return NotImplemented


class NumericScalar:
    """Finite float with a comparison tolerance.

    Comparison passes when |a-b| <= tol * max(1, |a|, |b|).
    """

    __slots__ = ("value", "tol")

    def __init__(self, value: float, tol: float = DEFAULT_TOLERANCE):
        value = float(value)
        if not isfinite(value):
            raise ValueError("NumericScalar must be finite")
        if tol < 0:
            raise ValueError("tolerance must be non-negative")
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "tol", float(tol))

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("NumericScalar is immutable")

    def _coerce(self, other):
        if isinstance(other, NumericScalar):
            return other
        if isinstance(other, (int, float, Fraction)):
            return NumericScalar(float(other), self.tol)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else NumericScalar(self.value + o.value, max(self.tol, o.tol))

    __radd__ = __add__

    def __neg__(self):
        return NumericScalar(-self.value, self.tol)

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else NumericScalar(self.value - o.value, max(self.tol, o.tol))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else NumericScalar(self.value * o.value, max(self.tol, o.tol))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.value == 0:
            raise ZeroDivisionError("division by numeric zero")
        return NumericScalar(self.value / o.value, max(self.tol, o.tol))

    def __rtruediv__(self, other):
        o = self._coerce(other)
        return o / self

    def __pow__(self, n: int):
        return NumericScalar(self.value ** n, self.tol)

    def sqrt(self) -> "NumericScalar":
        if self.value < 0:
            raise ValueError("sqrt of negative numeric scalar")
        return NumericScalar(_math_sqrt(self.value), self.tol)

    def is_zero(self) -> bool:
        return abs(self.value) <= self.tol

    def eq(self, other) -> bool:
        o = self._coerce(other)
        tol = max(self.tol, o.tol)
        return abs(self.value - o.value) <= tol * max(1.0, abs(self.value), abs(o.value))

    def __eq__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else self.eq(o)

    def __hash__(self):  # pragma: no cover
        raise TypeError("NumericScalar is unhashable")

    def text(self) -> str:
        return repr(self.value)

    def __repr__(self):  # pragma: no cover
        return f"NumericScalar({self.value!r})"


class ExactDomain:
    """Scalar domain Q(params...): values are RationalFunctions."""

    backend = "exact"

    def __init__(self, params: Iterable[str] = ()):
        self.params = tuple(params)

    zero = staticmethod(lambda: RationalFunction.const(0))
    one = staticmethod(lambda: RationalFunction.const(1))

    def from_fraction(self, c) -> RationalFunction:
        return RationalFunction.const(Fraction(c))

    def param(self, name: str) -> RationalFunction:
        if name not in self.params:
            raise KeyError(f"undeclared parameter: {name}")
        return RationalFunction.param(name)

    @staticmethod
    def is_zero(v) -> bool:
        return v.is_zero()

    @staticmethod
    def eq(a, b) -> bool:
        return _as_rf(a).eq(_as_rf(b))

    @staticmethod
    def text(v) -> str:
        return _as_rf(v).text()

    @staticmethod
    def sqrt(v):
        raise TypeError("the exact backend does not provide square roots")


class FractionDomain:
    """Exact domain over plain Q: values are stdlib Fractions.

    Used for fully instantiated specs (Singer/Killing computations and
    sweeps), where Fraction arithmetic is much faster than constant
    RationalFunctions.  Methods tolerate RationalFunction values so symbolic
    t can still flow through mixed expressions."""

    backend = "exact"
    params: tuple = ()

    @staticmethod
    def zero() -> Fraction:
        return Fraction(0)

    @staticmethod
    def one() -> Fraction:
        return Fraction(1)

    @staticmethod
    def from_fraction(c) -> Fraction:
        return Fraction(c)

    @staticmethod
    def param(name: str):
        raise KeyError(f"undeclared parameter: {name}")

    @staticmethod
    def is_zero(v) -> bool:
        if isinstance(v, RationalFunction):
            return v.is_zero()
        return v == 0

    @staticmethod
    def eq(a, b) -> bool:
        if isinstance(a, RationalFunction) or isinstance(b, RationalFunction):
            return _as_rf(a).eq(_as_rf(b))
        return a == b

    @staticmethod
    def text(v) -> str:
        if isinstance(v, RationalFunction):
            return v.text()
        return str(v)

    @staticmethod
    def sqrt(v):
        raise TypeError("the exact backend does not provide square roots")


class NumericDomain:
    """Scalar domain of tolerance-carrying floats."""

    backend = "numeric"

    def __init__(self, params: Iterable[str] = (), tol: float = DEFAULT_TOLERANCE):
        self.params = tuple(params)
        self.tol = tol

    def zero(self) -> NumericScalar:
        return NumericScalar(0.0, self.tol)

    def one(self) -> NumericScalar:
        return NumericScalar(1.0, self.tol)

    def from_fraction(self, c) -> NumericScalar:
        return NumericScalar(float(Fraction(c)), self.tol)

    def param(self, name: str):
        raise TypeError("numeric backend has no symbolic parameters; "
                        "instantiate them via a sample assignment")

    @staticmethod
    def is_zero(v) -> bool:
        return v.is_zero()

    @staticmethod
    def eq(a, b) -> bool:
        a = a if isinstance(a, NumericScalar) else NumericScalar(float(a))
        return a.eq(b)

    @staticmethod
    def text(v) -> str:
        return v.text()

    @staticmethod
    def sqrt(v) -> NumericScalar:
        return v.sqrt()
