"""Exact coefficient arithmetic: Gaussian rationals adjoined sqrt(2), and
polynomials in formal real parameters (beta, nu, b, c1, ...) over that ring.

Every numeric coefficient appearing in the oscillator models lives in the
ring Q(i, sqrt2).  A Scalar stores value = (a + b*i) + (c + d*i)*sqrt2 with
exact Fractions; values coming from the models are always "pure" (either the
sqrt2 part or the plain part vanishes), which is what the (re, im, rt2)
constructor and serialization expose.  Keeping both parts internally makes
the ring closed under addition, so intermediate arithmetic can never leave it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union

Rat = Union[int, Fraction]

_ZERO = Fraction(0)
_ONE = Fraction(1)


def _frac(x: Rat) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected exact rational, got {type(x).__name__}")


def frac_str(q: Fraction) -> str:
    """Render a Fraction as an explicit 'num/den' string."""
    return f"{q.numerator}/{q.denominator}"


def parse_frac(s: str) -> Fraction:
    """Parse 'p/q', 'p' or a decimal string into an exact Fraction."""
    s = s.strip()
    if "/" in s:
        num, den = s.split("/")
        return Fraction(int(num), int(den))
    return Fraction(s)


@dataclass(frozen=True)
class Scalar:
    """Element (a + b*i) + (c + d*i)*sqrt2 of Q(i, sqrt2), exact."""

    a: Fraction = _ZERO
    b: Fraction = _ZERO
    c: Fraction = _ZERO
    d: Fraction = _ZERO

    @staticmethod
    def of(re: Rat = 0, im: Rat = 0, rt2: int = 0) -> "Scalar":
        """Build (re + i*im) * sqrt2**rt2 with rt2 in {0, 1}."""
        if rt2 not in (0, 1):
            raise ValueError("rt2 must be 0 or 1")
        re, im = _frac(re), _frac(im)
        if rt2 == 0:
            return Scalar(re, im, _ZERO, _ZERO)
        return Scalar(_ZERO, _ZERO, re, im)

    @staticmethod
    def zero() -> "Scalar":
        return _S_ZERO

    @staticmethod
    def one() -> "Scalar":
        return _S_ONE

    @staticmethod
    def i() -> "Scalar":
        return _S_I

    @staticmethod
    def inv_sqrt2() -> "Scalar":
        """1/sqrt2 = (1/2) * sqrt2."""
        return Scalar.of(Fraction(1, 2), 0, 1)

    def is_zero(self) -> bool:
        return not (self.a or self.b or self.c or self.d)

    def is_pure(self) -> bool:
        """True when representable as a single (re, im, rt2) triple."""
        return (not self.a and not self.b) or (not self.c and not self.d)

    def is_rational(self) -> bool:
        return not (self.b or self.c or self.d)

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"scalar {self} is not rational")
        return self.a

    @property
    def rt2(self) -> int:
        if self.a or self.b:
            return 0
        return 1 if (self.c or self.d) else 0

    @property
    def re(self) -> Fraction:
        return self.a if self.rt2 == 0 else self.c

    @property
    def im(self) -> Fraction:
        return self.b if self.rt2 == 0 else self.d

    def __add__(self, other: "Scalar") -> "Scalar":
        return Scalar(self.a + other.a, self.b + other.b,
                      self.c + other.c, self.d + other.d)

    def __neg__(self) -> "Scalar":
        return Scalar(-self.a, -self.b, -self.c, -self.d)

    def __sub__(self, other: "Scalar") -> "Scalar":
        return self + (-other)

    def __mul__(self, other: "Scalar") -> "Scalar":
        # (u1 + v1*s)(u2 + v2*s) with s^2 = 2, u, v complex.
        a1, b1, c1, d1 = self.a, self.b, self.c, self.d
        a2, b2, c2, d2 = other.a, other.b, other.c, other.d
        ua = a1 * a2 - b1 * b2 + 2 * (c1 * c2 - d1 * d2)
        ub = a1 * b2 + b1 * a2 + 2 * (c1 * d2 + d1 * c2)
        va = a1 * c2 - b1 * d2 + c1 * a2 - d1 * b2
        vb = a1 * d2 + b1 * c2 + c1 * b2 + d1 * a2
        return Scalar(ua, ub, va, vb)

    def conj(self) -> "Scalar":
        return Scalar(self.a, -self.b, self.c, -self.d)

    def inverse(self) -> "Scalar":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero scalar")
        # z = u + v*s; z * (u - v*s) = u^2 - 2 v^2 =: w in Q(i).
        u = (self.a, self.b)
        v = (self.c, self.d)
        wa = u[0] * u[0] - u[1] * u[1] - 2 * (v[0] * v[0] - v[1] * v[1])
        wb = 2 * (u[0] * u[1] - 2 * v[0] * v[1])
        wn = wa * wa + wb * wb  # |w|^2, a nonzero rational
        # 1/z = (u - v*s) * conj(w) / |w|^2
        conj_w = Scalar(wa / wn, -wb / wn, _ZERO, _ZERO)
        return Scalar(u[0], u[1], -v[0], -v[1]) * conj_w

    def __truediv__(self, other: "Scalar") -> "Scalar":
        return self * other.inverse()

    def abs2(self) -> "Scalar":
        """Scalar times its complex conjugate (real, possibly with sqrt2)."""
        return self * self.conj()

    def to_complex(self) -> complex:
        import math
        s = math.sqrt(2.0)
        return complex(float(self.a) + s * float(self.c),
                       float(self.b) + s * float(self.d))

    def __repr__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for coeff, tag in ((self.a, ""), (self.b, "i"),
                           (self.c, "r2"), (self.d, "i*r2")):
            if coeff:
                parts.append(f"{coeff}{('*' + tag) if tag else ''}")
        return "(" + " + ".join(parts) + ")"


_S_ZERO = Scalar()
_S_ONE = Scalar(_ONE, _ZERO, _ZERO, _ZERO)
_S_I = Scalar(_ZERO, _ONE, _ZERO, _ZERO)

# A monomial is a sorted tuple of (parameter name, positive exponent).
Monomial = tuple

_MONO_ONE: Monomial = ()


def _mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    if not m1:
        return m2
    if not m2:
        return m1
    d = dict(m1)
    for name, e in m2:
        d[name] = d.get(name, 0) + e
    return tuple(sorted(d.items()))


def _mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def _mono_key(m: Monomial):
    return (_mono_degree(m), m)


def _mono_str(m: Monomial) -> str:
    if not m:
        return "1"
    return "*".join(n if e == 1 else f"{n}^{e}" for n, e in m)


class Poly:
    """Polynomial in formal parameters with Scalar coefficients.

    Canonical form: no zero coefficients stored; term order is graded-lex on
    the sorted monomial tuples, so equality and hashing are structural.
    Immutable by convention (the term dict is never mutated after init).
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Scalar] | None = None):
        t = {}
        if terms:
            for m, s in terms.items():
                if not s.is_zero():
                    t[m] = s
        self._terms = t
        self._hash = None

    # -- constructors -------------------------------------------------
    @staticmethod
    def zero() -> "Poly":
        return _P_ZERO

    @staticmethod
    def one() -> "Poly":
        return _P_ONE

    @staticmethod
    def scalar(s: Union[Scalar, Rat]) -> "Poly":
        if not isinstance(s, Scalar):
            s = Scalar.of(_frac(s))
        return Poly({_MONO_ONE: s})

    @staticmethod
    def rational(q: Rat) -> "Poly":
        return Poly.scalar(Scalar.of(_frac(q)))

    @staticmethod
    def i() -> "Poly":
        return Poly.scalar(Scalar.i())

    @staticmethod
    def param(name: str) -> "Poly":
        return Poly({((name, 1),): Scalar.one()})

    @staticmethod
    def affine(const: Rat, coeff: Rat, name: str) -> "Poly":
        """const + coeff * name"""
        return Poly.rational(const) + Poly.rational(coeff) * Poly.param(name)

    # -- queries -------------------------------------------------------
    def terms(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def is_scalar(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and _MONO_ONE in self._terms)

    def scalar_value(self) -> Scalar:
        if self.is_zero():
            return Scalar.zero()
        if not self.is_scalar():
            raise ValueError(f"poly {self} is not a scalar")
        return self._terms[_MONO_ONE]

    def coeff(self, mono: Monomial) -> Scalar:
        return self._terms.get(mono, Scalar.zero())

    def params(self) -> set:
        out = set()
        for m in self._terms:
            for name, _ in m:
                out.add(name)
        return out

    def degree(self) -> int:
        if not self._terms:
            return 0
        return max(_mono_degree(m) for m in self._terms)

    def degree_in(self, names: Iterable[str]) -> int:
        names = set(names)
        best = 0
        for m in self._terms:
            best = max(best, sum(e for n, e in m if n in names))
        return best

    # -- arithmetic ------------------------------------------------------
    def __add__(self, other: "Poly") -> "Poly":
        if not isinstance(other, Poly):
            return NotImplemented
        t = dict(self._terms)
        for m, s in other._terms.items():
            cur = t.get(m)
            t[m] = s if cur is None else cur + s
        return Poly(t)

    def __neg__(self) -> "Poly":
        return Poly({m: -s for m, s in self._terms.items()})

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        if not isinstance(other, Poly):
            return NotImplemented
        if not self._terms or not other._terms:
            return _P_ZERO
        t: dict = {}
        for m1, s1 in self._terms.items():
            for m2, s2 in other._terms.items():
                m = _mono_mul(m1, m2)
                s = s1 * s2
                cur = t.get(m)
                t[m] = s if cur is None else cur + s
        return Poly(t)

    def scale(self, s: Scalar) -> "Poly":
        if s.is_zero():
            return _P_ZERO
        return Poly({m: c * s for m, c in self._terms.items()})

    def conj(self) -> "Poly":
        """Complex conjugation; parameters are treated as real symbols."""
        return Poly({m: s.conj() for m, s in self._terms.items()})

    def substitute(self, assignments: Mapping[str, Rat]) -> "Poly":
        """Replace parameters by exact rationals (partial substitution ok)."""
        vals = {k: Scalar.of(_frac(v)) for k, v in assignments.items()}
        out: dict = {}
        for m, s in self._terms.items():
            rest = []
            factor = s
            for name, e in m:
                if name in vals:
                    v = vals[name]
                    for _ in range(e):
                        factor = factor * v
                else:
                    rest.append((name, e))
            key = tuple(rest)
            cur = out.get(key)
            out[key] = factor if cur is None else cur + factor
        return Poly(out)

    def scalar_ratio(self, other: "Poly"):
        """Return lam with self == lam * other (lam a Scalar), else None."""
        if other.is_zero():
            return Scalar.zero() if self.is_zero() else None
        if self.is_zero():
            return Scalar.zero()
        m0 = min(other._terms, key=_mono_key)
        mine = self._terms.get(m0)
        if mine is None:
            return None
        lam = mine / other._terms[m0]
        return lam if (self - other.scale(lam)).is_zero() else None

    def divexact(self, other: "Poly") -> "Poly":
        """Exact polynomial division; raises if the division leaves a remainder."""
        if other.is_zero():
            raise ZeroDivisionError("division by zero poly")
        rem = self
        quo: dict = {}
        lead = max(other._terms, key=_mono_key)
        lc = other._terms[lead]
        while not rem.is_zero():
            rlead = max(rem._terms, key=_mono_key)
            # monomial quotient rlead / lead
            d = dict(rlead)
            ok = True
            for name, e in lead:
                if d.get(name, 0) < e:
                    ok = False
                    break
                d[name] -= e
                if d[name] == 0:
                    del d[name]
            if not ok:
                raise ValueError("inexact polynomial division")
            qm = tuple(sorted(d.items()))
            qc = rem._terms[rlead] / lc
            quo[qm] = quo.get(qm, Scalar.zero()) + qc
            rem = rem - Poly({qm: qc}) * other
        return Poly(quo)

    # -- protocol ---------------------------------------------------------
    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            items = tuple(sorted(self._terms.items(), key=lambda kv: _mono_key(kv[0])))
            self._hash = hash(items)
        return self._hash

    def __repr__(self) -> str:
        if not self._terms:
            return "0"
        bits = []
        for m in sorted(self._terms, key=_mono_key):
            s = self._terms[m]
            bits.append(f"{s!r}" if not m else f"{s!r}*{_mono_str(m)}")
        return " + ".join(bits)

    # -- serialization ------------------------------------------------------
    def to_json(self) -> list:
        """List of {re, im, rt2, monomial} term objects in canonical order.

        A mixed scalar (both ring components nonzero) serializes as the two
        pure pieces sharing one monomial; model data never needs that.
        """
        out = []
        for m in sorted(self._terms, key=_mono_key):
            s = self._terms[m]
            mono = {name: e for name, e in m}
            if s.a or s.b:
                out.append({"re": frac_str(s.a), "im": frac_str(s.b),
                            "rt2": 0, "monomial": mono})
            if s.c or s.d:
                out.append({"re": frac_str(s.c), "im": frac_str(s.d),
                            "rt2": 1, "monomial": mono})
        return out

    @staticmethod
    def from_json(data: list) -> "Poly":
        acc = _P_ZERO
        for term in data:
            s = Scalar.of(parse_frac(term["re"]), parse_frac(term["im"]),
                          int(term["rt2"]))
            mono = tuple(sorted((str(k), int(v)) for k, v in term["monomial"].items()))
            acc = acc + Poly({mono: s})
        return acc


_P_ZERO = Poly()
_P_ONE = Poly({_MONO_ONE: Scalar.one()})


def poch_poly(base: Poly, n: int) -> Poly:
    """Rising factorial (base)_n = base (base+1) ... (base+n-1) as a Poly."""
    acc = Poly.one()
    for j in range(n):
        acc = acc * (base + Poly.rational(j))
    return acc
