"""Matrix-valued one-dimensional differential operators with exact arithmetic.

An Operator is a finite sum  sum_t  M_t * x^k_t * d^m_t  in normal order
(all x powers to the left of all derivatives), where each M_t is a constant
matrix of parameter polynomials.  Negative x powers are allowed; the algebra
is formal and no distributional terms at x = 0 are modelled.  Composition
uses the reordering rule  d^m x^k = sum_j C(m,j) k(k-1)...(k-j+1) x^(k-j) d^(m-j),
valid for any integer k.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb
from typing import Iterable, Mapping, Sequence, Union

from .coefficients import Poly, Rat, Scalar

PolyLike = Union[Poly, Scalar, int, Fraction]


def _as_poly(v: PolyLike) -> Poly:
    if isinstance(v, Poly):
        return v
    if isinstance(v, Scalar):
        return Poly.scalar(v)
    return Poly.rational(v)


class Matrix:
    """Dense square matrix of Poly entries; immutable by convention."""

    __slots__ = ("dim", "rows")

    def __init__(self, rows: Sequence[Sequence[PolyLike]]):
        self.dim = len(rows)
        self.rows = tuple(tuple(_as_poly(v) for v in row) for row in rows)
        for row in self.rows:
            if len(row) != self.dim:
                raise ValueError("matrix must be square")

    # -- constructors ----------------------------------------------------
    @staticmethod
    def zeros(dim: int) -> "Matrix":
        z = Poly.zero()
        return Matrix([[z] * dim for _ in range(dim)])

    @staticmethod
    def identity(dim: int) -> "Matrix":
        return Matrix([[Poly.one() if i == j else Poly.zero()
                        for j in range(dim)] for i in range(dim)])

    @staticmethod
    def diagonal(entries: Sequence[PolyLike]) -> "Matrix":
        n = len(entries)
        return Matrix([[_as_poly(entries[i]) if i == j else Poly.zero()
                        for j in range(n)] for i in range(n)])

    @staticmethod
    def unit(dim: int, i: int, j: int, value: PolyLike = 1) -> "Matrix":
        """Matrix with a single entry at (i, j), zero elsewhere (0-indexed)."""
        rows = [[Poly.zero()] * dim for _ in range(dim)]
        rows[i][j] = _as_poly(value)
        return Matrix(rows)

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        return Matrix([[a + b for a, b in zip(r1, r2)]
                       for r1, r2 in zip(self.rows, other.rows)])

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        return Matrix([[a - b for a, b in zip(r1, r2)]
                       for r1, r2 in zip(self.rows, other.rows)])

    def __neg__(self) -> "Matrix":
        return Matrix([[-a for a in row] for row in self.rows])

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        n = self.dim
        cols = list(zip(*other.rows))
        out = []
        for i in range(n):
            row = self.rows[i]
            out_row = []
            for j in range(n):
                acc = Poly.zero()
                col = cols[j]
                for k in range(n):
                    a = row[k]
                    if a.is_zero():
                        continue
                    b = col[k]
                    if b.is_zero():
                        continue
                    acc = acc + a * b
                out_row.append(acc)
            out.append(out_row)
        return Matrix(out)

    def __mul__(self, v: PolyLike) -> "Matrix":
        p = _as_poly(v)
        return Matrix([[a * p for a in row] for row in self.rows])

    def kron(self, other: "Matrix") -> "Matrix":
        """Kronecker product self (x) other."""
        n, m = self.dim, other.dim
        out = [[Poly.zero()] * (n * m) for _ in range(n * m)]
        for i in range(n):
            for j in range(n):
                a = self.rows[i][j]
                if a.is_zero():
                    continue
                for k in range(m):
                    for l in range(m):
                        b = other.rows[k][l]
                        if not b.is_zero():
                            out[i * m + k][j * m + l] = a * b
        return Matrix(out)

    def conj_t(self) -> "Matrix":
        return Matrix([[self.rows[j][i].conj() for j in range(self.dim)]
                       for i in range(self.dim)])

    def substitute(self, assignments: Mapping[str, Rat]) -> "Matrix":
        return Matrix([[a.substitute(assignments) for a in row]
                       for row in self.rows])

    def inverse(self) -> "Matrix":
        """Exact inverse by Gauss-Jordan; entries must be scalar polys."""
        n = self.dim
        aug = [[self.rows[i][j].scalar_value() for j in range(n)]
               + [Scalar.one() if i == j else Scalar.zero() for j in range(n)]
               for i in range(n)]
        for col in range(n):
            piv = next((r for r in range(col, n) if not aug[r][col].is_zero()), None)
            if piv is None:
                raise ValueError("matrix is singular")
            aug[col], aug[piv] = aug[piv], aug[col]
            inv = aug[col][col].inverse()
            aug[col] = [v * inv for v in aug[col]]
            for r in range(n):
                if r != col and not aug[r][col].is_zero():
                    f = aug[r][col]
                    aug[r] = [v - f * w for v, w in zip(aug[r], aug[col])]
        return Matrix([[Poly.scalar(aug[i][n + j]) for j in range(n)]
                       for i in range(n)])

    # -- queries -----------------------------------------------------------
    def is_zero(self) -> bool:
        return all(a.is_zero() for row in self.rows for a in row)

    def is_diagonal(self) -> bool:
        return all(self.rows[i][j].is_zero()
                   for i in range(self.dim) for j in range(self.dim) if i != j)

    def is_hermitian(self) -> bool:
        return self == self.conj_t()

    def diagonal(self) -> list:
        return [self.rows[i][i] for i in range(self.dim)]

    def trace(self) -> Poly:
        acc = Poly.zero()
        for i in range(self.dim):
            acc = acc + self.rows[i][i]
        return acc

    def entry(self, i: int, j: int) -> Poly:
        return self.rows[i][j]

    def _check(self, other: "Matrix"):
        if self.dim != other.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __eq__(self, other) -> bool:
        return isinstance(other, Matrix) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self) -> str:
        body = ",\n ".join("[" + ", ".join(repr(a) for a in row) + "]"
                           for row in self.rows)
        return f"Matrix(\n {body})"

    def to_json(self) -> list:
        return [[e.to_json() for e in row] for row in self.rows]

    @staticmethod
    def from_json(data: list) -> "Matrix":
        return Matrix([[Poly.from_json(cell) for cell in row] for row in data])


def anticommute_m(a: Matrix, b: Matrix) -> Matrix:
    return a @ b + b @ a


def commute_m(a: Matrix, b: Matrix) -> Matrix:
    return a @ b - b @ a


def _falling(k: int, j: int) -> int:
    """k (k-1) ... (k-j+1); exact for any integer k."""
    acc = 1
    for t in range(j):
        acc *= (k - t)
    return acc


class Operator:
    """Normal-ordered matrix differential operator: {(k, m): Matrix}."""

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms: Mapping[tuple, Matrix] | None = None):
        self.dim = dim
        t = {}
        if terms:
            for (k, m), mat in terms.items():
                if m < 0:
                    raise ValueError("derivative power must be non-negative")
                if mat.dim != dim:
                    raise ValueError("matrix dim mismatch")
                if not mat.is_zero():
                    t[(int(k), int(m))] = mat
        self.terms = t

    # -- constructors ------------------------------------------------------
    @staticmethod
    def zero(dim: int) -> "Operator":
        return Operator(dim)

    @staticmethod
    def identity(dim: int) -> "Operator":
        return Operator(dim, {(0, 0): Matrix.identity(dim)})

    @staticmethod
    def from_matrix(mat: Matrix, k: int = 0, m: int = 0) -> "Operator":
        return Operator(mat.dim, {(k, m): mat})

    @staticmethod
    def x_power(dim: int, k: int, coeff: PolyLike = 1) -> "Operator":
        return Operator(dim, {(k, 0): Matrix.identity(dim) * coeff})

    @staticmethod
    def derivative(dim: int, m: int = 1, coeff: PolyLike = 1) -> "Operator":
        return Operator(dim, {(0, m): Matrix.identity(dim) * coeff})

    # -- linear structure -------------------------------------------------
    def __add__(self, other: "Operator") -> "Operator":
        self._check(other)
        t = dict(self.terms)
        for km, mat in other.terms.items():
            cur = t.get(km)
            t[km] = mat if cur is None else cur + mat
        return Operator(self.dim, t)

    def __sub__(self, other: "Operator") -> "Operator":
        return self + (-other)

    def __neg__(self) -> "Operator":
        return Operator(self.dim, {km: -mat for km, mat in self.terms.items()})

    def __mul__(self, v: PolyLike) -> "Operator":
        p = _as_poly(v)
        return Operator(self.dim, {km: mat * p for km, mat in self.terms.items()})

    # -- products and brackets ---------------------------------------------
    def compose(self, other: "Operator") -> "Operator":
        """Operator product self . other, normal-ordered, exact, bilinear."""
        self._check(other)
        out: dict = {}
        for (k1, m1), mat1 in self.terms.items():
            for (k2, m2), mat2 in other.terms.items():
                prod = mat1 @ mat2
                if prod.is_zero():
                    continue
                for j in range(m1 + 1):
                    c = comb(m1, j) * _falling(k2, j)
                    if c == 0:
                        continue
                    km = (k1 + k2 - j, m1 + m2 - j)
                    mat = prod * Fraction(c)
                    cur = out.get(km)
                    out[km] = mat if cur is None else cur + mat
        return Operator(self.dim, out)

    def __matmul__(self, other: "Operator") -> "Operator":
        return self.compose(other)

    def commutator(self, other: "Operator") -> "Operator":
        return self.compose(other) - other.compose(self)

    def anticommutator(self, other: "Operator") -> "Operator":
        return self.compose(other) + other.compose(self)

    def adjoint(self) -> "Operator":
        """Formal adjoint wrt integration over x, boundary terms ignored:
        x -> x, d -> -d, constant matrices -> conjugate transpose."""
        out = Operator.zero(self.dim)
        for (k, m), mat in self.terms.items():
            # (M x^k d^m)+ = (-1)^m d^m x^k M+ ; reorder d^m x^k.
            sign = -1 if m % 2 else 1
            madj = mat.conj_t() * Fraction(sign)
            for j in range(m + 1):
                c = comb(m, j) * _falling(k, j)
                if c == 0:
                    continue
                out = out + Operator(self.dim, {(k - j, m - j): madj * Fraction(c)})
        return out

    # -- queries -------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_hermitian(self) -> bool:
        return (self - self.adjoint()).is_zero()

    def substitute(self, assignments: Mapping[str, Rat]) -> "Operator":
        return Operator(self.dim, {km: mat.substitute(assignments)
                                   for km, mat in self.terms.items()})

    def params(self) -> set:
        out = set()
        for mat in self.terms.values():
            for row in mat.rows:
                for p in row:
                    out |= p.params()
        return out

    def grade(self, dilat: "Operator"):
        """Return lam (Fraction) when [D, self] = i*lam*self identically,
        None when self is zero or not an eigenoperator."""
        if self.is_zero():
            return None
        bracket = dilat.commutator(self)
        scaled = bracket * (-Scalar.i())  # -i [D, A] = lam A
        lam = None
        for km in sorted(self.terms):
            mat = self.terms[km]
            other = scaled.terms.get(km, Matrix.zeros(self.dim))
            for i in range(self.dim):
                for j in range(self.dim):
                    p = mat.rows[i][j]
                    if p.is_zero():
                        continue
                    r = other.rows[i][j].scalar_ratio(p)
                    if r is None:
                        return None
                    if lam is None:
                        lam = r
                    elif lam != r:
                        return None
        if lam is None:
            return None
        if not lam.is_rational():
            return None
        lam_q = lam.as_fraction()
        return lam_q if (scaled - self * lam_q).is_zero() else None

    def coefficient(self, k: int, m: int) -> Matrix:
        return self.terms.get((k, m), Matrix.zeros(self.dim))

    def _check(self, other: "Operator"):
        if self.dim != other.dim:
            raise ValueError(f"operator dimension mismatch: {self.dim} vs {other.dim}")

    def __eq__(self, other) -> bool:
        return (isinstance(other, Operator) and self.dim == other.dim
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.dim, tuple(sorted(self.terms.items(),
                                            key=lambda kv: kv[0]))))

    def __repr__(self) -> str:
        if not self.terms:
            return f"Operator(dim={self.dim}, 0)"
        bits = []
        for (k, m) in sorted(self.terms):
            tag = []
            if k:
                tag.append(f"x^{k}")
            if m:
                tag.append(f"d^{m}")
            bits.append(("*".join(tag) or "1") + f": {self.terms[(k, m)]!r}")
        return f"Operator(dim={self.dim},\n " + ",\n ".join(bits) + ")"

    # -- serialization --------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "terms": [{"k": k, "m": m, "matrix": self.terms[(k, m)].to_json()}
                      for (k, m) in sorted(self.terms)],
        }

    @staticmethod
    def from_json(data: dict) -> "Operator":
        dim = int(data["dim"])
        terms = {}
        for t in data["terms"]:
            terms[(int(t["k"]), int(t["m"]))] = Matrix.from_json(t["matrix"])
        return Operator(dim, terms)


def commutator(a: Operator, b: Operator) -> Operator:
    return a.commutator(b)


def anticommutator(a: Operator, b: Operator) -> Operator:
    return a.anticommutator(b)


def span_membership(target: Operator, basis: Mapping[str, Operator],
                    param_names: Iterable[str] = (), max_degree: int = 3):
    """Decide target = sum_L c_L * basis[L] with polynomial coefficients c_L
    of bounded degree in the given parameters.

    Returns (True, {name: Poly}) on success, (False, None) otherwise.
    The solve is exact: coefficient-matching produces a linear system over
    the scalar field which is solved by Gaussian elimination.
    """
    from .linsolve import solve_linear_poly_system  # local import, no cycle

    names = sorted(set(param_names))
    monos = [()]
    frontier = [()]
    for _ in range(max_degree):
        nxt = []
        for m in frontier:
            for n in names:
                d = dict(m)
                d[n] = d.get(n, 0) + 1
                key = tuple(sorted(d.items()))
                if key not in monos:
                    monos.append(key)
                    nxt.append(key)
        frontier = nxt

    unknowns = [(L, mono) for L in basis for mono in monos]
    # coordinates: (km, i, j, param monomial) -> scalar equation
    rows: dict = {}

    def add_coord(op: Operator, fn):
        for km, mat in op.terms.items():
            for i in range(op.dim):
                for j in range(op.dim):
                    p = mat.rows[i][j]
                    for mono, s in p.terms():
                        fn(km, i, j, mono, s)

    # Build rows lazily: each coordinate key gets a vector over unknowns + rhs.
    ncols = len(unknowns)
    uidx = {u: t for t, u in enumerate(unknowns)}

    def row_for(key):
        if key not in rows:
            rows[key] = [Scalar.zero()] * ncols + [Scalar.zero()]
        return rows[key]

    for t, (L, mono) in enumerate(unknowns):
        op = basis[L]
        for km, mat in op.terms.items():
            for i in range(op.dim):
                for j in range(op.dim):
                    p = mat.rows[i][j]
                    for m2, s in p.terms():
                        from .coefficients import _mono_mul
                        key = (km, i, j, _mono_mul(mono, m2))
                        row_for(key)[t] = row_for(key)[t] + s

    def rhs_fn(km, i, j, mono, s):
        r = row_for((km, i, j, mono))
        r[-1] = r[-1] + s

    add_coord(target, rhs_fn)

    sol = solve_linear_poly_system(list(rows.values()))
    if sol is None:
        return False, None
    coeffs = {}
    for L in basis:
        acc = Poly.zero()
        for mono in monos:
            s = sol[uidx[(L, mono)]]
            if not s.is_zero():
                acc = acc + Poly({mono: s})
        coeffs[L] = acc
    # exact verification
    resid = target
    for L, c in coeffs.items():
        resid = resid - basis[L] * c
    if not resid.is_zero():
        return False, None
    return True, coeffs
