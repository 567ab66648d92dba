"""Dense exact matrices and polynomials over a FieldSpec.

Matrices are immutable: entries live in a tuple of row tuples of field codes
and every operation returns a fresh value.  Prime fields take a plain-int
fast path; extension fields go through the FieldSpec code arithmetic.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DimensionMismatch, FieldMismatch, SingularMatrix
from .field import FieldElement, FieldSpec


@dataclass(frozen=True)
class Polynomial:
    """Polynomial with coefficients low-to-high; the zero polynomial is ``()``."""

    spec: FieldSpec
    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        c = list(self.coeffs)
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def from_values(cls, spec: FieldSpec, values: Iterable) -> Polynomial:
        return cls(spec, tuple(spec.code(v) for v in values))

    @classmethod
    def monomial(cls, spec: FieldSpec, degree: int) -> Polynomial:
        return cls(spec, (0,) * degree + (1,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def coefficient(self, i: int) -> FieldElement:
        return FieldElement(self.spec, self.coeffs[i] if i < len(self.coeffs) else 0)

    def __add__(self, other: Polynomial) -> Polynomial:
        f = self.spec
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return Polynomial(f, tuple(f.add(x, y) for x, y in zip(a, b)))

    def __neg__(self) -> Polynomial:
        return Polynomial(self.spec, tuple(self.spec.neg(x) for x in self.coeffs))

    def __sub__(self, other: Polynomial) -> Polynomial:
        return self + (-other)

    def __mul__(self, other: Polynomial | int | FieldElement) -> Polynomial:
        f = self.spec
        if not isinstance(other, Polynomial):
            s = f.code(other)
            return Polynomial(f, tuple(f.mul(s, x) for x in self.coeffs))
        if not self.coeffs or not other.coeffs:
            return Polynomial(f, ())
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            if x:
                for j, y in enumerate(other.coeffs):
                    out[i + j] = f.add(out[i + j], f.mul(x, y))
        return Polynomial(f, tuple(out))

    __rmul__ = __mul__

    def divmod(self, other: Polynomial) -> tuple[Polynomial, Polynomial]:
        f = self.spec
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        d = other.degree
        inv_lead = f.inv(other.coeffs[-1])
        quot = [0] * max(len(rem) - d, 0)
        while len(rem) - 1 >= d and rem:
            c = f.mul(rem[-1], inv_lead)
            shift = len(rem) - 1 - d
            quot[shift] = c
            for i, y in enumerate(other.coeffs):
                rem[shift + i] = f.sub(rem[shift + i], f.mul(c, y))
            while rem and rem[-1] == 0:
                rem.pop()
        return Polynomial(f, tuple(quot)), Polynomial(f, tuple(rem))

    def __call__(self, x: int | FieldElement) -> FieldElement:
        """Horner evaluation at a field element."""
        f = self.spec
        xc = f.code(x)
        acc = 0
        for c in reversed(self.coeffs):
            acc = f.add(f.mul(acc, xc), c)
        return FieldElement(f, acc)

    def eval_matrix(self, A: Matrix) -> Matrix:
        n = A.rows
        acc = Matrix.zeros(self.spec, n, n)
        I = Matrix.identity(self.spec, n)
        for c in reversed(self.coeffs):
            acc = acc @ A + I.scale(FieldElement(self.spec, c))
        return acc

    def compose_neg(self) -> Polynomial:
        """f(-X)."""
        f = self.spec
        return Polynomial(f, tuple(c if i % 2 == 0 else f.neg(c) for i, c in enumerate(self.coeffs)))

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if not c:
                continue
            cs = self.spec.format(c)
            if i == 0:
                terms.append(cs)
            else:
                mono = "X" if i == 1 else f"X^{i}"
                terms.append(mono if c == 1 else f"{cs}*{mono}")
        return " + ".join(terms)


class Matrix:
    """Immutable dense matrix over a FieldSpec, entries held as field codes."""

    __slots__ = ("spec", "rows", "cols", "_d")

    def __init__(self, spec: FieldSpec, data: Sequence[Sequence]):
        rows = tuple(tuple(spec.code(x) for x in row) for row in data)
        if not rows or not rows[0]:
            raise DimensionMismatch("matrix must have positive dimensions")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise DimensionMismatch("ragged rows")
        self._set(spec, rows)

    def _set(self, spec: FieldSpec, rows: tuple[tuple[int, ...], ...]) -> None:
        object.__setattr__(self, "spec", spec)
        object.__setattr__(self, "rows", len(rows))
        object.__setattr__(self, "cols", len(rows[0]))
        object.__setattr__(self, "_d", rows)

    def __setattr__(self, name, value) -> None:
        raise AttributeError("Matrix is immutable")

    @classmethod
    def _raw(cls, spec: FieldSpec, rows) -> Matrix:
        # rows: tuple of tuples of already-canonical codes
        m = cls.__new__(cls)
        m._set(spec, rows)
        return m

    # -- constructors --

    @classmethod
    def zeros(cls, spec: FieldSpec, rows: int, cols: int | None = None) -> Matrix:
        cols = rows if cols is None else cols
        return cls._raw(spec, tuple((0,) * cols for _ in range(rows)))

    @classmethod
    def identity(cls, spec: FieldSpec, n: int) -> Matrix:
        return cls._raw(spec, tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    @classmethod
    def diag(cls, spec: FieldSpec, values: Sequence) -> Matrix:
        codes = [spec.code(v) for v in values]
        n = len(codes)
        return cls._raw(spec, tuple(tuple(codes[i] if i == j else 0 for j in range(n)) for i in range(n)))

    @classmethod
    def from_columns(cls, spec: FieldSpec, columns: Sequence[Sequence[int]]) -> Matrix:
        return cls._raw(spec, tuple(zip(*[tuple(c) for c in columns])))

    @classmethod
    def block(cls, blocks: Sequence[Sequence[Matrix]]) -> Matrix:
        spec = blocks[0][0].spec
        out = []
        for brow in blocks:
            h = brow[0].rows
            if any(b.rows != h for b in brow):
                raise DimensionMismatch("block row heights differ")
            for i in range(h):
                out.append(sum((b._d[i] for b in brow), ()))
        if any(len(r) != len(out[0]) for r in out):
            raise DimensionMismatch("block column widths differ")
        return cls._raw(spec, tuple(out))

    # -- access --

    def __getitem__(self, ij: tuple[int, int]) -> FieldElement:
        i, j = ij
        return FieldElement(self.spec, self._d[i][j])

    def code(self, i: int, j: int) -> int:
        return self._d[i][j]

    @property
    def codes(self) -> tuple[tuple[int, ...], ...]:
        return self._d

    def row(self, i: int) -> tuple[int, ...]:
        return self._d[i]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self._d)

    def submatrix(self, r0: int, r1: int, c0: int, c1: int) -> Matrix:
        return Matrix._raw(self.spec, tuple(r[c0:c1] for r in self._d[r0:r1]))

    def with_entry(self, i: int, j: int, value) -> Matrix:
        rows = [list(r) for r in self._d]
        rows[i][j] = self.spec.code(value)
        return Matrix._raw(self.spec, tuple(tuple(r) for r in rows))

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def transpose(self) -> Matrix:
        return Matrix._raw(self.spec, tuple(zip(*self._d)))

    def trace(self) -> FieldElement:
        self._need_square()
        acc = 0
        for i in range(self.rows):
            acc = self.spec.add(acc, self._d[i][i])
        return FieldElement(self.spec, acc)

    def is_zero(self) -> bool:
        return not any(any(r) for r in self._d)

    # -- arithmetic --

    def _check(self, other: Matrix) -> None:
        if other.spec != self.spec:
            raise FieldMismatch(f"cannot combine matrices over {self.spec} and {other.spec}")

    def _need_square(self) -> None:
        if self.rows != self.cols:
            raise DimensionMismatch(f"{self.rows}x{self.cols} matrix is not square")

    def __add__(self, other: Matrix) -> Matrix:
        self._check(other)
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatch("shapes differ")
        f = self.spec
        if f.m == 1:
            p = f.p
            d = tuple(tuple((a + b) % p for a, b in zip(r, s)) for r, s in zip(self._d, other._d))
        else:
            d = tuple(tuple(f.add(a, b) for a, b in zip(r, s)) for r, s in zip(self._d, other._d))
        return Matrix._raw(f, d)

    def __sub__(self, other: Matrix) -> Matrix:
        self._check(other)
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatch("shapes differ")
        f = self.spec
        if f.m == 1:
            p = f.p
            d = tuple(tuple((a - b) % p for a, b in zip(r, s)) for r, s in zip(self._d, other._d))
        else:
            d = tuple(tuple(f.sub(a, b) for a, b in zip(r, s)) for r, s in zip(self._d, other._d))
        return Matrix._raw(f, d)

    def __neg__(self) -> Matrix:
        f = self.spec
        return Matrix._raw(f, tuple(tuple(f.neg(a) for a in r) for r in self._d))

    def scale(self, s: int | FieldElement) -> Matrix:
        f = self.spec
        c = f.code(s)
        return Matrix._raw(f, tuple(tuple(f.mul(c, a) for a in r) for r in self._d))

    def __matmul__(self, other: Matrix) -> Matrix:
        self._check(other)
        if self.cols != other.rows:
            raise DimensionMismatch(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        f = self.spec
        cols = tuple(zip(*other._d))
        if f.m == 1:
            p = f.p
            mul = operator.mul
            d = tuple(tuple(sum(map(mul, r, c)) % p for c in cols) for r in self._d)
        else:
            d = tuple(tuple(f.dot(r, c) for c in cols) for r in self._d)
        return Matrix._raw(f, d)

    def __mul__(self, other):
        if isinstance(other, Matrix):
            return self @ other
        if isinstance(other, (int, FieldElement)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, FieldElement)):
            return self.scale(other)
        return NotImplemented

    def apply(self, v: Sequence[int]) -> tuple[int, ...]:
        """Matrix times a column vector of codes."""
        f = self.spec
        return tuple(f.dot(r, v) for r in self._d)

    def __pow__(self, k: int) -> Matrix:
        self._need_square()
        if k < 0:
            return self.inverse() ** (-k)
        result = None
        base = self
        while k:
            if k & 1:
                result = base if result is None else result @ base
            k >>= 1
            if k:
                base = base @ base
        return Matrix.identity(self.spec, self.rows) if result is None else result

    # -- elimination --

    def _echelon(self, augment: Matrix | None = None):
        """Gauss-Jordan elimination; returns (rows, pivot columns)."""
        f = self.spec
        rows = [list(r) for r in self._d]
        if augment is not None:
            rows = [r + list(a) for r, a in zip(rows, augment._d)]
        pivots = []
        r = 0
        for c in range(self.cols):
            piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
            if piv is None:
                continue
            rows[r], rows[piv] = rows[piv], rows[r]
            inv = f.inv(rows[r][c])
            rows[r] = [f.mul(inv, x) for x in rows[r]]
            for i in range(len(rows)):
                if i != r and rows[i][c]:
                    factor = rows[i][c]
                    rows[i] = [f.sub(x, f.mul(factor, y)) for x, y in zip(rows[i], rows[r])]
            pivots.append(c)
            r += 1
            if r == len(rows):
                break
        return rows, pivots

    def rank(self) -> int:
        return len(self._echelon()[1])

    def inverse(self) -> Matrix:
        self._need_square()
        n = self.rows
        rows, pivots = self._echelon(Matrix.identity(self.spec, n))
        if len(pivots) < n:
            raise SingularMatrix("matrix is singular")
        return Matrix._raw(self.spec, tuple(tuple(r[n:]) for r in rows))

    def is_invertible(self) -> bool:
        return self.is_square and self.rank() == self.rows

    def solve(self, b: Sequence[int]) -> tuple[int, ...] | None:
        """One solution x of self @ x = b (free variables zero), or None."""
        f = self.spec
        aug = Matrix._raw(f, tuple((x,) for x in b))
        rows, pivots = self._echelon(aug)
        n = self.cols
        for r in rows[len(pivots):]:
            if r[n]:
                return None
        x = [0] * n
        for r, c in zip(rows, pivots):
            x[c] = r[n]
        return tuple(x)

    def conjugate_by(self, P: Matrix, P_inv: Matrix | None = None) -> Matrix:
        """P @ self @ P^-1."""
        if P_inv is None:
            P_inv = P.inverse()
        return P @ self @ P_inv

    # -- comparison / display --

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.spec == other.spec and self._d == other._d

    def __hash__(self) -> int:
        return hash((self.spec, self._d))

    def tolist(self) -> list[list[str]]:
        return [[self.spec.format(x) for x in r] for r in self._d]

    def __str__(self) -> str:
        cells = self.tolist()
        w = max(len(x) for r in cells for x in r)
        return "\n".join(" ".join(x.rjust(w) for x in r) for r in cells)

    def __repr__(self) -> str:
        return f"Matrix({self.spec}, {self.tolist()})"


def mat_ops(A: Matrix, B: Matrix | None, op: str, k: int | None = None,
            scalar=None, P: Matrix | None = None) -> Matrix:
    """Name-dispatched matrix operation (add, sub, mul, pow, scalar_mul, conjugate_by)."""
    if op == "add":
        return A + B
    if op == "sub":
        return A - B
    if op == "mul":
        return A @ B
    if op == "pow":
        return A ** k
    if op == "scalar_mul":
        return A.scale(scalar)
    if op == "conjugate_by":
        return A.conjugate_by(P)
    raise ValueError(f"unknown op {op!r}")


# -- polynomials attached to a matrix --

def _hessenberg(A: Matrix) -> list[list[int]]:
    f = A.spec
    n = A.rows
    H = [list(r) for r in A.codes]
    for j in range(n - 2):
        piv = next((i for i in range(j + 1, n) if H[i][j]), None)
        if piv is None:
            continue
        if piv != j + 1:
            H[piv], H[j + 1] = H[j + 1], H[piv]
            for r in H:
                r[piv], r[j + 1] = r[j + 1], r[piv]
        inv = f.inv(H[j + 1][j])
        for r in range(j + 2, n):
            if not H[r][j]:
                continue
            factor = f.mul(H[r][j], inv)
            H[r] = [f.sub(x, f.mul(factor, y)) for x, y in zip(H[r], H[j + 1])]
            for row in H:
                row[j + 1] = f.add(row[j + 1], f.mul(factor, row[r]))
    return H


def char_poly(A: Matrix) -> Polynomial:
    """det(X*I - A) via Hessenberg reduction and the determinant recurrence."""
    A._need_square()
    f = A.spec
    n = A.rows
    H = _hessenberg(A)
    X = Polynomial(f, (0, 1))
    polys = [Polynomial(f, (1,))]
    for m in range(n):
        nxt = (X - Polynomial(f, (H[m][m],))) * polys[m]
        prod = 1
        for i in range(m - 1, -1, -1):
            prod = f.mul(prod, H[i + 1][i])
            coeff = f.mul(H[i][m], prod)
            if coeff:
                nxt = nxt - polys[i] * FieldElement(f, coeff)
        polys.append(nxt)
    return polys[n]


def char_poly_cofactor(A: Matrix) -> Polynomial:
    """Laplace expansion of det(X*I - A); only sensible for n <= 4."""
    A._need_square()
    f = A.spec
    n = A.rows
    entries = [
        [Polynomial(f, (f.neg(A.code(i, j)), 1) if i == j else (f.neg(A.code(i, j)),))
         for j in range(n)]
        for i in range(n)
    ]

    def det(mat: list[list[Polynomial]]) -> Polynomial:
        if len(mat) == 1:
            return mat[0][0]
        total = Polynomial(f, ())
        for j, top in enumerate(mat[0]):
            if top.is_zero():
                continue
            minor = [row[:j] + row[j + 1:] for row in mat[1:]]
            term = top * det(minor)
            total = total - term if j % 2 else total + term
        return total

    return det(entries)


def min_poly(A: Matrix) -> Polynomial:
    """Least-degree monic annihilator, from the first linear dependence among I, A, A^2, ..."""
    A._need_square()
    f = A.spec
    n = A.rows
    powers = [Matrix.identity(f, n)]
    for d in range(1, n + 1):
        powers.append(powers[-1] @ A)
        # columns vec(A^0) .. vec(A^{d-1}); solve for vec(A^d)
        cols = [sum(P.codes, ()) for P in powers[:d]]
        system = Matrix.from_columns(f, cols)
        target = sum(powers[d].codes, ())
        sol = system.solve(target)
        if sol is not None:
            return Polynomial(f, tuple(f.neg(x) for x in sol) + (1,))
    raise AssertionError("Cayley-Hamilton violated")  # unreachable


def is_nilpotent(A: Matrix) -> bool:
    return (A ** A.rows).is_zero()


def nilpotency_index(A: Matrix) -> int | None:
    A._need_square()
    P = A
    for k in range(1, A.rows + 1):
        if P.is_zero():
            return k
        P = P @ A
    return None


def is_p_potent(A: Matrix) -> bool:
    return A ** A.spec.p == A


def is_nonderogatory(A: Matrix) -> bool:
    return min_poly(A).degree == A.rows


@dataclass(frozen=True)
class Predicates:
    is_nilpotent: bool
    is_p_potent: bool
    is_nonderogatory: bool
    nilpotency_index: int | None


def predicates(A: Matrix) -> Predicates:
    idx = nilpotency_index(A)
    return Predicates(idx is not None, is_p_potent(A), is_nonderogatory(A), idx)


def rank(A: Matrix) -> int:
    return A.rank()


def eigenvalue_member(A: Matrix, lam: int | FieldElement) -> bool:
    return not char_poly(A)(lam)
