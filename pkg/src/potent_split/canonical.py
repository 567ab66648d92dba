"""Companion forms and explicit similarity bases.

Every construction returns a SimilarityWitness ``W`` with ``W.P_inv @ A @ W.P``
equal to the advertised representative, so each step can be re-checked.
All bases here start with ``f_1 = e_1`` and are upper triangular, which the
bordering step of the even-size construction depends on.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import NotNonderogatory, PreconditionViolated, SingularMatrix
from .field import FieldElement, FieldSpec
from .matf import Matrix, Polynomial, is_nonderogatory


@dataclass(frozen=True)
class CompanionSpec:
    """Companion matrix of X^n + c_{n-1} X^{n-1} + ... + c_0, by field codes."""

    spec: FieldSpec
    codes: tuple[int, ...]

    @classmethod
    def of(cls, spec: FieldSpec, coeffs: Sequence) -> CompanionSpec:
        return cls(spec, tuple(spec.code(c) for c in coeffs))

    @property
    def n(self) -> int:
        return len(self.codes)

    @property
    def coeffs(self) -> tuple[FieldElement, ...]:
        return tuple(FieldElement(self.spec, c) for c in self.codes)

    def matrix(self) -> Matrix:
        f = self.spec
        n = self.n
        rows = []
        for i in range(n):
            row = [1 if j == i - 1 else 0 for j in range(n)]
            row[n - 1] = f.neg(self.codes[i])
            rows.append(tuple(row))
        return Matrix._raw(f, tuple(rows))

    def trace(self) -> FieldElement:
        return FieldElement(self.spec, self.spec.neg(self.codes[-1]))

    def char_poly(self) -> Polynomial:
        return Polynomial(self.spec, self.codes + (1,))

    def __str__(self) -> str:
        return "coeffs: " + " ".join(self.spec.format(c) for c in self.codes)


@dataclass(frozen=True)
class SimilarityWitness:
    """Invertible P with its exact inverse; the representative is P^-1 A P."""

    P: Matrix
    P_inv: Matrix
    note: str = ""

    def __post_init__(self) -> None:
        if self.P @ self.P_inv != Matrix.identity(self.P.spec, self.P.rows):
            raise SingularMatrix(f"witness {self.note!r}: P @ P_inv != I")

    @classmethod
    def from_P(cls, P: Matrix, note: str = "") -> SimilarityWitness:
        return cls(P, P.inverse(), note)

    @classmethod
    def identity(cls, spec: FieldSpec, n: int, note: str = "identity") -> SimilarityWitness:
        I = Matrix.identity(spec, n)
        return cls(I, I, note)

    def then(self, other: SimilarityWitness) -> SimilarityWitness:
        """Witness for applying self first, then other: P = self.P @ other.P."""
        note = f"{self.note} ; {other.note}" if self.note else other.note
        return SimilarityWitness(self.P @ other.P, other.P_inv @ self.P_inv, note)

    def reduce(self, A: Matrix) -> Matrix:
        """P^-1 A P."""
        return self.P_inv @ A @ self.P

    def lift(self, D: Matrix) -> Matrix:
        """P D P^-1, the inverse of reduce."""
        return self.P @ D @ self.P_inv

    def is_upper_triangular(self) -> bool:
        P = self.P
        return all(P.code(i, j) == 0 for i in range(P.rows) for j in range(i))

    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.P.code(i, i) for i in range(self.P.rows))


# -- companion form --

def _cyclic_candidates(spec: FieldSpec, n: int) -> Iterator[tuple[int, ...]]:
    seen = set()
    for i in range(n):
        v = tuple(1 if j == i else 0 for j in range(n))
        seen.add(v)
        yield v
    for v in itertools.product((0, 1), repeat=n):
        if any(v) and v not in seen:
            seen.add(v)
            yield v
    for v in itertools.product(range(spec.q), repeat=n):
        if any(v) and v not in seen:
            yield v


def krylov_matrix(A: Matrix, v: Sequence[int]) -> Matrix:
    cols = [tuple(v)]
    for _ in range(A.rows - 1):
        cols.append(A.apply(cols[-1]))
    return Matrix.from_columns(A.spec, cols)


def companion_form(A: Matrix) -> tuple[CompanionSpec, SimilarityWitness]:
    """Companion matrix similar to a nonderogatory A, with Krylov witness.

    Cyclic vectors are tried in a fixed order (unit vectors, then 0/1 vectors,
    then everything), so witnesses are reproducible.
    """
    A._need_square()
    if not is_nonderogatory(A):
        raise NotNonderogatory("minimal polynomial has degree below n")
    f = A.spec
    n = A.rows
    for v in _cyclic_candidates(f, n):
        K = krylov_matrix(A, v)
        if not K.is_invertible():
            continue
        K_inv = K.inverse()
        last = A.apply(K.column(n - 1))
        x = K_inv.apply(last)
        comp = CompanionSpec(f, tuple(f.neg(c) for c in x))
        return comp, SimilarityWitness(K, K_inv, f"cyclic vector {list(v)}")
    raise NotNonderogatory("no cyclic vector found")  # unreachable for nonderogatory A


# -- shifted basis --

def shifted_companion(C: CompanionSpec, shifts: Sequence[int]) -> tuple[CompanionSpec, SimilarityWitness]:
    """C is similar to diag(a_1..a_k, 0..0) + C' via a unit upper triangular basis.

    Basis: f_1 = e_1, f_{i+1} = (C - a_i I) f_i for i <= k, f_{i+1} = C f_i beyond.
    """
    f = C.spec
    n = C.n
    k = len(shifts)
    if not 1 <= k <= n:
        raise PreconditionViolated(f"need 1 <= k <= n, got k={k}, n={n}")
    a = [f.code(s) for s in shifts] + [0] * (n - k)
    Cm = C.matrix()
    basis = [tuple(1 if j == 0 else 0 for j in range(n))]
    for i in range(n - 1):
        Cf = Cm.apply(basis[i])
        basis.append(tuple(f.sub(x, f.mul(a[i], y)) for x, y in zip(Cf, basis[i])))
    W = SimilarityWitness.from_P(Matrix.from_columns(f, basis), f"shift {[f.format(x) for x in a[:k]]}")
    D = W.reduce(Cm)
    # last column of D is (-c'_0, ..., -c'_{n-1}) + a_n e_n
    last = list(D.column(n - 1))
    last[n - 1] = f.sub(last[n - 1], a[n - 1])
    return CompanionSpec(f, tuple(f.neg(x) for x in last)), W


def negate_companion(C: CompanionSpec) -> CompanionSpec:
    """Companion of (-1)^n chi(-X), which is similar to -C."""
    f = C.spec
    n = C.n
    return CompanionSpec(f, tuple(c if (n - i) % 2 == 0 else f.neg(c) for i, c in enumerate(C.codes)))


# -- alternating basis --

@dataclass(frozen=True)
class AlternatingBasis:
    D: Matrix
    witness: SimilarityWitness
    d: tuple[int, ...]  # d_1 .. d_n as codes
    k: int
    a: int
    block_scalars: tuple[int, ...]

    def blocks(self) -> tuple[Matrix, Matrix, Matrix, Matrix]:
        """The (M, N, P, Q) partition of D."""
        n, k = self.D.rows, self.k
        s = n - k
        D = self.D
        return D.submatrix(0, s, 0, s), D.submatrix(0, s, s, n), D.submatrix(s, n, 0, s), D.submatrix(s, n, s, n)


def alternating_basis(C: CompanionSpec, k: int, a: int, block_scalars: Sequence[int] | None = None) -> AlternatingBasis:
    """Basis in which C splits into the (M, N, P, Q) block template.

    f_1 = e_1; for i <= n-k+1, f_i = C f_{i-1} - s f_{i-1} at even i (s the
    current block scalar) and f_i = C f_{i-1} at odd i; beyond that
    f_i = a f_{i-1} - C f_{i-1}.  By default every block scalar is ``a``;
    ``block_scalars`` overrides them, one per odd diagonal position of M.
    """
    f = C.spec
    n = C.n
    if n < 3 or not 1 <= k <= n - 1 or (n - k) % 2 == 0:
        raise PreconditionViolated(f"alternating basis needs n>=3, 1<=k<=n-1, n-k odd (n={n}, k={k})")
    a = f.code(a)
    nblocks = (n - k + 1) // 2
    if block_scalars is None:
        scalars = (a,) * nblocks
    else:
        scalars = tuple(f.code(s) for s in block_scalars)
        if len(scalars) != nblocks:
            raise PreconditionViolated(f"need {nblocks} block scalars, got {len(scalars)}")
    Cm = C.matrix()
    basis = [tuple(1 if j == 0 else 0 for j in range(n))]
    for i in range(2, n + 1):  # 1-based index of the new vector
        prev = basis[-1]
        Cp = Cm.apply(prev)
        if i <= n - k + 1:
            if i % 2 == 0:
                s = scalars[i // 2 - 1]
                v = tuple(f.sub(x, f.mul(s, y)) for x, y in zip(Cp, prev))
            else:
                v = Cp
        else:
            v = tuple(f.sub(f.mul(a, y), x) for x, y in zip(Cp, prev))
        basis.append(v)
    W = SimilarityWitness.from_P(Matrix.from_columns(f, basis), f"alternating k={k} a={f.format(a)}")
    D = W.reduce(Cm)
    d = list(D.column(n - 1))
    d[n - 1] = f.sub(d[n - 1], a)
    return AlternatingBasis(D, W, tuple(d), k, a, scalars)


def template_violations(ab: AlternatingBasis) -> list[str]:
    """Differences between D and the expected (M, N, P, Q) template; empty when it matches."""
    f = ab.D.spec
    n, k, a = ab.D.rows, ab.k, ab.a
    s = n - k
    M, N, P, Q = ab.blocks()
    problems = []
    for i in range(s):
        for j in range(s):
            if i == j:
                want = ab.block_scalars[i // 2] if i % 2 == 0 else 0
            elif i == j + 1:
                want = 1
            else:
                want = 0
            if M.code(i, j) != want:
                problems.append(f"M[{i},{j}]")
    for i in range(s):
        for j in range(k - 1):
            if N.code(i, j):
                problems.append(f"N[{i},{j}]")
        if N.code(i, k - 1) != ab.d[i]:
            problems.append(f"N[{i},{k - 1}]")
    for i in range(k):
        for j in range(s):
            want = 1 if (i, j) == (0, s - 1) else 0
            if P.code(i, j) != want:
                problems.append(f"P[{i},{j}]")
    Cd = CompanionSpec(f, ab.d[s:]).matrix()
    expected_Q = Matrix.identity(f, k).scale(a) - Cd
    if Q != expected_Q:
        problems.append("Q")
    return problems


def normalize_last(D: Matrix, witness: SimilarityWitness, sign: int = -1,
                   also_prev: bool = False) -> tuple[Matrix, SimilarityWitness]:
    """Rescale the last basis vector (and optionally the one before) by ``sign``."""
    f = D.spec
    n = D.rows
    diag = [1] * n
    diag[n - 1] = sign
    if also_prev:
        diag[n - 2] = sign
    S = Matrix.diag(f, diag)
    S_inv = S.inverse()
    W = witness.then(SimilarityWitness(S, S_inv, f"normalize_last({sign}, {also_prev})"))
    return S_inv @ D @ S, W
