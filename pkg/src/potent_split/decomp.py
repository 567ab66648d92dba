"""Constructive E + V decompositions with E^p = E and V^3 = 0.

The engine works on companion matrices.  Odd sizes are handled by the
alternating-basis construction (``main_lemma``) either directly or after an
affine change C ~ b*I +/- C'; even sizes border an odd-size special
decomposition.  Every certificate is re-verified before it is returned, and a
certificate that fails is dropped in favour of the next construction in a
fixed order, ending with exhaustive search where that is affordable.
"""

from __future__ import annotations

import enum
import itertools
import logging
from dataclasses import dataclass, field, replace
from typing import Callable, Iterator, Sequence

from .canonical import (
    CompanionSpec,
    SimilarityWitness,
    alternating_basis,
    companion_form,
    krylov_matrix,
    negate_companion,
    normalize_last,
    shifted_companion,
    template_violations,
)
from .errors import (
    CompletionFailed,
    DimensionMismatch,
    NoViableA,
    PreconditionViolated,
    SearchSpaceTooLarge,
    TraceNotPrimeSubfield,
    TripotencyFailed,
    Unverifiable,
)
from .field import FieldSpec
from .matf import Matrix, char_poly, nilpotency_index

log = logging.getLogger(__name__)

# exhaustive trailing-block search is skipped beyond this many candidates
COMPLETION_SEARCH_CAP = 10**5


class Route(str, enum.Enum):
    N1 = "N1"
    N2 = "N2"
    MAINCOR = "MAINCOR"
    MINUS3_SHIFT = "MINUS3_SHIFT"
    P3_T1 = "P3_T1"
    P3_T2 = "P3_T2"
    P3_T0_TRIP = "P3_T0_TRIP"
    EVEN_BORDER = "EVEN_BORDER"
    ORACLE_FALLBACK = "ORACLE_FALLBACK"


@dataclass(frozen=True)
class SpecialShape:
    """E's last row is (0, ..., 0, a) and V's first column is zero."""

    e_last_row_scalar: int
    v_first_col_zero: bool = True


@dataclass(frozen=True)
class Checks:
    sum_ok: bool
    p_potent_ok: bool
    nil_index: int | None

    def ok(self, max_index: int = 3) -> bool:
        return self.sum_ok and self.p_potent_ok and self.nil_index is not None and self.nil_index <= max_index


def certify(A: Matrix, E: Matrix, V: Matrix) -> Checks:
    return Checks(E + V == A, E ** A.spec.p == E, nilpotency_index(V))


@dataclass(frozen=True)
class Decomposition:
    """A = E + V, possibly at a conjugated representative of the input.

    When ``witness`` is set and the certificate came from a construction,
    ``A == witness.reduce(original)``; top-level results are transported back
    so that ``A`` is the caller's matrix.
    """

    A: Matrix
    E: Matrix
    V: Matrix
    route: Route
    checks: Checks
    params: dict = field(default_factory=dict)
    witness: SimilarityWitness | None = None
    shape: SpecialShape | None = None
    detail: str = ""
    fallback: bool = False

    @property
    def n(self) -> int:
        return self.A.rows

    def is_valid(self, max_index: int = 3) -> bool:
        return self.checks.ok(max_index)

    def to_json(self) -> dict:
        f = self.A.spec
        params = {key: self.params.get(key) for key in ("k", "a", "l", "t")}
        return {
            "field": f.to_json(),
            "n": self.n,
            "A": self.A.tolist(),
            "E": self.E.tolist(),
            "V": self.V.tolist(),
            "route": self.route.value,
            "params": params,
            "checks": {
                "sum_ok": self.checks.sum_ok,
                "p_potent_ok": self.checks.p_potent_ok,
                "nil_index": self.checks.nil_index,
            },
            "detail": self.detail,
            "fallback": self.fallback,
        }


def shape_ok(dec: Decomposition) -> bool:
    """E's last row is (0, ..., 0, x) for some x and V's first column vanishes."""
    n = dec.n
    last = dec.E.row(n - 1)
    return not any(last[: n - 1]) and not any(dec.V.column(0))


def _special_shape(E: Matrix, V: Matrix) -> SpecialShape | None:
    n = E.rows
    last = E.row(n - 1)
    if any(last[: n - 1]) or any(V.column(0)):
        return None
    return SpecialShape(last[n - 1], True)


# -- trace gate --

def check_trace_condition(A: Matrix) -> int | None:
    """t in [0, p) with trace(A) = t*1, or None when the trace leaves the prime subfield."""
    return A.spec.prime_subfield_index(A.trace())


# -- trailing block --

def _is_nil(T: Matrix) -> bool:
    return (T ** T.rows).is_zero()


def _completion_closed_form(f: FieldSpec, Cd: Matrix, a: int, l: int) -> Matrix:
    # K = [[0, x], [0, a]]: nilpotent remainder forces trace a + d_n = 0, i.e. a = l
    if (a - l) % f.p:
        raise CompletionFailed(f"k=2 needs a = l (got a={a}, l={l})")
    # T = [[a, d_{n-1} - x], [-1, d_n]] with det 0
    d_prev, d_last = f.neg(Cd.code(0, 1)), f.neg(Cd.code(1, 1))
    x = f.add(d_prev, f.mul(a, d_last))
    return Matrix._raw(f, ((0, x), (0, a % f.p)))


def _completion_affine(f: FieldSpec, Cd: Matrix, a: int, lam: Sequence[int]) -> Matrix | None:
    """K = [[0, X], [0, diag(lam)]] with nonzero prime-field lam ending in a.

    Any such K is p-potent, and T = (a I - Cd) - K has a char poly affine in X
    (the lower-left block of a I - Cd is a single subdiagonal 1), so a linear
    solve decides whether T can be nilpotent.
    """
    k = Cd.rows
    w = len(lam)
    lp = k - w
    base = Matrix.identity(f, k).scale(a) - Cd
    cells = [(i, lp + j) for i in range(lp) for j in range(w)]

    def K_of(values: dict) -> Matrix:
        rows = [[0] * k for _ in range(k)]
        for (i, j), v in values.items():
            rows[i][j] = v
        for i, x in enumerate(lam):
            rows[lp + i][lp + i] = x
        return Matrix._raw(f, tuple(tuple(r) for r in rows))

    def coeffs(values: dict) -> tuple[int, ...]:
        cp = char_poly(base - K_of(values)).coeffs
        return tuple(cp[i] if i < len(cp) else 0 for i in range(k))

    c0 = coeffs({})
    columns = []
    for cell in cells:
        ci = coeffs({cell: 1})
        columns.append(tuple(f.sub(x, y) for x, y in zip(ci, c0)))
    system = Matrix.from_columns(f, columns)
    sol = system.solve(tuple(f.neg(x) for x in c0))
    if sol is None:
        return None
    K = K_of(dict(zip(cells, sol)))
    if _is_nil(base - K) and K ** f.p == K:
        return K
    return None


def _diagonal_choices(k: int, a: int, l: int, p: int) -> Iterator[tuple[int, ...]]:
    """Nonzero diagonals (.., a) of length 1..k-1 summing to trace(a I - Cd) = k a - l.

    Uniform diagonals a I come first, then the rest lexicographically.
    """
    target = (k * a - l) % p
    for w in range(k - 1, 0, -1):
        uniform = (a,) * w
        if (w * a) % p == target:
            yield uniform
        for head in itertools.product(range(1, p), repeat=w - 1):
            lam = head + (a,)
            if lam != uniform and sum(lam) % p == target:
                yield lam


def _completion_search(f: FieldSpec, Cd: Matrix, a: int, cap: int) -> Matrix | None:
    k = Cd.rows
    free = (k - 1) * (k - 1)
    if f.q ** free > cap:
        return None
    base = Matrix.identity(f, k).scale(a) - Cd
    for values in itertools.product(range(f.q), repeat=free):
        rows = [[0] * k for _ in range(k)]
        it = iter(values)
        for i in range(k - 1):
            for j in range(1, k):
                rows[i][j] = next(it)
        rows[k - 1][k - 1] = a % f.p
        K = Matrix._raw(f, tuple(tuple(r) for r in rows))
        if _is_nil(base - K) and K ** f.p == K:
            return K
    return None


def trailing_p_potent_completion(spec: FieldSpec, d: Sequence[int], k: int, a: int, l: int,
                                 cap: int = COMPLETION_SEARCH_CAP) -> Matrix:
    """k x k p-potent K with zero first column, last row (0..0, a), and
    (a I - Cd) - K nilpotent, where Cd is the companion of the last k of ``d``.

    k = 2 uses the closed form; larger k solve the affine char-poly system of
    the block family [[0, X], [0, diag]] and then fall back to bounded search.
    """
    f = spec
    if k < 1 or len(d) < k:
        raise PreconditionViolated(f"need k >= 1 trailing coefficients (k={k}, len(d)={len(d)})")
    if not 1 <= a % f.p <= f.p - 1:
        raise PreconditionViolated(f"a must be a nonzero residue, got {a}")
    Cd = CompanionSpec(f, tuple(d[len(d) - k:])).matrix()
    if Cd.trace().code != l % f.p:
        raise PreconditionViolated(f"trailing companion has trace {Cd.trace()}, expected {l % f.p}")
    if k == 1:
        raise CompletionFailed("a 1x1 block cannot have zero first column and last entry a != 0")
    if k == 2:
        return _completion_closed_form(f, Cd, a % f.p, l % f.p)
    for lam in _diagonal_choices(k, a % f.p, l % f.p, f.p):
        K = _completion_affine(f, Cd, a % f.p, lam)
        if K is not None:
            return K
    K = _completion_search(f, Cd, a % f.p, cap)
    if K is None:
        raise CompletionFailed(f"no trailing p-potent block for k={k}, a={a}, l={l}")
    return K


# -- the main construction --

def _verify_special(dec: Decomposition, max_index: int) -> None:
    if not dec.checks.ok(max_index):
        raise Unverifiable(f"{dec.route.value} certificate failed: {dec.checks}")
    if dec.shape is not None and not shape_ok(dec):
        raise Unverifiable(f"{dec.route.value} certificate lost its special shape")


def main_lemma(C: CompanionSpec, k: int, a: int, l: int,
               block_scalars: Sequence[int] | None = None) -> Decomposition:
    """Special decomposition D = E + V of a representative D = P^-1 C P.

    E^p = E, V^{k+1} = 0, V's first column is zero and E's last row is
    (0, ..., 0, a).  Requires trace(C) = (sum of block scalars + k a - l)*1,
    which for uniform scalars is ((n+k+1)/2 a - l)*1.
    """
    f = C.spec
    p = f.p
    n = C.n
    if n < 3 or not 1 <= k <= n - 1 or (n - k) % 2 == 0:
        raise PreconditionViolated(f"main lemma needs n>=3, 1<=k<=n-1, n-k odd (n={n}, k={k})")
    if not 1 <= a % p <= p - 1 or not 1 <= l % p <= p - 1:
        raise PreconditionViolated(f"a and l must be nonzero residues (a={a}, l={l})")
    nblocks = (n - k + 1) // 2
    scalars = [a % p] * nblocks if block_scalars is None else [s % p for s in block_scalars]
    if len(scalars) != nblocks or any(s == 0 for s in scalars):
        raise PreconditionViolated(f"need {nblocks} nonzero block scalars, got {scalars}")
    t = C.trace().code
    if t >= p or t != (sum(scalars) + k * a - l) % p:
        raise PreconditionViolated(f"trace {f.format(t)} does not match a={a}, l={l}, k={k}")
    if k == 2 and (a - l) % p:
        # trace of the nilpotent remainder would be a - l
        raise CompletionFailed(f"k=2 needs a = l (got a={a % p}, l={l % p})")

    ab = alternating_basis(C, k, a, scalars if block_scalars is not None else None)
    bad = template_violations(ab)
    if bad:
        raise Unverifiable(f"alternating basis off template at {bad}")
    D = ab.D
    s = n - k
    K = trailing_p_potent_completion(f, ab.d, k, a, l)
    Q = D.submatrix(s, n, s, n)
    T = Q - K

    rows = [[0] * n for _ in range(n)]
    for i in range(1, s - 1, 2):  # R: ones at (i+1, i) for odd i
        rows[i + 1][i] = 1
    for i in range(0, s, 2):  # S: odd-indexed d's in the last column
        rows[i][n - 1] = ab.d[i]
    for i in range(k):
        for j in range(k):
            rows[s + i][s + j] = T.code(i, j)
    V = Matrix._raw(f, tuple(tuple(r) for r in rows))
    E = D - V
    dec = Decomposition(
        A=D, E=E, V=V, route=Route.MAINCOR, checks=certify(D, E, V),
        params={"k": k, "a": a % p, "l": l % p, "t": t},
        witness=ab.witness, shape=SpecialShape(a % p),
        detail=f"main lemma k={k} a={a % p} l={l % p}"
        + ("" if block_scalars is None else f" blocks={scalars}"),
    )
    _verify_special(dec, k + 1)
    if E.row(n - 1)[n - 1] != a % p:
        raise Unverifiable("last row of E is not (0, ..., 0, a)")
    return dec


def maincor_candidates(n: int, k: int, t: int, p: int) -> list[tuple[int, int]]:
    """(a, l) pairs with l = (n+k+1)/2 a - t in [1, p-1]; pairs with a = l first."""
    h = (n + k + 1) // 2
    pairs = [(a, (h * a - t) % p) for a in range(1, p)]
    pairs = [(a, l) for a, l in pairs if l != 0]
    return [pr for pr in pairs if pr[0] == pr[1]] + [pr for pr in pairs if pr[0] != pr[1]]


def minus3_candidates(n: int, k: int, t: int, p: int) -> list[tuple[int, int]]:
    """(a, l) pairs with t = ((n-k-1)/2 a + l)*1, l in [1, p-1]; a = l first."""
    h = (n - k - 1) // 2
    pairs = [(a, (t - h * a) % p) for a in range(1, p)]
    pairs = [(a, l) for a, l in pairs if l != 0]
    return [pr for pr in pairs if pr[0] == pr[1]] + [pr for pr in pairs if pr[0] != pr[1]]


def _trace_index(C: CompanionSpec) -> int:
    t = C.spec.prime_subfield_index(C.trace())
    if t is None:
        raise TraceNotPrimeSubfield(f"trace {C.trace()} is not an integer multiple of unity")
    return t


def _maincor_pairs(C: CompanionSpec, k: int) -> Decomposition:
    t = _trace_index(C)
    failures = []
    for a, l in maincor_candidates(C.n, k, t, C.spec.p):
        try:
            return main_lemma(C, k, a, l)
        except CompletionFailed as exc:
            failures.append(f"(a={a}, l={l}): {exc}")
    raise NoViableA("no (a, l) pair completed: " + "; ".join(failures) if failures else "no (a, l) pair")


def route_maincor(C: CompanionSpec, k: int = 2) -> Decomposition:
    """Special decomposition with E's last row (0, ..., 0, a), a != 0."""
    n, p = C.n, C.spec.p
    if n < 3 or (n - k) % 2 == 0 or not 1 <= k <= n - 1:
        raise PreconditionViolated(f"maincor needs n>=3, n-k odd (n={n}, k={k})")
    if ((n + k + 1) // 2) % p == 0:
        raise PreconditionViolated("(n+k+1)/2 vanishes in the field")
    return _maincor_pairs(C, k)


# -- affine changes of representative --

Inner = Callable[[CompanionSpec], Decomposition]


def _via_shift(C: CompanionSpec, b: int, inner: Inner) -> Decomposition:
    """C ~ b I + C'; decompose C' and add b I to the p-potent part."""
    f = C.spec
    n = C.n
    C2, Ws = shifted_companion(C, (b,) * n)
    dec = inner(C2)
    bI = Matrix.identity(f, n).scale(b)
    W = Ws.then(dec.witness) if dec.witness is not None else Ws
    D = W.reduce(C.matrix())
    E = bI + dec.E
    V = dec.V
    return replace(
        dec, A=D, E=E, V=V, checks=certify(D, E, V), witness=W,
        shape=_special_shape(E, V),
        detail=f"shift b={b % f.p}; {dec.detail}",
    )


def _negation_witness(C: CompanionSpec) -> tuple[CompanionSpec, SimilarityWitness]:
    C1 = negate_companion(C)
    negC = -C.matrix()
    W = SimilarityWitness.from_P(krylov_matrix(negC, (1,) + (0,) * (C.n - 1)), "negation")
    if W.reduce(negC) != C1.matrix():
        raise Unverifiable("negated companion witness does not reconjugate")
    return C1, W


def _via_reflection(C: CompanionSpec, b: int, inner: Inner) -> Decomposition:
    """C ~ b I - C''; decompose C'' and reflect: E = b I - E'', V = -V''."""
    f = C.spec
    n = C.n
    C1, W1 = _negation_witness(C)  # -C ~ C1
    C2, W2 = shifted_companion(C1, (-b,) * n)  # C1 ~ -b I + C2
    dec = inner(C2)
    W = W1.then(W2)
    if dec.witness is not None:
        W = W.then(dec.witness)
    D = W.reduce(C.matrix())
    E = Matrix.identity(f, n).scale(b) - dec.E
    V = -dec.V
    return replace(
        dec, A=D, E=E, V=V, checks=certify(D, E, V), witness=W,
        shape=_special_shape(E, V),
        detail=f"reflect b={b % f.p}; {dec.detail}",
    )


def _via_corner(C: CompanionSpec, inner: Inner) -> Decomposition:
    """C ~ F + C1 with F = diag(0, ..., 0, 1); E = F + Q E1 Q^-1, V = Q V1 Q^-1."""
    f = C.spec
    n = C.n
    C1, Ws = shifted_companion(C, (0,) * (n - 1) + (1,))
    dec = inner(C1)
    F = Matrix.diag(f, (0,) * (n - 1) + (1,))
    D = Ws.reduce(C.matrix())
    D1, Q = dec.A, dec.witness
    variants = [(Q, dec.E, dec.V)]
    for also_prev in (False, True):
        _, Qn = normalize_last(D1, Q, -1, also_prev)
        S_inv_Q = Qn.P_inv @ Q.P  # conjugator from the natural to the normalized representative
        S_Q = Q.P_inv @ Qn.P
        variants.append((Qn, S_inv_Q @ dec.E @ S_Q, S_inv_Q @ dec.V @ S_Q))
    for Qv, E1, V1 in variants:
        E = F + Qv.lift(E1)
        V = Qv.lift(V1)
        checks = certify(D, E, V)
        if checks.p_potent_ok:
            return replace(
                dec, A=D, E=E, V=V, checks=checks, witness=Ws,
                shape=_special_shape(E, V),
                detail=f"corner shift; {dec.detail}",
            )
    raise TripotencyFailed("F + Q E1 Q^-1 is not p-potent under any sign normalization")


def route_minus3(C: CompanionSpec, k: int = 2, a: int | None = None, l: int | None = None) -> Decomposition:
    """Special decomposition with E's last row zero, via C ~ a I - C''.

    Without explicit (a, l) every pair with trace(C) = ((n-k-1)/2 a + l)*1 is
    tried, pairs with a = l first.
    """
    n, p = C.n, C.spec.p
    if n < 3 or (n - k) % 2 == 0 or not 1 <= k <= n - 1:
        raise PreconditionViolated(f"route_minus3 needs n>=3, n-k odd (n={n}, k={k})")
    t = _trace_index(C)
    if a is None:
        pairs = minus3_candidates(n, k, t, p)
    else:
        if (t - ((n - k - 1) // 2) * a - l) % p:
            raise PreconditionViolated(f"trace {t} does not match a={a}, l={l}")
        pairs = [(a % p, l % p)]
    failures = []
    for aa, ll in pairs:
        try:
            dec = _via_reflection(C, aa, lambda C2, aa=aa, ll=ll: main_lemma(C2, k, aa, ll))
        except CompletionFailed as exc:
            failures.append(f"(a={aa}, l={ll}): {exc}")
            continue
        _verify_special(dec, k + 1)
        return replace(dec, route=Route.MINUS3_SHIFT)
    raise NoViableA("route_minus3: " + ("; ".join(failures) or "no (a, l) pair"))


def route_trip(C: CompanionSpec) -> Decomposition:
    """Characteristic 3, trace 0, (n+3)/2 = 0: tripotent E = F + Q E1 Q^-1."""
    f = C.spec
    n = C.n
    if f.p != 3 or n < 3 or n % 2 == 0 or ((n + 3) // 2) % 3 != 0:
        raise PreconditionViolated("route_trip needs p=3, odd n>=3 with (n+3)/2 = 0")
    if _trace_index(C) != 0:
        raise PreconditionViolated("route_trip needs trace 0")
    dec = _via_corner(C, lambda C1: main_lemma(C1, 2, 1, 1))
    _verify_special(dec, 3)
    return replace(dec, route=Route.P3_T0_TRIP)


def route_mixed(C: CompanionSpec) -> Decomposition:
    """Main construction with per-block diagonal scalars (k = 2).

    The block identities behind the main lemma hold for any nonzero scalar in
    each 2x2 diagonal block, so the trace only has to equal
    (sum of block scalars + a) with a = l; some choice always exists.
    """
    f = C.spec
    n, p = C.n, f.p
    t = _trace_index(C)
    nblocks = (n - 1) // 2
    for a in range(1, p):
        for scalars in itertools.product(range(1, p), repeat=nblocks):
            if (sum(scalars) + a - t) % p:
                continue
            try:
                return main_lemma(C, 2, a, a, block_scalars=scalars)
            except CompletionFailed:
                continue
    raise NoViableA("no block scalar assignment")


# -- case tree --

def _oracle_at(C_or_A: Matrix, detail: str) -> Decomposition:
    from .oracle import oracle_decompose  # local import: oracle depends on this module

    found = oracle_decompose(C_or_A, 3)
    if found is None:
        raise Unverifiable("exhaustive search found no index-3 decomposition")
    E, V = found
    return Decomposition(
        A=C_or_A, E=E, V=V, route=Route.ORACLE_FALLBACK, checks=certify(C_or_A, E, V),
        witness=SimilarityWitness.identity(C_or_A.spec, C_or_A.rows),
        shape=_special_shape(E, V), detail=detail, fallback=True,
    )


def _primary(C: CompanionSpec, t: int) -> tuple[Route, Inner] | None:
    n, p = C.n, C.spec.p
    if ((n + 3) // 2) % p:
        return Route.MAINCOR, lambda C: route_maincor(C, 2)
    if p != 3:
        return Route.MINUS3_SHIFT, lambda C: _via_shift(C, 1, lambda C2: route_minus3(C2, 2))
    if t == 1:
        return Route.P3_T1, lambda C: _via_shift(C, 1, lambda C2: route_minus3(C2, 2, 1, 1))
    if t == 2:
        return Route.P3_T2, lambda C: main_lemma(C, 2, 1, 1)
    return Route.P3_T0_TRIP, route_trip


def _fallbacks(C: CompanionSpec) -> Iterator[tuple[Route, str, Inner]]:
    p = C.spec.p

    def inner_any(C2: CompanionSpec) -> Decomposition:
        try:
            return _maincor_pairs(C2, 2)
        except (NoViableA, CompletionFailed):
            return route_minus3(C2, 2)

    yield Route.MAINCOR, "maincor pairs", lambda C: _maincor_pairs(C, 2)
    yield Route.MINUS3_SHIFT, "minus3 without shift", lambda C: route_minus3(C, 2)
    for b in range(1, p):
        yield Route.MINUS3_SHIFT, f"shift b={b}", lambda C, b=b: _via_shift(C, b, inner_any)
    yield Route.P3_T0_TRIP, "corner shift", lambda C: _via_corner(C, lambda C1: _maincor_pairs(C1, 2))
    yield Route.MAINCOR, "mixed block scalars", route_mixed


_EXPECTED = (PreconditionViolated, CompletionFailed, NoViableA, TripotencyFailed, Unverifiable)


def special_candidates(C: CompanionSpec, oracle: bool = True) -> Iterator[Decomposition]:
    """Verified special decompositions of an odd-size companion, in fallback order.

    Each yielded certificate is at the representative ``dec.A`` with
    ``dec.witness.reduce(C.matrix()) == dec.A``, E^p = E, V^3 = 0, and V's
    first column zero.
    """
    n = C.n
    if n < 3 or n % 2 == 0:
        raise PreconditionViolated("special decompositions are built for odd n >= 3")
    t = _trace_index(C)
    Cm = C.matrix()
    primary = _primary(C, t)
    steps: list[tuple[Route, str, Inner, bool]] = [(primary[0], "primary", primary[1], False)]
    steps += [(r, d, fn, True) for r, d, fn in _fallbacks(C)]
    for route, label, fn, is_fallback in steps:
        try:
            dec = fn(C)
        except _EXPECTED as exc:
            log.debug("route %s (%s) failed on %s: %s", route.value, label, C, exc)
            continue
        dec = replace(dec, route=route, fallback=is_fallback,
                      detail=f"{label}: {dec.detail}" if is_fallback else dec.detail)
        if not dec.checks.ok(3) or not shape_ok(dec) or dec.witness.reduce(Cm) != dec.A:
            log.debug("route %s (%s) produced an invalid certificate", route.value, label)
            continue
        yield dec
    if oracle:
        try:
            dec = _oracle_at(Cm, "exhaustive search after all constructions failed")
        except (SearchSpaceTooLarge, Unverifiable) as exc:
            log.debug("oracle unavailable for %s: %s", C, exc)
            return
        if shape_ok(dec):
            yield dec


def _n2(C: CompanionSpec, t: int) -> Decomposition:
    f = C.spec
    c0 = C.codes[0]
    Cm = C.matrix()
    if t:
        u = f.sub(f.mul(t, t), c0)
        E = Matrix._raw(f, ((t, u), (0, 0)))
        detail = "E = [[t, t^2 - c0], [0, 0]]"
    elif c0 == 0:
        E = Matrix.zeros(f, 2)
        detail = "nilpotent input"
    else:
        E = Matrix._raw(f, ((1, f.sub(1, c0)), (0, f.neg(1))))
        detail = "E = [[1, 1 - c0], [0, -1]]"
    V = Cm - E
    checks = certify(Cm, E, V)
    if not checks.ok(2):
        from .oracle import enumerate_p_potents

        for E in enumerate_p_potents(2, f):
            V = Cm - E
            if (V @ V).is_zero():
                checks = certify(Cm, E, V)
                detail = "enumerated p-potent"
                break
    return Decomposition(A=Cm, E=E, V=V, route=Route.N2, checks=checks,
                         params={"t": t}, detail=detail)


def _lift_border(C: CompanionSpec, inner: Decomposition) -> Decomposition:
    f = C.spec
    n = C.n
    one = Matrix.identity(f, 1)
    P = Matrix.block([[one, Matrix.zeros(f, 1, n - 1)], [Matrix.zeros(f, n - 1, 1), inner.witness.P]])
    P_inv = Matrix.block([[one, Matrix.zeros(f, 1, n - 1)], [Matrix.zeros(f, n - 1, 1), inner.witness.P_inv]])
    W = SimilarityWitness(P, P_inv, f"border ; {inner.witness.note}")
    D = W.reduce(C.matrix())
    top = D.submatrix(0, 1, 1, n)
    left = D.submatrix(1, n, 0, 1)
    E = Matrix.block([[Matrix.zeros(f, 1), top], [Matrix.zeros(f, n - 1, 1), inner.E]])
    V = Matrix.block([[Matrix.zeros(f, 1), Matrix.zeros(f, 1, n - 1)], [left, inner.V]])
    return Decomposition(
        A=D, E=E, V=V, route=Route.EVEN_BORDER, checks=certify(D, E, V),
        params=dict(inner.params), witness=W, shape=_special_shape(E, V),
        detail=f"inner={inner.route.value}: {inner.detail}", fallback=inner.fallback,
    )


def even_border(C: CompanionSpec) -> Decomposition:
    """Even n >= 4: border a special decomposition of companion(c_1, ..., c_{n-1})."""
    n = C.n
    if n < 4 or n % 2:
        raise PreconditionViolated("even_border needs even n >= 4")
    t = _trace_index(C)
    sub = CompanionSpec(C.spec, C.codes[1:])
    for inner in special_candidates(sub):
        dec = _lift_border(C, inner)
        if dec.checks.ok(3):
            return replace(dec, params={**dec.params, "t": t})
    raise Unverifiable(f"no bordered certificate for {C}")


def _transport(dec: Decomposition, target: Matrix) -> Decomposition:
    """Move a representative-level certificate back to ``target``."""
    W = dec.witness
    if W is None or dec.A == target:
        E, V = dec.E, dec.V
    else:
        E, V = W.lift(dec.E), W.lift(dec.V)
    checks = certify(target, E, V)
    return replace(dec, A=target, E=E, V=V, checks=checks, shape=_special_shape(E, V))


def decompose_companion(C: CompanionSpec) -> Decomposition:
    """E + V = C with E^p = E and V^3 = 0.

    Raises TraceNotPrimeSubfield when trace(C) is not t*1; no such
    decomposition exists then.
    """
    f = C.spec
    n = C.n
    t = _trace_index(C)
    Cm = C.matrix()
    if n == 1:
        V = Matrix.zeros(f, 1)
        dec = Decomposition(A=Cm, E=Cm, V=V, route=Route.N1, checks=certify(Cm, Cm, V), params={"t": t})
    elif n == 2:
        dec = _n2(C, t)
    elif n % 2:
        dec = next(special_candidates(C), None)
        if dec is None:
            raise Unverifiable(f"every construction failed for {C}")
        dec = _transport(dec, Cm)
        dec = replace(dec, params={**dec.params, "t": t})
    else:
        try:
            dec = _transport(even_border(C), Cm)
        except Unverifiable:
            dec = _transport(_oracle_at(Cm, "bordering failed"), Cm)
    if not dec.checks.ok(3):
        raise Unverifiable(f"final certificate failed for {C}: {dec.checks}")
    return dec


def decompose(A: Matrix) -> Decomposition:
    """E + V = A for a nonderogatory A whose trace lies in the prime subfield."""
    if not A.is_square:
        raise DimensionMismatch("decompose needs a square matrix")
    C, W = companion_form(A)  # raises NotNonderogatory
    if check_trace_condition(A) is None:
        raise TraceNotPrimeSubfield(f"trace {A.trace()} is not an integer multiple of unity")
    dec = decompose_companion(C)
    # C = W.P^-1 A W.P, so A = W.P C W.P^-1
    E, V = W.lift(dec.E), W.lift(dec.V)
    if W.reduce(E) != dec.E or W.reduce(V) != dec.V:
        raise Unverifiable("conjugation transport failed")
    witness = W if dec.witness is None else W.then(dec.witness)
    out = replace(dec, A=A, E=E, V=V, checks=certify(A, E, V), witness=witness,
                  shape=_special_shape(E, V))
    if not out.checks.ok(3):
        raise Unverifiable(f"transported certificate failed: {out.checks}")
    return out




_MATRIX_SCHEMA = {"type": "array", "items": {"type": "array", "items": {"type": "string"}}}

CERTIFICATE_SCHEMA = {
    "type": "object",
    "required": ["field", "n", "A", "E", "V", "route", "params", "checks"],
    "properties": {
        "field": {
            "type": "object",
            "required": ["p", "m", "modulus"],
            "properties": {
                "p": {"type": "integer", "minimum": 3},
                "m": {"type": "integer", "minimum": 1},
                "modulus": {"type": ["array", "null"], "items": {"type": "integer"}},
            },
        },
        "n": {"type": "integer", "minimum": 1},
        "A": _MATRIX_SCHEMA,
        "E": _MATRIX_SCHEMA,
        "V": _MATRIX_SCHEMA,
        "route": {"enum": [r.value for r in Route]},
        "params": {
            "type": "object",
            "required": ["k", "a", "l", "t"],
            "properties": {key: {"type": ["integer", "null"]} for key in ("k", "a", "l", "t")},
        },
        "checks": {
            "type": "object",
            "required": ["sum_ok", "p_potent_ok", "nil_index"],
            "properties": {
                "sum_ok": {"type": "boolean"},
                "p_potent_ok": {"type": "boolean"},
                "nil_index": {"type": ["integer", "null"]},
            },
        },
        "detail": {"type": "string"},
        "fallback": {"type": "boolean"},
    },
}
