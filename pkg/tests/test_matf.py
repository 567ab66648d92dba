import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from potent_split.errors import DimensionMismatch, FieldMismatch, SingularMatrix
from potent_split.matf import (
    Matrix,
    Polynomial,
    char_poly,
    char_poly_cofactor,
    eigenvalue_member,
    is_nonderogatory,
    mat_ops,
    min_poly,
    predicates,
    rank,
)

from conftest import F3, F5, F9, companion, companions, fields, matrices


def naive_matmul(A, B):
    f = A.spec
    n, m, r = A.rows, A.cols, B.cols
    out = []
    for i in range(n):
        row = []
        for j in range(r):
            acc = 0
            for k in range(m):
                acc = f.add(acc, f.mul(A.code(i, k), B.code(k, j)))
            row.append(acc)
        out.append(tuple(row))
    return Matrix._raw(f, tuple(out))


def image_size_rank(A):
    """log_q of |{A x}|, by enumerating every x."""
    f = A.spec
    image = {A.apply(x) for x in itertools.product(range(f.q), repeat=A.cols)}
    r = 0
    while f.q ** r < len(image):
        r += 1
    assert f.q ** r == len(image)
    return r


# -- spec examples --

def test_identity_times_A():
    A = Matrix(F3, [[1, 2, 0], [0, 1, 1], [2, 2, 2]])
    I = Matrix.identity(F3, 3)
    assert mat_ops(I, A, "mul") == A
    assert mat_ops(A, None, "conjugate_by", P=I) == A


def test_shift_cubed_is_zero():
    C = companion(F3, 0, 0, 0).matrix()
    assert mat_ops(C, None, "pow", k=3).is_zero()
    assert not (C @ C).is_zero()


def test_char_poly_examples():
    C = companion(F3, 1, 0, -1)
    chi = char_poly(C.matrix())
    assert chi == Polynomial.from_values(F3, [1, 0, 2, 1])
    assert str(chi) == "X^3 + 2*X^2 + 1"
    a = 2
    D = Matrix.diag(F5, [a] * 4)
    lin = Polynomial.from_values(F5, [-a, 1])
    assert char_poly(D) == lin * lin * lin * lin


def test_min_poly_examples():
    X = Polynomial.monomial(F3, 1)
    assert min_poly(Matrix.zeros(F3, 3)) == X
    assert min_poly(Matrix.identity(F3, 3)) == X - Polynomial.from_values(F3, [1])
    C = companion(F5, 1, 2, 3, 4)
    assert min_poly(C.matrix()) == char_poly(C.matrix()) == C.char_poly()


def test_predicates_examples():
    pr = predicates(Matrix.diag(F3, [0, 0, 1]))
    assert pr.is_p_potent and not pr.is_nilpotent
    pr = predicates(companion(F3, 0, 0, 0).matrix())
    assert pr.is_nilpotent and pr.nilpotency_index == 3 and pr.is_nonderogatory
    assert predicates(Matrix.diag(F3, [2, 2])).is_p_potent
    assert not predicates(Matrix.diag(F3, [2, 2])).is_nonderogatory


def test_rank_examples():
    assert rank(Matrix.identity(F5, 4)) == 4
    assert rank(Matrix.zeros(F5, 3, 2)) == 0
    assert rank(Matrix(F3, [[1, 2], [2, 1]])) == 1


def test_eigenvalue_examples():
    assert eigenvalue_member(Matrix.identity(F3, 2), 1)
    assert not eigenvalue_member(companion(F3, 1, 0, -1).matrix(), 0)
    assert eigenvalue_member(companion(F3, 0, 0).matrix(), 0)


# -- errors --

def test_dimension_and_field_errors():
    A = Matrix.identity(F3, 2)
    with pytest.raises(DimensionMismatch):
        A @ Matrix.identity(F3, 3)
    with pytest.raises(DimensionMismatch):
        Matrix(F3, [[1, 2], [1]])
    with pytest.raises(FieldMismatch):
        A + Matrix.identity(F5, 2)
    with pytest.raises(SingularMatrix):
        Matrix(F3, [[1, 2], [2, 1]]).inverse()


def test_immutability():
    A = Matrix(F3, [[1, 0], [0, 1]])
    B = A.with_entry(0, 1, 2)
    assert A.code(0, 1) == 0 and B.code(0, 1) == 2
    with pytest.raises(AttributeError):
        A.rows = 5


# -- properties against independent oracles --

@given(st.data())
def test_matmul_matches_naive(data):
    spec = data.draw(fields)
    n = data.draw(st.integers(1, 4))
    A = data.draw(matrices(spec, n))
    B = data.draw(matrices(spec, n))
    assert A @ B == naive_matmul(A, B)


@given(matrices(max_n=4))
def test_char_poly_matches_cofactor(A):
    assert char_poly(A) == char_poly_cofactor(A)


@given(matrices(max_n=4))
def test_cayley_hamilton_and_min_poly(A):
    chi = char_poly(A)
    mu = min_poly(A)
    assert chi.eval_matrix(A).is_zero()
    assert mu.eval_matrix(A).is_zero()
    assert mu.is_monic()
    assert chi.divmod(mu)[1].is_zero()
    assert is_nonderogatory(A) == (mu == chi)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_min_poly_is_least_degree_over_f3(n):
    # exhaustive: no monic polynomial of smaller degree annihilates A
    import random
    rng = random.Random(n)
    for _ in range(40):
        A = Matrix._raw(F3, tuple(tuple(rng.randrange(3) for _ in range(n)) for _ in range(n)))
        mu = min_poly(A)
        for d in range(mu.degree):
            for low in itertools.product(range(3), repeat=d):
                assert not Polynomial(F3, low + (1,)).eval_matrix(A).is_zero()


@given(matrices(max_n=3))
def test_rank_matches_image_size(A):
    if A.spec.q ** A.cols <= 10_000:
        assert A.rank() == image_size_rank(A)


@given(matrices(max_n=4))
def test_inverse(A):
    if A.is_invertible():
        I = Matrix.identity(A.spec, A.rows)
        assert A @ A.inverse() == I == A.inverse() @ A
        assert A ** -2 == (A.inverse()) @ (A.inverse())
    else:
        assert A.rank() < A.rows


@given(st.data())
def test_solve(data):
    A = data.draw(matrices(max_n=4))
    x = tuple(data.draw(st.lists(st.integers(0, A.spec.q - 1), min_size=A.cols, max_size=A.cols)))
    b = A.apply(x)
    y = A.solve(b)
    assert y is not None and A.apply(y) == b


@given(matrices(max_n=4))
def test_power_and_trace(A):
    P = Matrix.identity(A.spec, A.rows)
    for k in range(5):
        assert A ** k == P
        P = naive_matmul(P, A)
    assert (A + A.transpose()).trace() == A.trace() + A.trace()


@given(matrices(max_n=4), st.data())
def test_similarity_invariants(A, data):
    P = data.draw(matrices(A.spec, A.rows))
    if not P.is_invertible():
        return
    B = A.conjugate_by(P)
    assert char_poly(B) == char_poly(A)
    assert min_poly(B) == min_poly(A)
    assert B.rank() == A.rank()


@given(companions(max_n=5))
def test_companion_char_poly(C):
    assert char_poly(C.matrix()) == C.char_poly()
    assert is_nonderogatory(C.matrix())


def test_extension_field_linear_algebra():
    t = [0, 1]
    A = Matrix(F9, [[t, [1, 0]], [[1, 0], [0, 0]]])
    assert char_poly(A) == char_poly_cofactor(A)
    assert min_poly(A) == char_poly(A)
    assert A @ A.inverse() == Matrix.identity(F9, 2)
    assert str(A.trace()) == "[0,1]"
