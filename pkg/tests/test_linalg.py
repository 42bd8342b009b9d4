from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bredonfp.errors import CharacteristicError, DimensionError
from bredonfp.linalg import (
    FpChainComplex,
    FpMatrix,
    LinearSolver,
    check_prime,
    homology_dims,
    inverse,
    matmul_mod,
    nullspace,
    rank,
    rref,
    solve,
    solve_affine_operator,
)

from .oracles import rank_by_enumeration, rank_plain

PRIMES = [2, 3, 5, 7]


@st.composite
def matrices(draw, max_rows=5, max_cols=6, primes=PRIMES):
    p = draw(st.sampled_from(primes))
    r = draw(st.integers(0, max_rows))
    c = draw(st.integers(0, max_cols))
    entries = draw(st.lists(st.integers(0, p - 1), min_size=r * c, max_size=r * c))
    return FpMatrix(np.array(entries, dtype=np.int64).reshape(r, c), p)


def test_small_examples():
    assert rank(FpMatrix.identity(2, 3)) == 3
    assert nullspace(FpMatrix.zeros(2, 2, 2)).cols == 2
    hexagon = np.zeros((6, 6), dtype=np.int64)
    for e in range(6):
        hexagon[e, e] = 1
        hexagon[(e + 1) % 6, e] = 1
    assert rank(FpMatrix(hexagon, 2)) == 5


def test_prime_checks():
    for p in (2, 3, 65537):
        assert check_prime(p) == p
    for bad in (0, 1, 4, 9, 1 << 21):
        with pytest.raises(CharacteristicError):
            check_prime(bad)


def test_mixing_fields_is_rejected():
    with pytest.raises(CharacteristicError):
        FpMatrix.identity(2, 2) @ FpMatrix.identity(3, 2)
    with pytest.raises(DimensionError):
        FpMatrix.identity(2, 2) @ FpMatrix.identity(2, 3)


@settings(max_examples=150, deadline=None)
@given(matrices(max_rows=4, max_cols=5, primes=[2, 3]))
def test_rank_matches_span_enumeration(M):
    assert rank(M) == rank_by_enumeration(M.a.tolist(), M.p)


@settings(max_examples=150, deadline=None)
@given(matrices(max_rows=8, max_cols=9, primes=[2, 3, 5, 7, 101]))
def test_rank_matches_plain_elimination(M):
    assert rank(M) == rank_plain(M.a.tolist(), M.p)


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_rank_nullity_and_transpose(M):
    N = nullspace(M)
    assert rank(M) + N.cols == M.cols
    assert (M @ N).is_zero()
    assert rank(N) == N.cols
    assert rank(M.T) == rank(M)


@settings(max_examples=150, deadline=None)
@given(matrices(), st.data())
def test_solve_finds_solutions_exactly_when_they_exist(M, data):
    x = np.array(data.draw(st.lists(st.integers(0, M.p - 1), min_size=M.cols, max_size=M.cols)),
                 dtype=np.int64).reshape(M.cols, 1)
    b = M @ FpMatrix(x, M.p)
    sol = solve(M, b)
    assert sol is not None and M @ sol == b
    # an arbitrary right-hand side is solvable iff appending it keeps the rank
    y = np.array(data.draw(st.lists(st.integers(0, M.p - 1), min_size=M.rows, max_size=M.rows)),
                 dtype=np.int64).reshape(M.rows, 1)
    c = FpMatrix(y, M.p)
    aug = FpMatrix(np.hstack([M.a, y]), M.p)
    sol = LinearSolver(M).solve(c)
    assert (sol is not None) == (rank(aug) == rank(M))
    if sol is not None:
        assert M @ sol == c


@settings(max_examples=100, deadline=None)
@given(matrices(max_rows=6, max_cols=6))
def test_rref_is_reduced(M):
    R, piv = rref(M)
    assert len(piv) == rank(M)
    for i, c in enumerate(piv):
        col = R.a[:, c]
        assert col[i] == 1 and np.count_nonzero(col) == 1
    assert not R.a[len(piv):].any()


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(PRIMES), st.integers(1, 5), st.data())
def test_inverse(p, n, data):
    entries = data.draw(st.lists(st.integers(0, p - 1), min_size=n * n, max_size=n * n))
    M = FpMatrix(np.array(entries, dtype=np.int64).reshape(n, n), p)
    inv = inverse(M)
    assert (inv is not None) == (rank(M) == n)
    if inv is not None:
        assert M @ inv == FpMatrix.identity(p, n)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([2, 3, 65521]), st.integers(0, 7), st.integers(0, 7), st.integers(0, 7), st.data())
def test_matmul_mod_matches_exact_integers(p, r, k, c, data):
    a = np.array(data.draw(st.lists(st.integers(-p + 1, p - 1), min_size=r * k, max_size=r * k)),
                 dtype=np.int64).reshape(r, k)
    b = np.array(data.draw(st.lists(st.integers(-p + 1, p - 1), min_size=k * c, max_size=k * c)),
                 dtype=np.int64).reshape(k, c)
    exact = (a.astype(object) @ b.astype(object)) % p if r * c else np.zeros((r, c), dtype=object)
    assert np.array_equal(matmul_mod(a, b, p), exact.astype(np.int64))


def test_affine_operator_solver():
    # X with A X = X A for A a Jordan block: the centralizer, which contains the identity
    p = 3
    A = np.array([[1, 1], [0, 1]], dtype=np.int64)

    def op(x):
        X = x.reshape(2, 2)
        return ((A @ X - X @ A) % p).reshape(-1)

    assert solve_affine_operator(op, np.zeros(4, dtype=np.int64), p, 4) is not None
    target = np.array([1, 0, 0, 0], dtype=np.int64)  # commutators have trace zero; this one does not
    assert solve_affine_operator(op, target, p, 4) is None
    target = np.array([0, 1, 0, 0], dtype=np.int64)
    x = solve_affine_operator(op, target, p, 4)
    assert x is not None and np.array_equal(op(x), target)


def test_chain_complex_homology():
    p = 2
    d1 = np.zeros((6, 6), dtype=np.int64)
    for e in range(6):
        d1[e, e] = 1
        d1[(e + 1) % 6, e] = 1
    C = FpChainComplex(p, [6, 6], [None, FpMatrix(d1, p)])
    assert homology_dims(C) == [1, 1]
    assert C.euler_characteristic() == 0
    Z = FpChainComplex(p, [0, 0], [None, FpMatrix.zeros(p, 0, 0)])
    assert homology_dims(Z) == [0, 0]
    with pytest.raises(DimensionError):
        FpChainComplex(p, [1, 1, 1], [None, FpMatrix.identity(p, 1), FpMatrix.identity(p, 1)])
