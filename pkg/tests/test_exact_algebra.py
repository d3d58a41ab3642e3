import math

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from arithchern.exact_algebra import (INFINITE, FactorizationBoundExceeded, IntMatrix,
                                      bareiss_det, cokernel_order, factorize, gcd_all,
                                      is_prime, p_length, restricted_cokernel_order, snf)

small = st.integers(min_value=-20, max_value=20)


def matrices(max_rows=4, max_cols=4):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r)))


def test_snf_known():
    m = IntMatrix.from_rows([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
    assert snf(m).diag == (2, 6, 12)
    assert cokernel_order(m) == 144


def test_snf_rank_deficient_has_infinite_cokernel():
    m = IntMatrix.from_rows([[1, 2], [2, 4]])
    assert snf(m).rank == 1
    assert cokernel_order(m) is INFINITE


def test_empty_and_zero():
    assert cokernel_order(IntMatrix(0, 3, ())) == 1
    assert cokernel_order(IntMatrix.from_rows([[0, 0]])) is INFINITE


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_snf_transforms_and_divisibility(rows):
    m = IntMatrix.from_rows(rows)
    r = snf(m)
    padded = IntMatrix.diagonal(r.diag, m.rows, m.cols)
    assert r.left @ m @ r.right == padded
    assert abs(r.left.det()) == 1 and abs(r.right.det()) == 1
    nz = [d for d in r.diag if d]
    assert all(d > 0 for d in nz)
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    assert len(nz) == r.rank == sp.Matrix(rows).rank()


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5).flatmap(
    lambda n: st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n)))
def test_bareiss_matches_sympy(rows):
    assert bareiss_det(rows) == int(sp.Matrix(rows).det())


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4).flatmap(
    lambda n: st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n)))
def test_square_cokernel_is_abs_det(rows):
    d = abs(int(sp.Matrix(rows).det()))
    assert cokernel_order(IntMatrix.from_rows(rows)) == (d if d else INFINITE)


def test_restricted_cokernel():
    # columns (4,0,1), (0,3,1), (0,0,1): the image meets the plane of the
    # first two rows in 4Z + 3Z; with the last column dropped it is only a line
    m = IntMatrix.from_rows([[4, 0, 0], [0, 3, 0], [1, 1, 1]])
    assert restricted_cokernel_order(m, [0, 1]) == 12
    m2 = IntMatrix.from_rows([[4, 0], [0, 3], [1, 1]])
    assert restricted_cokernel_order(m2, [0, 1]) is INFINITE


@pytest.mark.parametrize("n", [1, 2, 12, 97, 360, 2 ** 10 * 3 ** 5, 999983 * 7])
def test_factorize_roundtrip(n):
    f = factorize(n)
    assert math.prod(p ** e for p, e in f.items()) == n
    assert all(is_prime(p) for p in f)


def test_factorize_bound():
    big = 1000003 * 1000033
    with pytest.raises(FactorizationBoundExceeded):
        factorize(big, bound=1000)


def test_p_length_and_gcd():
    assert p_length(144, 2) == 4 and p_length(144, 3) == 2 and p_length(144, 5) == 0
    assert gcd_all([12, 18, -30]) == 6
    with pytest.raises(ValueError):
        p_length(0, 2)
