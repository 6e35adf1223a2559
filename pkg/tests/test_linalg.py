from fractions import Fraction

import sympy
from hypothesis import assume, given
from hypothesis import strategies as st

from alephlab.linalg import (
    SummandProjection,
    det,
    hnf_rows,
    int_kernel,
    maximal_minors_gcd,
    mat_vec,
    rank,
    saturate,
    solve_in_span,
    xgcd,
)

small = st.integers(-6, 6)


def matrices(rows, cols):
    return st.lists(st.lists(small, min_size=cols, max_size=cols), min_size=rows, max_size=rows)


def _mul(a, b):
    return [[sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))] for i in range(len(a))]


@given(st.integers(-10**6, 10**6), st.integers(-10**6, 10**6))
def test_xgcd(a, b):
    g, s, t = xgcd(a, b)
    assert s * a + t * b == g
    assert g == sympy.gcd(a, b)


@given(st.integers(1, 5).flatmap(lambda n: matrices(n, n)))
def test_det_matches_sympy(m):
    assert det(m) == sympy.Matrix(m).det()


@given(st.integers(1, 4).flatmap(lambda r: st.integers(1, 4).flatmap(lambda c: matrices(r, c))))
def test_hnf_transform(a):
    h, u = hnf_rows(a)
    assert _mul(u, a) == h
    assert abs(det(u)) == 1
    r = rank(a)
    assert all(not any(row) for row in h[r:])
    assert r == sympy.Matrix(a).rank()


@given(st.integers(1, 3).flatmap(lambda r: matrices(r, 4)))
def test_kernel_and_saturation(a):
    ker = int_kernel(a, 4)
    assert len(ker) == 4 - rank(a)
    for k in ker:
        assert mat_vec(a, k) == [0] * len(a)
    sat = saturate(a, 4)
    assert len(sat) == rank(a)
    if sat:
        assert maximal_minors_gcd(sat) == 1
        for row in a:
            c = solve_in_span(sat, row)
            assert c is not None and all(x.denominator == 1 for x in c)


def test_saturation_example():
    # 2*(1, 1) saturates to (1, 1)
    assert saturate([[2, 2]], 2) in ([[1, 1]], [[-1, -1]])


@given(st.integers(1, 3).flatmap(lambda r: matrices(r, 4)), st.lists(small, min_size=4, max_size=4))
def test_summand_projection(a, w):
    sat = saturate(a, 4)
    assume(sat)
    proj = SummandProjection(sat, 4)
    pw = proj(w)
    assert proj(pw) == pw
    for b in sat:
        assert proj(b) == b
    comp = proj.complement()
    assert len(comp) + len(sat) == 4
    assert abs(det(sat + comp)) == 1
    for c in comp:
        assert proj(c) == [0, 0, 0, 0]


def test_solve_in_span():
    assert solve_in_span([[1, 0], [0, 2]], [3, 1]) == [Fraction(3), Fraction(1, 2)]
    assert solve_in_span([[1, 1]], [1, 0]) is None
