"""Exact linear algebra over Q and Z on lists of rows."""
from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations
from typing import Sequence

Matrix = list[list]


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, s, t)`` with ``s*a + t*b = g = gcd(a, b) >= 0``."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a - (a // b) * b
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


def rref(rows: Sequence[Sequence]) -> tuple[Matrix, list[int]]:
    m = [[Fraction(x) for x in r] for r in rows]
    pivots: list[int] = []
    if not m:
        return m, pivots
    ncols = len(m[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1])


def solve_in_span(basis: Sequence[Sequence], v: Sequence) -> list[Fraction] | None:
    """Coefficients ``c`` with ``sum c_i basis_i = v`` (basis assumed independent), or None."""
    k = len(basis)
    if k == 0:
        return [] if all(x == 0 for x in v) else None
    n = len(v)
    aug = [[Fraction(basis[i][j]) for i in range(k)] + [Fraction(v[j])] for j in range(n)]
    red, piv = rref(aug)
    if k in piv:
        return None
    sol = [Fraction(0)] * k
    for row, c in zip(red, piv):
        sol[c] = row[k]
    return sol


def first_dependency(rows: Sequence[Sequence]) -> tuple[int, list[Fraction]] | None:
    """Index of the first row depending on earlier ones, with the dependency coefficients."""
    kept: list[Sequence] = []
    for i, r in enumerate(rows):
        coeffs = solve_in_span(kept, r) if kept else ([] if all(x == 0 for x in r) else None)
        if coeffs is not None:
            return i, coeffs
        kept.append(r)
    return None


def hnf_rows(a: Sequence[Sequence[int]]) -> tuple[Matrix, Matrix]:
    """Row echelon form over Z: returns ``(H, U)`` with ``U a = H`` and ``U`` unimodular.

    Pivots are positive, entries above a pivot are reduced into
    ``[0, pivot)`` and rows below the rank are zero.
    """
    h = [[int(x) for x in r] for r in a]
    m = len(h)
    u = [[int(i == j) for j in range(m)] for i in range(m)]
    if m == 0:
        return h, u
    ncols = len(h[0])
    r = 0
    pivots = []
    for c in range(ncols):
        for i in range(r + 1, m):
            if h[i][c] == 0:
                continue
            if h[r][c] == 0:
                h[r], h[i] = h[i], h[r]
                u[r], u[i] = u[i], u[r]
                continue
            a0, b0 = h[r][c], h[i][c]
            g, s, t = xgcd(a0, b0)
            p, q = a0 // g, b0 // g
            hr, hi = h[r], h[i]
            h[r] = [s * x + t * y for x, y in zip(hr, hi)]
            h[i] = [-q * x + p * y for x, y in zip(hr, hi)]
            ur, ui = u[r], u[i]
            u[r] = [s * x + t * y for x, y in zip(ur, ui)]
            u[i] = [-q * x + p * y for x, y in zip(ur, ui)]
        if h[r][c] != 0:
            if h[r][c] < 0:
                h[r] = [-x for x in h[r]]
                u[r] = [-x for x in u[r]]
            pivots.append(c)
            r += 1
            if r == m:
                break
    for k, c in enumerate(pivots):
        for i in range(k):
            q = h[i][c] // h[k][c]
            if q:
                h[i] = [x - q * y for x, y in zip(h[i], h[k])]
                u[i] = [x - q * y for x, y in zip(u[i], u[k])]
    return h, u


def int_rank(a: Sequence[Sequence[int]]) -> int:
    h, _ = hnf_rows(a)
    return sum(1 for row in h if any(row))


def transpose(a: Sequence[Sequence]) -> Matrix:
    return [list(col) for col in zip(*a)]


def int_kernel(a: Sequence[Sequence[int]], ncols: int) -> Matrix:
    """Z-basis (as rows) of ``{x in Z^ncols : a x = 0}``."""
    if not a:
        return [[int(i == j) for j in range(ncols)] for i in range(ncols)]
    at = transpose(a)
    h, u = hnf_rows(at)
    r = sum(1 for row in h if any(row))
    return [u[i] for i in range(r, ncols)]


def saturate(vectors: Sequence[Sequence[int]], dim: int) -> Matrix:
    """Z-basis of ``span_Q(vectors) & Z^dim``."""
    vecs = [list(map(int, v)) for v in vectors if any(v)]
    if not vecs:
        return []
    orth = int_kernel(vecs, dim)
    return int_kernel(orth, dim)


def det(a: Sequence[Sequence[int]]) -> int:
    """Bareiss fraction-free determinant."""
    m = [list(map(int, r)) for r in a]
    n = len(m)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def maximal_minors_gcd(rows: Sequence[Sequence[int]]) -> int:
    """gcd of the k x k minors of a k x n integer matrix; 1 iff the rows span a direct summand."""
    k = len(rows)
    if k == 0:
        return 1
    n = len(rows[0])
    g = 0
    for cols in combinations(range(n), k):
        g = math.gcd(g, det([[r[c] for c in cols] for r in rows]))
        if g == 1:
            break
    return g


def inverse_unimodular(a: Sequence[Sequence[int]]) -> Matrix:
    n = len(a)
    aug = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(a)]
    red, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ValueError("matrix is singular")
    inv = [[row[n + j] for j in range(n)] for row in red[:n]]
    if any(x.denominator != 1 for r in inv for x in r):
        raise ValueError("matrix is not unimodular")
    return [[int(x) for x in r] for r in inv]


def mat_vec(a: Sequence[Sequence], v: Sequence) -> list:
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def vec_mat(v: Sequence, a: Sequence[Sequence]) -> list:
    if not a:
        return []
    return [sum(v[i] * a[i][j] for i in range(len(v))) for j in range(len(a[0]))]


class SummandProjection:
    """Projection of ``Z^dim`` onto the direct summand spanned by the rows of ``basis``.

    The kernel is a complement built from the unimodular transform that
    brings ``basis^T`` to echelon form.  Raises if the rows do not span a
    direct summand.
    """

    def __init__(self, basis: Sequence[Sequence[int]], dim: int):
        self.basis = [list(map(int, b)) for b in basis]
        self.dim = dim
        k = len(self.basis)
        if k == 0:
            self.u, self.h_inv = [], []
            return
        h, u = hnf_rows(transpose(self.basis))
        top = [row[:k] for row in h[:k]]
        if abs(det(top)) != 1:
            raise ValueError("rows do not span a direct summand")
        self.u = u
        self.h_inv = inverse_unimodular(top)

    def coords(self, w: Sequence[int]) -> list[int]:
        """Coefficients ``a`` of the projected vector in the basis."""
        k = len(self.basis)
        if k == 0:
            return []
        uw = mat_vec(self.u[:k], w)
        return mat_vec(self.h_inv, uw)

    def __call__(self, w: Sequence[int]) -> list[int]:
        a = self.coords(w)
        if not a:
            return [0] * self.dim
        return vec_mat(a, self.basis)

    def complement(self) -> Matrix:
        """Rows spanning the kernel of the projection."""
        k = len(self.basis)
        if k == 0:
            return [[int(i == j) for j in range(self.dim)] for i in range(self.dim)]
        u_inv = inverse_unimodular(self.u)
        # columns k.. of U^{-1} span the kernel
        return [[u_inv[i][j] for i in range(self.dim)] for j in range(k, self.dim)]
