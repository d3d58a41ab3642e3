"""Exact integer linear algebra: Smith normal form, cokernel orders, factorization.

Everything here works on Python ints, so nothing overflows and nothing is
ever rounded.  Matrices are small (a few hundred rows at most).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

INFINITE = math.inf


class FactorizationBoundExceeded(ValueError):
    """Trial division could not certify the remaining cofactor."""


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("negative shape")
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(
                f"expected {self.rows * self.cols} entries, got {len(self.entries)}")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> "IntMatrix":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        if any(len(r) != cols for r in rows):
            raise ValueError("ragged rows")
        return cls(len(rows), cols, tuple(int(x) for r in rows for x in r))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(int(i == j) for i in range(n) for j in range(n)))

    @classmethod
    def diagonal(cls, diag: Sequence[int], rows: int | None = None,
                 cols: int | None = None) -> "IntMatrix":
        rows = len(diag) if rows is None else rows
        cols = len(diag) if cols is None else cols
        out = [[0] * cols for _ in range(rows)]
        for i, d in enumerate(diag):
            out[i][i] = d
        return cls.from_rows(out, cols)

    def to_rows(self) -> list[list[int]]:
        c = self.cols
        return [list(self.entries[i * c:(i + 1) * c]) for i in range(self.rows)]

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        a, b = self.to_rows(), other.to_rows()
        bt = list(zip(*b)) if b else [()] * other.cols
        out = [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]
        return IntMatrix.from_rows(out, other.cols)

    def transpose(self) -> "IntMatrix":
        return IntMatrix.from_rows(list(map(list, zip(*self.to_rows()))), self.rows) \
            if self.rows else IntMatrix(self.cols, 0, ())

    def det(self) -> int:
        if self.rows != self.cols:
            raise ValueError("det of a non-square matrix")
        return bareiss_det(self.to_rows())


@dataclass(frozen=True)
class SnfResult:
    """``left @ M @ right == diag`` padded to the shape of ``M``."""
    diag: tuple[int, ...]
    left: IntMatrix
    right: IntMatrix
    rank: int


def bareiss_det(rows: list[list[int]]) -> int:
    """Fraction-free Gaussian elimination determinant."""
    a = [list(r) for r in rows]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1]


def _min_nonzero(a, t, rows, cols):
    best = None
    for i in range(t, rows):
        row = a[i]
        for j in range(t, cols):
            v = row[j]
            if v and (best is None or abs(v) < best[0]):
                best = (abs(v), i, j)
                if best[0] == 1:
                    return best
    return best


def snf(m: IntMatrix, transforms: bool = True) -> SnfResult:
    """Smith normal form with unimodular transforms.

    Pivot on the smallest nonzero entry of the active block; this keeps the
    intermediate coefficients small for the matrices we feed it.  With
    ``transforms=False`` the left/right matrices are returned as identities
    (cheaper when only the invariant factors are needed).
    """
    rows, cols = m.rows, m.cols
    a = m.to_rows()
    u = [[int(i == j) for j in range(rows)] for i in range(rows)] if transforms else None
    v = [[int(i == j) for j in range(cols)] for i in range(cols)] if transforms else None

    def swap_rows(i, k):
        a[i], a[k] = a[k], a[i]
        if transforms:
            u[i], u[k] = u[k], u[i]

    def swap_cols(j, k):
        for row in a:
            row[j], row[k] = row[k], row[j]
        if transforms:
            for row in v:
                row[j], row[k] = row[k], row[j]

    def add_row(dst, src, q):  # row_dst -= q * row_src
        rd, rs = a[dst], a[src]
        for j in range(cols):
            if rs[j]:
                rd[j] -= q * rs[j]
        if transforms:
            ud, us = u[dst], u[src]
            for j in range(rows):
                if us[j]:
                    ud[j] -= q * us[j]

    def add_col(dst, src, q):  # col_dst -= q * col_src
        for row in a:
            if row[src]:
                row[dst] -= q * row[src]
        if transforms:
            for row in v:
                if row[src]:
                    row[dst] -= q * row[src]

    t = 0
    while t < min(rows, cols):
        best = _min_nonzero(a, t, rows, cols)
        if best is None:
            break
        _, i, j = best
        if i != t:
            swap_rows(t, i)
        if j != t:
            swap_cols(t, j)
        while True:
            p = a[t][t]
            dirty = False
            for i in range(t + 1, rows):
                if a[i][t]:
                    add_row(i, t, _round_div(a[i][t], p))
                    dirty = dirty or a[i][t] != 0
            for j in range(t + 1, cols):
                if a[t][j]:
                    add_col(j, t, _round_div(a[t][j], p))
                    dirty = dirty or a[t][j] != 0
            if dirty:
                # a smaller remainder appeared in the pivot row/column
                cand = [(abs(a[i][t]), i, t) for i in range(t + 1, rows) if a[i][t]]
                cand += [(abs(a[t][j]), t, j) for j in range(t + 1, cols) if a[t][j]]
                _, i, j = min(cand)
                if i != t:
                    swap_rows(t, i)
                if j != t:
                    swap_cols(t, j)
                continue
            bad = None
            for i in range(t + 1, rows):
                for j in range(t + 1, cols):
                    if a[i][j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(t, bad, -1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            if transforms:
                u[t] = [-x for x in u[t]]
        t += 1

    k = min(rows, cols)
    diag = tuple(a[i][i] for i in range(k))
    rank = sum(1 for d in diag if d)
    left = IntMatrix.from_rows(u, rows) if transforms else IntMatrix.identity(rows)
    right = IntMatrix.from_rows(v, cols) if transforms else IntMatrix.identity(cols)
    return SnfResult(diag=diag, left=left, right=right, rank=rank)


def _round_div(a: int, b: int) -> int:
    """Nearest-integer quotient, so remainders satisfy ``|r| <= |b|/2``."""
    if b < 0:
        a, b = -a, -b
    return (2 * a + b) // (2 * b)


def cokernel_order(m: IntMatrix) -> int | float:
    """Order of ``Z^rows / M Z^cols``; ``INFINITE`` if it has free part."""
    if m.rows == 0:
        return 1
    res = snf(m, transforms=False)
    if res.rank < m.rows:
        return INFINITE
    order = 1
    for d in res.diag:
        order *= d
    return order


def factorize(n: int, bound: int = 10**6) -> dict[int, int]:
    """Trial division up to ``bound``.

    Raises :class:`FactorizationBoundExceeded` when the leftover cofactor is
    larger than ``bound**2`` and so cannot be certified prime.
    """
    if n < 1:
        raise ValueError("factorize expects a positive integer")
    factors: dict[int, int] = {}
    for p in (2, 3):
        while n % p == 0:
            factors[p] = factors.get(p, 0) + 1
            n //= p
    d = 5
    while d * d <= n:
        if d > bound:
            raise FactorizationBoundExceeded(
                f"cofactor {n} has no factor <= {bound} and exceeds {bound}^2")
        for q in (d, d + 2):
            while n % q == 0:
                factors[q] = factors.get(q, 0) + 1
                n //= q
        d += 6
    if n > 1:
        factors[n] = factors.get(n, 0) + 1
    return factors


def p_length(order: int, p: int) -> int:
    """Length at ``p`` of a finite abelian group of the given order: ``v_p(order)``."""
    if order < 1:
        raise ValueError("order must be a positive integer")
    k = 0
    while order % p == 0:
        order //= p
        k += 1
    return k


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return factorize(n) == {n: 1}


def gcd_all(values: Iterable[int]) -> int:
    g = 0
    for x in values:
        g = math.gcd(g, x)
    return g


def _column_echelon(cols: list[list[int]], row_order: Sequence[int]) -> list[tuple[int, list[int]]]:
    """Integer column echelon form of the lattice spanned by ``cols``.

    Rows are eliminated in ``row_order``; returns ``(pivot_row, vector)``
    pairs, one per pivot, with every later vector zero on earlier pivot rows.
    """
    live = [list(c) for c in cols if any(c)]
    out = []
    for r in row_order:
        nz = [c for c in live if c[r]]
        if not nz:
            continue
        rest = [c for c in live if not c[r]]
        piv = nz[0]
        for c in nz[1:]:
            # fold c into piv with an extended-gcd unimodular step
            a, b = piv[r], c[r]
            g, x, y = _ext_gcd(a, b)
            ua, ub = a // g, b // g
            new_piv = [x * p + y * q for p, q in zip(piv, c)]
            new_c = [ub * p - ua * q for p, q in zip(piv, c)]
            piv = new_piv
            if any(new_c):
                rest.append(new_c)
        out.append((r, piv))
        live = rest
    return out


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q = a // b
        a, b = b, a - q * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def restricted_cokernel_order(m: IntMatrix, keep: Sequence[int]) -> int | float:
    """Order of ``Z^keep / (M Z^cols  intersected with  Z^keep)``.

    ``Z^keep`` is the coordinate sublattice on the rows in ``keep``.  The
    rows outside it are eliminated first, so the echelon vectors pivoting on
    kept rows span exactly the intersection.
    """
    keep = list(keep)
    kept = set(keep)
    drop = [i for i in range(m.rows) if i not in kept]
    cols = [list(c) for c in zip(*m.to_rows())] if m.rows and m.cols else []
    echelon = _column_echelon(cols, drop + keep)
    pivots = [abs(v[r]) for r, v in echelon if r in kept]
    if len(pivots) < len(keep):
        return INFINITE
    order = 1
    for p in pivots:
        order *= p
    return order
