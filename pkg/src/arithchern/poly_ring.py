"""Multivariate integer polynomials, resultants, and quotient-ring orders.

Polynomials are immutable maps from exponent tuples to nonzero ints.  The
string form is plain infix with explicit ``*`` and ``^``, e.g.
``3*x^2*y - 2``; :func:`parse_poly` reads it back exactly.
"""
from __future__ import annotations

import ast
import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .exact_algebra import (INFINITE, IntMatrix, bareiss_det, cokernel_order,
                            _column_echelon, restricted_cokernel_order)


class BothConstantInVar(ValueError):
    pass


class NotZeroDimensional(ValueError):
    """The quotient ring is infinite (it survives tensoring with Q)."""


class BoundExceeded(RuntimeError):
    """Macaulay truncation orders did not stabilize before the degree cap."""


@dataclass(frozen=True)
class MultiPoly:
    vars: tuple[str, ...]
    terms: Mapping[tuple[int, ...], int]

    def __post_init__(self):
        clean = {}
        for e, c in dict(self.terms).items():
            e = tuple(int(x) for x in e)
            if len(e) != len(self.vars):
                raise ValueError(f"exponent {e} does not match variables {self.vars}")
            if c:
                clean[e] = int(c)
        object.__setattr__(self, "vars", tuple(self.vars))
        object.__setattr__(self, "terms", clean)

    # constructors
    @classmethod
    def const(cls, c: int, vars: Sequence[str]) -> "MultiPoly":
        return cls(tuple(vars), {(0,) * len(vars): c})

    @classmethod
    def var(cls, name: str, vars: Sequence[str]) -> "MultiPoly":
        vars = tuple(vars)
        e = tuple(int(v == name) for v in vars)
        return cls(vars, {e: 1})

    @classmethod
    def zero(cls, vars: Sequence[str]) -> "MultiPoly":
        return cls(tuple(vars), {})

    # basic queries
    def is_zero(self) -> bool:
        return not self.terms

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def degree_in(self, var: str) -> int:
        i = self.vars.index(var)
        return max((e[i] for e in self.terms), default=0)

    def content(self) -> int:
        from math import gcd
        g = 0
        for c in self.terms.values():
            g = gcd(g, c)
        return g

    def __hash__(self):
        return hash((self.vars, frozenset(self.terms.items())))

    def __eq__(self, other):
        if isinstance(other, int):
            other = MultiPoly.const(other, self.vars)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.vars == other.vars and self.terms == other.terms

    # arithmetic
    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, int):
            return MultiPoly.const(other, self.vars)
        if other.vars != self.vars:
            raise ValueError(f"variable mismatch {self.vars} vs {other.vars}")
        return other

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return MultiPoly(self.vars, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        out: dict[tuple[int, ...], int] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return MultiPoly(self.vars, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        out = MultiPoly.const(1, self.vars)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __call__(self, **values):
        return self.eval(values)

    def eval(self, values: Mapping[str, object]):
        """Substitute every variable; returns a number of whatever type the values have."""
        total = 0
        for e, c in self.terms.items():
            t = c
            for v, k in zip(self.vars, e):
                if k:
                    t = t * values[v] ** k
            total = total + t
        return total

    def subs(self, values: Mapping[str, object]) -> "MultiPoly":
        """Substitute integers or polynomials (in the remaining variables) for some variables."""
        rest = tuple(v for v in self.vars if v not in values)
        out = MultiPoly.zero(rest)
        for e, c in self.terms.items():
            term = MultiPoly(rest, {tuple(k for v, k in zip(self.vars, e) if v not in values): c})
            for v, k in zip(self.vars, e):
                if v in values and k:
                    val = values[v]
                    val = val if isinstance(val, MultiPoly) else MultiPoly.const(val, rest)
                    term = term * val ** k
            out = out + term
        return out

    def with_vars(self, vars: Sequence[str]) -> "MultiPoly":
        """Re-embed into a ring with a superset (or reordering) of the variables."""
        vars = tuple(vars)
        idx = [vars.index(v) for v in self.vars]
        out = {}
        for e, c in self.terms.items():
            ne = [0] * len(vars)
            for i, k in zip(idx, e):
                ne[i] = k
            out[tuple(ne)] = c
        return MultiPoly(vars, out)

    def coeffs_in(self, var: str) -> list["MultiPoly"]:
        """Coefficients ``[c_0, c_1, ...]`` with ``self = sum c_k var^k``."""
        i = self.vars.index(var)
        rest = self.vars[:i] + self.vars[i + 1:]
        buckets: dict[int, dict] = {}
        for e, c in self.terms.items():
            buckets.setdefault(e[i], {})[e[:i] + e[i + 1:]] = c
        d = max(buckets, default=0)
        return [MultiPoly(rest, buckets.get(k, {})) for k in range(d + 1)]

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"MultiPoly({str(self)!r}, vars={self.vars})"


def grlex_key(e: tuple[int, ...]):
    return (sum(e), e)


def format_poly(f: MultiPoly) -> str:
    if f.is_zero():
        return "0"
    parts = []
    for e in sorted(f.terms, key=grlex_key, reverse=True):
        c = f.terms[e]
        mono = "*".join(v if k == 1 else f"{v}^{k}" for v, k in zip(f.vars, e) if k)
        mag = abs(c)
        if mono:
            body = mono if mag == 1 else f"{mag}*{mono}"
        else:
            body = str(mag)
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(("+ " if c > 0 else "- ") + body)
    return " ".join(parts)


def parse_poly(text: str, vars: Sequence[str] | None = None) -> MultiPoly:
    """Parse infix integer polynomial text.

    ``vars`` fixes the variable order; by default the names are collected
    from the text and sorted.
    """
    try:
        tree = ast.parse(text.replace("^", "**").strip(), mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"cannot parse polynomial {text!r}") from exc
    if vars is None:
        vars = sorted({n.id for n in ast.walk(tree) if isinstance(n, ast.Name)})
    vars = tuple(vars)

    def walk(node) -> MultiPoly:
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int) \
                and not isinstance(node.value, bool):
            return MultiPoly.const(node.value, vars)
        if isinstance(node, ast.Name):
            if node.id not in vars:
                raise ValueError(f"unknown variable {node.id!r}")
            return MultiPoly.var(node.id, vars)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = walk(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                if not (isinstance(node.right, ast.Constant) and isinstance(node.right.value, int)):
                    raise ValueError("exponents must be integer literals")
                return walk(node.left) ** node.right.value
            left, right = walk(node.left), walk(node.right)
            if isinstance(node.op, ast.Add):
                return left + right
            if isinstance(node.op, ast.Sub):
                return left - right
            if isinstance(node.op, ast.Mult):
                return left * right
        raise ValueError(f"unsupported syntax in polynomial {text!r}")

    return walk(tree)


# --- resultants ---------------------------------------------------------------

def _det_laplace(mat: list[list]):
    """Determinant over any commutative ring via memoized Laplace expansion.

    Works for MultiPoly or int entries; no division needed.  Cost is
    O(n 2^n) ring products, fine for Sylvester matrices of desk size.
    """
    n = len(mat)
    if n == 0:
        return 1

    @lru_cache(maxsize=None)
    def minor(row: int, cols: frozenset):
        if row == n:
            return 1
        total = 0
        sign = 1
        for j in sorted(cols):
            a = mat[row][j]
            if not (a == 0):
                sub = minor(row + 1, cols - {j})
                if not (sub == 0):
                    total = total + (a * sub if sign > 0 else -(a * sub))
            sign = -sign
        return total

    return minor(0, frozenset(range(n)))


def sylvester_matrix(f_coeffs: Sequence, g_coeffs: Sequence, zero=0) -> list[list]:
    """Sylvester matrix from coefficient lists in *descending* degree order.

    The lists fix the nominal degrees (leading zeros allowed), so forms
    whose top coefficient vanishes are handled like homogeneous forms.
    """
    m, n = len(f_coeffs) - 1, len(g_coeffs) - 1
    size = m + n
    rows = []
    for i in range(n):
        rows.append([zero] * i + list(f_coeffs) + [zero] * (size - m - 1 - i))
    for i in range(m):
        rows.append([zero] * i + list(g_coeffs) + [zero] * (size - n - 1 - i))
    return rows


def resultant_bivariate(f: MultiPoly, g: MultiPoly, var: str) -> MultiPoly:
    """Sylvester resultant eliminating ``var``; a polynomial in the other variables."""
    if f.vars != g.vars:
        raise ValueError("variable mismatch")
    df, dg = f.degree_in(var), g.degree_in(var)
    if df == 0 and dg == 0:
        raise BothConstantInVar(f"neither polynomial involves {var!r}")
    fc = list(reversed(f.coeffs_in(var)))
    gc = list(reversed(g.coeffs_in(var)))
    rest = fc[0].vars
    zero = MultiPoly.zero(rest)
    res = _det_laplace(sylvester_matrix(fc, gc, zero))
    if isinstance(res, int):
        res = MultiPoly.const(res, rest)
    return res


def form_resultant(f: Sequence[int], g: Sequence[int]) -> int:
    """Resultant of binary forms given as coefficient lists.

    ``f = [f_0, ..., f_m]`` means ``sum f_i X0^i X1^(m-i)``; the nominal
    degree is ``len(f) - 1`` even if trailing entries vanish.  Rows of the
    Sylvester matrix are taken in this order, so ``Res(X0, 2*X1) = -2``.
    """
    if len(f) == 1 and len(g) == 1:
        return 1
    return bareiss_det(sylvester_matrix(list(f), list(g)))


# --- Macaulay truncation ------------------------------------------------------

def monomials_below(nvars: int, bound: int) -> list[tuple[int, ...]]:
    """All exponent vectors of total degree < bound, graded-lex ascending."""
    out = []
    for d in range(bound):
        for c in itertools.combinations_with_replacement(range(nvars), d):
            e = [0] * nvars
            for i in c:
                e[i] += 1
            out.append(tuple(e))
    out = sorted(set(out), key=grlex_key)
    return out


@dataclass(frozen=True)
class MacaulayPresentation:
    degree_bound: int
    basis: tuple[tuple[int, ...], ...]
    matrix: IntMatrix


def macaulay_presentation(gens: Sequence[MultiPoly], degree_bound: int) -> MacaulayPresentation:
    """Columns are ``m * g`` for every monomial ``m`` with ``deg(m*g) < D``."""
    if not gens:
        raise ValueError("need at least one generator")
    nv = len(gens[0].vars)
    basis = monomials_below(nv, degree_bound)
    index = {e: i for i, e in enumerate(basis)}
    cols = []
    for g in gens:
        if g.is_zero():
            continue
        dg = g.total_degree()
        for m in basis:
            if sum(m) + dg >= degree_bound:
                continue
            col = [0] * len(basis)
            for e, c in g.terms.items():
                col[index[tuple(a + b for a, b in zip(m, e))]] = c
            cols.append(col)
    rows = [list(r) for r in zip(*cols)] if cols else [[] for _ in basis]
    return MacaulayPresentation(degree_bound, tuple(basis),
                                IntMatrix.from_rows(rows, len(cols)))


def _reduce_in(echelon, vec):
    """Reduce ``vec`` by a column echelon basis; returns the remainder or None if stuck."""
    v = list(vec)
    for r, b in echelon:
        if v[r]:
            q, rem = divmod(v[r], b[r])
            if rem:
                return None
            v = [x - q * y for x, y in zip(v, b)]
    return v


def _certified_order(gens, D0, D):
    """Order of ``Z[x]/(gens)`` via degree ``< D0`` monomials, or None if uncertified.

    Let ``L`` be the span of ``m*g`` with ``deg < D`` and ``Lam`` its part in
    degree ``<= D0``.  If every degree-``D0`` monomial ``m`` has a relation
    ``m - r_m`` in ``Lam`` (``r_m`` of lower degree), ``x_i * M`` lies in
    ``Lam`` for ``M = Lam`` restricted to degree ``< D0``, and the induced
    multiplication operators on ``A = Z^B / M`` commute, then ``A`` is a
    cyclic ``Z[x]``-module killed by the generators and spanned by monomials
    that also span ``Z[x]/(gens)``.  That forces ``#A = #Z[x]/(gens)``.
    """
    nv = len(gens[0].vars)
    pres = macaulay_presentation(gens, D)
    basis = pres.basis
    index = {e: i for i, e in enumerate(basis)}
    deg = [sum(e) for e in basis]
    high = [i for i in range(len(basis)) if deg[i] > D0]
    border = [i for i in range(len(basis)) if deg[i] == D0]
    low = [i for i in range(len(basis)) if deg[i] < D0]
    cols = [list(c) for c in zip(*pres.matrix.to_rows())]
    echelon = _column_echelon(cols, high + border + low)
    lam = [(r, v) for r, v in echelon if deg[r] <= D0]
    # border monomials must be reducible with unit pivots
    red = {}
    for r, v in lam:
        if deg[r] == D0:
            if abs(v[r]) != 1:
                return None
            red[r] = [x * v[r] for x in v]  # normalized so the pivot is +1
    if len(red) != len(border):
        return None
    # make each border relation free of the other border monomials
    for r in border:
        v = red[r]
        for s in border:
            if s != r and v[s]:
                v = [x - v[s] * y for x, y in zip(v, red[s])]
        red[r] = v
    m_basis = [(r, v) for r, v in lam if deg[r] < D0]
    if len(m_basis) != len(low):
        return None

    def times(i, vec):
        out = [0] * len(basis)
        for k, c in enumerate(vec):
            if c:
                e = list(basis[k])
                e[i] += 1
                out[index[tuple(e)]] += c
        return out

    def to_low(vec):
        # replace border monomials by their lower-degree remainders
        out = list(vec)
        for r in border:
            if out[r]:
                c = out[r]
                out = [x - c * y for x, y in zip(out, red[r])]
        return out

    for _, v in m_basis:
        for i in range(nv):
            if _reduce_in(lam, times(i, v)) is None or any(_reduce_in(lam, times(i, v))):
                return None
    top_low = [k for k in low if deg[k] == D0 - 1]
    for k in top_low:
        e = [0] * len(basis)
        e[k] = 1
        for i in range(nv):
            for j in range(i + 1, nv):
                a = to_low(times(j, to_low(times(i, e))))
                b = to_low(times(i, to_low(times(j, e))))
                diff = _reduce_in(m_basis, [x - y for x, y in zip(a, b)])
                if diff is None or any(diff):
                    return None
    order = 1
    for r, v in m_basis:
        order *= abs(v[r])
    return order


def quotient_order(gens: Sequence[MultiPoly], vars: Sequence[str] | None = None,
                   extra_steps: int = 16) -> int:
    """Order of the abelian group ``Z[vars]/(gens)``, certified.

    Searches degree bounds ``D0 < D`` until :func:`_certified_order` can
    prove its answer.  Raises :class:`NotZeroDimensional` when the
    quotient has positive rank at every tried bound and
    :class:`BoundExceeded` if no certificate was found.
    """
    gens = list(gens)
    if vars is not None:
        gens = [g.with_vars(vars) if g.vars != tuple(vars) else g for g in gens]
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        raise NotZeroDimensional("zero ideal")
    if any(g.total_degree() == 0 and abs(next(iter(g.terms.values()))) == 1 for g in gens):
        return 1
    common = math.gcd(*(g.content() for g in gens))
    if common > 1:
        # every generator vanishes on the whole fiber over a prime of `common`
        raise NotZeroDimensional(f"all generators are divisible by {common}")
    top = max(g.total_degree() for g in gens)
    d0 = top + 1
    saw_finite = False
    for D in range(d0 + 1, d0 + extra_steps + 1):
        for D0 in range(d0, D):
            order = _certified_order(gens, D0, D)
            if order is not None:
                return order
        pres = macaulay_presentation(gens, D)
        keep = [i for i, e in enumerate(pres.basis) if sum(e) < d0]
        if restricted_cokernel_order(pres.matrix, keep) is not INFINITE:
            saw_finite = True
    if not saw_finite:
        raise NotZeroDimensional(
            f"quotient has positive rank up to degree {d0 + extra_steps}")
    raise BoundExceeded(f"no certificate found by degree {d0 + extra_steps}")


# --- binary forms on the projective line ---------------------------------------

@dataclass(frozen=True)
class BinaryForm:
    """Homogeneous integer form ``sum coeffs[i] * X0^i * X1^(d-i)``.

    The degree is nominal: the zero form of degree 3 is a valid object.
    """
    coeffs: tuple[int, ...]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def parse(cls, text: str, degree: int | None = None) -> "BinaryForm":
        p = parse_poly(text, ("X0", "X1"))
        degs = {sum(e) for e in p.terms}
        if len(degs) > 1:
            raise ValueError(f"{text!r} is not homogeneous")
        d = degs.pop() if degs else (degree if degree is not None else 0)
        if degree is not None and d != degree:
            raise ValueError(f"{text!r} has degree {d}, expected {degree}")
        coeffs = [0] * (d + 1)
        for (i, _), c in p.terms.items():
            coeffs[i] = c
        return cls(tuple(coeffs))

    def to_poly(self) -> MultiPoly:
        d = self.degree
        return MultiPoly(("X0", "X1"), {(i, d - i): c for i, c in enumerate(self.coeffs)})

    def __str__(self):
        return format_poly(self.to_poly())

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __mul__(self, other: "BinaryForm") -> "BinaryForm":
        out = [0] * (self.degree + other.degree + 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return BinaryForm(tuple(out))

    def dehomogenize(self, chart: str, var: str | None = None) -> MultiPoly:
        """``chart='z'`` sets X1 = 1 (coordinate X0/X1); ``'w'`` sets X0 = 1."""
        if chart == "z":
            var = var or "u"
            return MultiPoly((var,), {(i,): c for i, c in enumerate(self.coeffs)})
        if chart == "w":
            var = var or "v"
            d = self.degree
            return MultiPoly((var,), {(d - i,): c for i, c in enumerate(self.coeffs)})
        raise ValueError(f"unknown chart {chart!r}")

    def chart_coeffs(self, chart: str) -> list[int]:
        """Ascending coefficients of the dehomogenized polynomial (length d+1)."""
        return list(self.coeffs) if chart == "z" else list(reversed(self.coeffs))


def resultant_forms(f: BinaryForm, g: BinaryForm) -> int:
    return form_resultant(f.coeffs, g.coeffs)
