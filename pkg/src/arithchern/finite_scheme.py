"""Koszul complexes and the zero-cycles of finite subschemes of arithmetic curves.

The finite-fiber term of the Chern character identity is the order of the
ring of functions on a zero-dimensional subscheme.  Here that order is
computed chart by chart from Macaulay presentations, and pushed to
``Spec Z`` as the cycle ``p -> v_p(order)``.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .exact_algebra import factorize, p_length
from .poly_ring import (BinaryForm, MultiPoly, NotZeroDimensional, quotient_order,
                        resultant_forms)


class OverlapAmbiguous(ValueError):
    """Several charts were given without saying which part of the support each owns."""


# --- Koszul complexes ---------------------------------------------------------

@dataclass(frozen=True)
class KoszulComplex:
    vars: tuple[str, ...]
    sequence: tuple[MultiPoly, ...]
    # differentials[k-1] is d_k : K_k -> K_{k-1}, shape C(n, k-1) x C(n, k)
    differentials: tuple[tuple[tuple[MultiPoly, ...], ...], ...]

    @property
    def length(self) -> int:
        return len(self.sequence)

    def ranks(self) -> list[int]:
        n = self.length
        return [math.comb(n, k) for k in range(n + 1)]

    def composition_is_zero(self) -> bool:
        zero = MultiPoly.zero(self.vars)
        for k in range(1, len(self.differentials)):
            lo, hi = self.differentials[k - 1], self.differentials[k]
            for i in range(len(lo)):
                for j in range(len(hi[0])):
                    acc = zero
                    for m in range(len(hi)):
                        acc = acc + lo[i][m] * hi[m][j]
                    if not acc.is_zero():
                        return False
        return True


def koszul(xs: Sequence[MultiPoly]) -> KoszulComplex:
    """Koszul complex of ``x_1..x_n`` over the polynomial ring they live in.

    Basis of ``K_k`` is the k-subsets in lexicographic order, and
    ``d(e_I) = sum_j (-1)^j x_{i_j} e_{I - i_j}``.
    """
    xs = tuple(xs)
    n = len(xs)
    if not 1 <= n <= 4:
        raise ValueError("Koszul complexes are supported for 1 <= n <= 4")
    vars = xs[0].vars
    if any(x.vars != vars for x in xs):
        raise ValueError("sequence elements live in different rings")
    zero = MultiPoly.zero(vars)
    subsets = [list(itertools.combinations(range(n), k)) for k in range(n + 1)]
    diffs = []
    for k in range(1, n + 1):
        src, dst = subsets[k], subsets[k - 1]
        index = {s: i for i, s in enumerate(dst)}
        mat = [[zero] * len(src) for _ in dst]
        for col, s in enumerate(src):
            for j, i in enumerate(s):
                face = s[:j] + s[j + 1:]
                mat[index[face]][col] = xs[i] if j % 2 == 0 else -xs[i]
        diffs.append(tuple(tuple(r) for r in mat))
    return KoszulComplex(vars, xs, tuple(diffs))


# --- zero-cycles on Spec Z ----------------------------------------------------

@dataclass(frozen=True)
class ZeroCycleOnS:
    """Rational multiplicities at primes: ``{p: l_p}``."""
    multiplicities: Mapping[int, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean = {int(p): Fraction(m) for p, m in dict(self.multiplicities).items() if m}
        object.__setattr__(self, "multiplicities", dict(sorted(clean.items())))

    @classmethod
    def from_order(cls, order: int) -> "ZeroCycleOnS":
        return cls({p: e for p, e in factorize(order).items()})

    def __add__(self, other: "ZeroCycleOnS") -> "ZeroCycleOnS":
        out = dict(self.multiplicities)
        for p, m in other.multiplicities.items():
            out[p] = out.get(p, 0) + m
        return ZeroCycleOnS(out)

    def __neg__(self):
        return ZeroCycleOnS({p: -m for p, m in self.multiplicities.items()})

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        return isinstance(other, ZeroCycleOnS) and self.multiplicities == other.multiplicities

    def __hash__(self):
        return hash(tuple(self.multiplicities.items()))

    def to_json(self) -> dict:
        out = {}
        for p, m in self.multiplicities.items():
            out[str(p)] = m.numerator if m.denominator == 1 else f"{m.numerator}/{m.denominator}"
        return out

    @classmethod
    def from_json(cls, data: Mapping[str, object]) -> "ZeroCycleOnS":
        return cls({int(p): Fraction(str(m)) for p, m in data.items()})

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def degree_log(z: ZeroCycleOnS) -> float:
    """``sum l_p log p`` -- the arithmetic degree of a finite cycle."""
    return math.fsum(float(m) * math.log(p) for p, m in z.multiplicities.items())


def localized_chern_pushforward(k: KoszulComplex) -> ZeroCycleOnS:
    """Push-forward of the localized Chern character of a Koszul resolution.

    For a regular sequence the complex resolves ``H_0 = A/(x_1..x_n)``, and
    its localized Chern character is the cycle of local lengths of ``H_0``;
    over ``Spec Z`` that is ``p -> v_p(#H_0)``.  Regularity itself is not
    checked, only that ``H_0`` is finite.
    """
    order = quotient_order(list(k.sequence), k.vars)
    return ZeroCycleOnS({p: p_length(order, p) for p in factorize(order)})


# --- finite subschemes given on affine charts ---------------------------------

@dataclass(frozen=True)
class Chart:
    vars: tuple[str, ...]
    gens: tuple[MultiPoly, ...]
    # only the part of the support where this element is not a unit is
    # counted; None means the whole chart
    support_at: MultiPoly | None = None


@dataclass(frozen=True)
class FiniteSchemeData:
    charts: tuple[Chart, ...]
    # optional cross-check: forms whose resultant should equal the total order
    forms: tuple[BinaryForm, BinaryForm] | None = None


def _localized_order(chart: Chart, max_power: int = 64) -> int:
    """Order of the factor of ``Z[vars]/(gens)`` supported where ``support_at`` vanishes.

    In a finite ring ``R`` the chain ``R/(h^M)`` stabilizes exactly when
    ``h^M R = h^(M+1) R``, and the limit is the ``h``-primary factor.
    """
    if chart.support_at is None:
        return quotient_order(list(chart.gens), chart.vars)
    prev = None
    for m in range(1, max_power + 1):
        order = quotient_order(list(chart.gens) + [chart.support_at ** m], chart.vars)
        if order == prev:
            return order
        prev = order
    raise NotZeroDimensional("localization did not stabilize")


def gamma_order(phi: FiniteSchemeData) -> int:
    """``#Gamma(phi, O_phi)``: product of the per-chart orders.

    Every chart after the first must say (via ``support_at``) which part of
    the support it owns, otherwise points on the overlap would be counted
    twice and :class:`OverlapAmbiguous` is raised.
    """
    charts = phi.charts
    if len(charts) > 1 and any(c.support_at is None for c in charts[1:]):
        raise OverlapAmbiguous("charts after the first need a support_at witness")
    total = 1
    for c in charts:
        total *= _localized_order(c)
    return total


def projective_line_scheme(s1: BinaryForm, s2: BinaryForm) -> FiniteSchemeData:
    """The subscheme ``V(s1, s2)`` of the projective line over Z on the two standard charts.

    Chart ``u = X0/X1`` takes everything with ``X1`` invertible; chart
    ``v = X1/X0`` keeps only the part lying over ``v = 0``.  Forms whose
    contents share a prime ``p`` vanish on the whole fiber over ``p``, so
    that case raises :class:`NotZeroDimensional`.
    """
    g = math.gcd(math.gcd(*s1.coeffs), math.gcd(*s2.coeffs))
    if g != 1:
        raise NotZeroDimensional(f"both forms vanish on the fiber over each prime of {g}")
    u = Chart(("u",), (s1.dehomogenize("z", "u"), s2.dehomogenize("z", "u")))
    v = Chart(("v",), (s1.dehomogenize("w", "v"), s2.dehomogenize("w", "v")),
              support_at=MultiPoly.var("v", ("v",)))
    return FiniteSchemeData((u, v), forms=(s1, s2))


def resultant_cross_check(phi: FiniteSchemeData) -> int | None:
    if phi.forms is None:
        return None
    return abs(resultant_forms(*phi.forms))
