"""Short exact sequences of hermitian bundles on the sphere.

``0 -> O(e) --(s1, s2)--> E1 = O(a) + O(b) --> O(a + b - e) -> 0``

with the sub- and quotient metrics induced from ``E1``.  On each chart the
sequence is described in an adapted holomorphic frame ``(a, b)`` of ``E1``:
``a`` is the image of the frame of ``O(e)`` and ``b`` a Bezout complement
with ``det(a, b) = 1``.  The four scalar fields

    A = |a|^2,  x = <a, b>,  y = |b|^2,  k = det(H) / A

carry everything the transgression needs; ``A`` is the induced metric on
the sub-bundle and ``k`` the quotient metric.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import sympy as sp

from ..poly_ring import BinaryForm
from .bundles import HermBundle, SingularMetric, chern_forms, curvature
from .expr import C, CB, ChartExpr, const, fs_weight
from .fields import jet, values
from .grid import CHARTS, ChartGrid, FormGrid


def _chart_poly(coeffs, chart: str) -> sp.Expr:
    """Coefficient list ``[f_0..f_d]`` of ``sum f_i X0^i X1^(d-i)`` on a chart."""
    d = len(coeffs) - 1
    if chart == "z":
        return sp.Add(*[sp.Rational(f) * C ** i for i, f in enumerate(coeffs)])
    return sp.Add(*[sp.Rational(f) * C ** (d - i) for i, f in enumerate(coeffs)])


def _real_poly(p: sp.Expr) -> ChartExpr:
    # rational coefficients, so conjugation only swaps c and cb
    return ChartExpr(p, p.subs(C, CB))


def bezout_frame(s1: BinaryForm, s2: BinaryForm, chart: str):
    """``(a, b)`` with ``a = (s1, s2)`` on the chart and ``s1*b2 - s2*b1 = 1``."""
    p1, p2 = _chart_poly(s1.coeffs, chart), _chart_poly(s2.coeffs, chart)
    if p1 == 0 or p2 == 0:
        # one entry vanishes identically; the other must be a nonzero constant
        other = p2 if p1 == 0 else p1
        if not other.is_number or other == 0:
            raise SingularMetric(f"injection degenerates on the {chart}-chart")
        p, q = (-1 / other, sp.Integer(0)) if p1 == 0 else (sp.Integer(0), 1 / other)
        return (_real_poly(p1), _real_poly(p2)), (_real_poly(sp.sympify(p)), _real_poly(sp.sympify(q)))
    u, v, g = sp.gcdex(sp.Poly(p1, C, domain="QQ"), sp.Poly(p2, C, domain="QQ"))
    if g.degree() > 0:
        raise SingularMetric(f"s1 and s2 share a zero on the {chart}-chart")
    g0 = g.as_expr()
    q, p = sp.expand(u.as_expr() / g0), sp.expand(-v.as_expr() / g0)
    return (_real_poly(p1), _real_poly(p2)), (_real_poly(p), _real_poly(q))


def _hermitian_pair(H, u, v) -> ChartExpr:
    """``sum conj(u_i) H_ij v_j``."""
    acc = const(0)
    for i in range(2):
        for j in range(2):
            acc = acc + u[i].conj() * H[i][j] * v[j]
    return acc


@dataclass
class ExactSeqData:
    E1: HermBundle
    e: int
    s1: BinaryForm
    s2: BinaryForm
    label: str = ""
    _frames: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.E1.rank != 2:
            raise ValueError("E1 must have rank 2")
        a, b = self.E1.twists
        if self.s1.degree != a - self.e or self.s2.degree != b - self.e:
            raise ValueError(f"section degrees must be ({a - self.e}, {b - self.e}), "
                             f"got ({self.s1.degree}, {self.s2.degree})")
        for c in CHARTS:
            self._frames[c] = bezout_frame(self.s1, self.s2, c)

    @property
    def twists(self) -> tuple[int, int, int]:
        a, b = self.E1.twists
        return self.e, a, a + b - self.e

    def family_fields(self, chart: str) -> dict[str, ChartExpr]:
        H = self.E1.metric[chart]
        a, b = self._frames[chart]
        A = _hermitian_pair(H, a, a)
        det = H[0][0] * H[1][1] - H[0][1] * H[1][0]
        return {"A": A, "x": _hermitian_pair(H, a, b), "y": _hermitian_pair(H, b, b),
                "k": det / A}

    def check_injective(self, grid: ChartGrid, floor: float = 1e-12) -> None:
        for c in CHARTS:
            A = values(self.family_fields(c)["A"], grid.points).real
            if not np.all(A > floor):
                raise SingularMetric(f"injection degenerates on the {c}-chart "
                                     f"(min |alpha|^2 = {A.min():.3g})")

    def bundles(self) -> tuple[HermBundle, HermBundle, HermBundle]:
        h0, h2 = induced_metrics(self)
        return h0, self.E1, h2

    def alternating_c1(self, grid: ChartGrid, mode: str = "fd") -> FormGrid:
        E0, E1, E2 = self.bundles()
        c1 = lambda E: chern_forms(curvature(E, grid, mode))["c1"]
        return c1(E0) - c1(E1) + c1(E2)


@dataclass
class MetricChangeSeq:
    """``0 -> 0 -> (L, h) -> (L, h') -> 0``: the identity map between two metrics."""
    L: HermBundle
    Lp: HermBundle
    label: str = ""

    def __post_init__(self):
        if self.L.rank != 1 or self.Lp.rank != 1 or self.L.twists != self.Lp.twists:
            raise ValueError("metric change needs two metrics on one line bundle")

    def family_fields(self, chart: str) -> dict[str, ChartExpr]:
        # embedded as the second block next to a flat trivial line
        return {"A": const(1), "x": const(0), "y": self.L.metric[chart][0][0],
                "k": self.Lp.metric[chart][0][0]}

    def bundles(self):
        return None, self.L, self.Lp

    def alternating_c1(self, grid: ChartGrid, mode: str = "fd") -> FormGrid:
        c1 = lambda E: chern_forms(curvature(E, grid, mode))["c1"]
        return c1(self.Lp) - c1(self.L)

    def check_injective(self, grid, floor=0.0):
        return None


def induced_metrics(seq: ExactSeqData, grid: ChartGrid | None = None):
    """Sub-bundle metric ``h0 = alpha^* h1 alpha`` and quotient metric ``h2``.

    In the standard frames ``h0 = A`` and ``h2 = det(h1) / A`` (the lift
    ``b`` of the quotient frame has ``det(a, b) = 1``).  Returned as line
    bundles with their potentials ``phi``.
    """
    if grid is not None:
        seq.check_injective(grid)
    e, _, n2 = seq.twists
    phi0, phi2 = {}, {}
    for c in CHARTS:
        f = seq.family_fields(c)
        phi0[c] = -(f["A"] * fs_weight(c) ** e).log()
        phi2[c] = -(f["k"] * fs_weight(c) ** n2).log()
    return (HermBundle.line(e, phi0, "E0"), HermBundle.line(n2, phi2, "E2"))


def _beta_expr(seq: ExactSeqData, chart: str) -> ChartExpr:
    f = seq.family_fields(chart)
    return f["x"] / f["A"]


def second_fundamental_form(seq: ExactSeqData, grid: ChartGrid,
                            mode: str = "fd") -> FormGrid:
    """``beta = dbar`` of the orthogonal splitting, as a ``(0,1)``-form.

    The C-infinity lift of the quotient frame orthogonal to ``a`` is
    ``b - (x/A) a``, so ``beta = -dbar(x/A)`` in the frames of ``O(e)``
    and ``O(a + b - e)``.  Values are the ``dcbar`` coefficients.
    """
    vals = {c: -jet(_beta_expr(seq, c), grid.points, mode, grid.h).fzb for c in CHARTS}
    return FormGrid((0, 1), grid, vals)


def sff_density(seq: ExactSeqData, grid: ChartGrid, mode: str = "fd") -> FormGrid:
    """``|beta|^2`` as a ``(1,1)``-form, the norm taken in ``Hom(E2, E0)``."""
    beta = second_fundamental_form(seq, grid, mode)
    vals = {}
    for c in CHARTS:
        f = seq.family_fields(c)
        ratio = values(f["A"] / f["k"], grid.points).real
        vals[c] = np.abs(beta.values[c]) ** 2 * ratio
    return FormGrid((1, 1), grid, vals)
