"""Invariant suites run by ``arithchern selftest``.

Each suite returns :class:`SuiteResult` entries; a failure is data in the
report, never an exception.  ``dc_scale`` and ``grid`` exist so negative
controls can be run from the command line.
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass

import numpy as np
import sympy as sp

from .arithmetic import HermLineBundleArith, RationalSection, arith_c1c1
from .exact_algebra import IntMatrix, cokernel_order, snf
from .finite_scheme import (Chart, FiniteSchemeData, ZeroCycleOnS, degree_log, gamma_order,
                            koszul, localized_chern_pushforward, projective_line_scheme)
from .hermitian import (ChartGrid, HermBundle, bott_chern, chern_forms, conventions,
                        curvature, ddc_residual, family_spread, integrate)
from .hermitian.fields import jet
from .hermitian.expr import parse_expr
from .hermitian.grid import CHARTS, FormGrid
from .hermitian.sequences import MetricChangeSeq
from .poly_ring import BinaryForm, MultiPoly, parse_poly, resultant_forms
from .verify import ddc_bound, fixture_path, load_instance, verify


@dataclass
class SuiteResult:
    suite: str
    check: str
    passed: bool
    value: object
    tolerance: object = None

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        tol = f" (tol {self.tolerance})" if self.tolerance is not None else ""
        return f"[{tag}] {self.suite}: {self.check} = {self.value}{tol}"


def _within(suite, check, value, tol) -> SuiteResult:
    return SuiteResult(suite, check, bool(abs(value) <= tol), f"{value:.3e}", tol)


def _exact(suite, check, got, want) -> SuiteResult:
    show = lambda v: v.dumps() if isinstance(v, ZeroCycleOnS) else v
    return SuiteResult(suite, check, got == want, show(got), show(want))


# --- random generators shared with the tests ------------------------------------

def random_form_pair(rng: random.Random, max_deg: int = 3, bound: int = 9):
    """Integer forms with nonzero resultant and coprime joint content."""
    while True:
        d1, d2 = rng.randint(0, max_deg), rng.randint(0, max_deg)
        if d1 + d2 == 0:
            continue
        f = BinaryForm(tuple(rng.randint(-bound, bound) for _ in range(d1 + 1)))
        g = BinaryForm(tuple(rng.randint(-bound, bound) for _ in range(d2 + 1)))
        if math.gcd(math.gcd(*f.coeffs), math.gcd(*g.coeffs)) != 1:
            continue
        if resultant_forms(f, g) != 0:
            return f, g


def random_koszul_sequence(rng: random.Random) -> list[MultiPoly]:
    """A regular sequence with finite quotient, in one or two variables."""
    if rng.random() < 0.5:
        x = ("x",)
        X = MultiPoly.var("x", x)
        d = rng.randint(1, 3)
        f = X ** d
        for i in range(d):
            f = f + rng.randint(-5, 5) * X ** i
        return [f, MultiPoly.const(rng.randint(2, 12), x)]
    xy = ("x", "y")
    X, Y = MultiPoly.var("x", xy), MultiPoly.var("y", xy)
    f = X ** rng.randint(1, 2) + rng.randint(-4, 4)
    g = Y ** rng.randint(1, 2) + rng.randint(-4, 4) * X
    return [f, g, MultiPoly.const(rng.randint(2, 9), xy)]


# --- suites -----------------------------------------------------------------------

def suite_exact_algebra(**_) -> list[SuiteResult]:
    out = []
    m = IntMatrix.from_rows([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
    out.append(_exact("exact_algebra", "snf invariants", list(snf(m).diag), [2, 6, 12]))
    out.append(_exact("exact_algebra", "cokernel order", cokernel_order(m), 144))
    rng = random.Random(1)
    ok = True
    for _ in range(20):
        rows = [[rng.randint(-9, 9) for _ in range(4)] for _ in range(4)]
        ok &= math.prod(snf(IntMatrix.from_rows(rows)).diag) == abs(int(sp.Matrix(rows).det()))
    out.append(SuiteResult("exact_algebra", "snf product = |det| on 20 random 4x4", ok, ok, True))
    return out


def suite_resultant_order(n: int = 50, seed: int = 7, **_) -> list[SuiteResult]:
    rng = random.Random(seed)
    bad = []
    for _ in range(n):
        f, g = random_form_pair(rng)
        gam = gamma_order(projective_line_scheme(f, g))
        if gam != abs(resultant_forms(f, g)):
            bad.append((str(f), str(g), gam))
    return [SuiteResult("resultant_order", f"gamma_order = |Res| on {n} random pairs",
                        not bad, f"{n - len(bad)}/{n}", f"{n}/{n}")]


def suite_koszul(**_) -> list[SuiteResult]:
    x = ("x",)
    out = []
    k = koszul([MultiPoly.const(5, x), MultiPoly.var("x", x)])
    out.append(_exact("koszul", "Koszul(5, x) cycle", localized_chern_pushforward(k),
                      ZeroCycleOnS({5: 1})))
    out.append(_exact("koszul", "d o d = 0", k.composition_is_zero(), True))
    k = koszul([parse_poly("x^2+1", x), MultiPoly.const(5, x)])
    out.append(_exact("koszul", "Koszul(x^2+1, 5) cycle", localized_chern_pushforward(k),
                      ZeroCycleOnS({5: 2})))
    gam = gamma_order(FiniteSchemeData((Chart(x, k.sequence),)))
    # brute force: residues a + b i mod 5 are all distinct classes of F_5[x]/(x^2+1)
    brute = len({(a % 5, b % 5) for a, b in itertools.product(range(10), repeat=2)})
    out.append(_exact("koszul", "gamma_order(Z[x]/(x^2+1, 5))", gam, brute))
    rng = random.Random(11)
    worst, exact_ok = 0.0, True
    for _ in range(20):
        seq = random_koszul_sequence(rng)
        kz = koszul(seq)
        cyc = localized_chern_pushforward(kz)
        gam = gamma_order(FiniteSchemeData((Chart(seq[0].vars, tuple(seq)),)))
        exact_ok &= cyc == ZeroCycleOnS.from_order(gam)
        worst = max(worst, abs(degree_log(cyc) - math.log(gam)))
    out.append(_within("koszul", "max |deg log - log gamma| on 20 random", worst, 1e-12))
    out.append(_exact("koszul", "integer cycles agree on 20 random", exact_ok, True))
    return out


def suite_normalization(N: int = 256, **_) -> list[SuiteResult]:
    grid = ChartGrid.build(N)
    c1 = chern_forms(curvature(HermBundle.line(1), grid, "analytic"))["c1"]
    out = [_within("normalization", "int c1(O(1), FS) - 1", integrate(c1) - 1.0, 1e-6)]
    f = "abs2(X0)/(abs2(X0)+abs2(X1))"
    vals = {}
    for c in CHARTS:
        lap = jet(parse_expr(f, c), grid.points, "analytic").fzzb.real
        vals[c] = conventions.ddc_factor() * lap
    out.append(_within("normalization", "int dd^c f (Stokes)",
                       integrate(FormGrid((1, 1), grid, vals)), 1e-6))
    # O(1) FS paired with itself: the arithmetic self-intersection is 1/2
    L = HermBundle.line(1)
    v = arith_c1c1(HermLineBundleArith(L, RationalSection.monomial(0, 1)),
                   HermLineBundleArith(L, RationalSection.monomial(1, 1)), grid, "analytic").total
    out.append(_within("normalization", "(O(1), FS)^2 - 1/2", v - 0.5, 1e-6))
    return out


def suite_ddc(N: int = 256, **_) -> list[SuiteResult]:
    spec = load_instance(fixture_path("p1z-x0-2x1.json"))
    grid = ChartGrid.build(N)
    res = ddc_residual(spec.sequence(), grid).sup()
    out = [_within("ddc", f"sup dd^c ch~ - alternating ch at N={N}", res, ddc_bound(N))]
    L = HermBundle.line(1)
    Lp = HermBundle.line(1, "abs2(X0)/(abs2(X0)+abs2(X1))")
    res = ddc_residual(MetricChangeSeq(L, Lp), grid).sup()
    out.append(_within("ddc", f"metric change sup residual at N={N}", res,
                       max(2.0 * 1.5 / N ** 2, 1e-9)))
    return out


def suite_bott_chern(N: int = 256, **_) -> list[SuiteResult]:
    grid = ChartGrid.build(N)
    out = []
    split = load_instance(fixture_path("split-o0-o1.json")).sequence()
    r = bott_chern(split, grid)
    sup = max(r.components[k].sup() for k in (0, 1, 2))
    out.append(_within("bott_chern", "split: sup of all components", sup, 1e-6))
    out.append(_within("bott_chern", "split: int c2~", r.integral_c2_tilde, 1e-6))
    L = HermBundle.line(1)
    Lp = HermBundle.line(1, "abs2(X0)/(abs2(X0)+abs2(X1))")
    r = bott_chern(MetricChangeSeq(L, Lp), grid, mode="analytic")
    err = 0.0
    for c in CHARTS:
        # h / h' = exp(phi') with phi' the potential of the second metric
        want = np.real(np.abs(grid.points) ** 2 / (1 + np.abs(grid.points) ** 2)) \
            if c == "z" else 1 / (1 + np.abs(grid.points) ** 2)
        err = max(err, float(np.max(np.abs(r.components[1].values[c] - want))))
    out.append(_within("bott_chern", "metric change: ch~_1 - log(h/h')", err, 1e-6))
    shipped = load_instance(fixture_path("p1z-x0-2x1.json")).sequence()
    spread = family_spread(shipped, grid)["spread"]
    out.append(_within("bott_chern", "family spread of int c2~", spread, 2e-3))
    return out


def suite_vanishing(N: int = 256, **_) -> list[SuiteResult]:
    grid = ChartGrid.build(N)
    out = []
    for name in ("p1z-x0-2x1.json", "split-o0-o1.json", "nonflat-o1-o2.json"):
        seq = load_instance(fixture_path(name)).sequence()
        r = bott_chern(seq, grid, mode="analytic")
        out.append(_within("vanishing", f"{name}: sup ch~_0", r.components[0].sup(), 1e-6))
        # ch~_1 is constant in the base; it vanishes when the induced metrics are used
        out.append(_within("vanishing", f"{name}: sup ch~_1", r.components[1].sup(), 1e-6))
        alt = seq.alternating_c1(grid, "analytic")
        out.append(_within("vanishing", f"{name}: Whitney c1 defect", alt.sup(), 1e-6))
    return out


def suite_pairing(N: int = 256, **_) -> list[SuiteResult]:
    grid = ChartGrid.build(N)
    phi = "re(X0*conj(X1))/(abs2(X0)+abs2(X1))"
    L = HermBundle.line(1, phi)
    M = HermBundle.line(2)
    a = arith_c1c1(HermLineBundleArith(L, RationalSection.parse("X0")),
                   HermLineBundleArith(M, RationalSection.parse("X1^2")), grid, "analytic")
    b = arith_c1c1(HermLineBundleArith(M, RationalSection.parse("X1^2")),
                   HermLineBundleArith(L, RationalSection.parse("X0")), grid, "analytic")
    c = arith_c1c1(HermLineBundleArith(L, RationalSection.parse("X0+X1")),
                   HermLineBundleArith(M, RationalSection.parse("X0^2-X0*X1+3*X1^2")),
                   grid, "analytic")
    out = [_within("pairing", "symmetry", a.total - b.total, 1e-6),
           _within("pairing", "section independence", a.total - c.total, 1e-6)]
    d = arith_c1c1(HermLineBundleArith(L, RationalSection.parse("X0-2*X1")),
                   HermLineBundleArith(L, RationalSection.parse("X0+2*X1")), grid, "analytic")
    out.append(_exact("pairing", "finite part of (X0-2X1).(X0+2X1)", d.finite_part,
                      ZeroCycleOnS({2: 2})))
    return out


def suite_identity(N: int = 256, **_) -> list[SuiteResult]:
    out = []
    for name, tol in (("p1z-x0-2x1.json", 5e-3), ("split-o0-o1.json", 1e-6)):
        rep = verify(load_instance(fixture_path(name)), N, error_estimate=False,
                     diagnostics=False)
        res = rep.residual if rep.residual is not None else math.inf
        out.append(_within("identity", f"{name}: residual", res, tol))
    return out


SUITES = {
    "exact_algebra": suite_exact_algebra,
    "resultant_order": suite_resultant_order,
    "koszul": suite_koszul,
    "normalization": suite_normalization,
    "ddc": suite_ddc,
    "bott_chern": suite_bott_chern,
    "vanishing": suite_vanishing,
    "pairing": suite_pairing,
    "identity": suite_identity,
}


def selftest(filter: str | None = None, N: int = 256, dc_scale: float = 1.0) -> list[SuiteResult]:
    """Run every suite whose name contains ``filter``.

    ``dc_scale`` multiplies the d^c convention for the duration of the run
    (negative control: 2 must break the normalization suite).
    """
    names = [n for n in SUITES if filter is None or filter in n]
    if not names:
        raise KeyError(f"no suite matches {filter!r}; have {', '.join(SUITES)}")
    old = conventions.DC_SCALE
    conventions.DC_SCALE = dc_scale
    out = []
    try:
        for n in names:
            try:
                out += SUITES[n](N=N)
            except Exception as exc:
                out.append(SuiteResult(n, "suite raised", False, f"{type(exc).__name__}: {exc}"))
    finally:
        conventions.DC_SCALE = old
    return out
