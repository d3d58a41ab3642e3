"""Arithmetic intersection numbers of hermitian line bundles on P^1 over Z.

For ``L0, L2`` with rational sections ``s0, s2`` whose divisors meet
properly,

    (L0 . L2) = sum_p v_p * log p
              + 1/2 [ g0(div s2) + int g2 c1(L0) ],    g = -log ||s||^2.

The finite part is the signed sum of ``log|Res|`` over the numerator and
denominator forms.  The logarithmic singularities of ``g2`` are removed
analytically: ``g2`` is a sum of Fubini-Study Green functions ``G(., p)``
plus a smooth potential, and ``int G(., p) c1(L0) = n0 + int phi0 w - phi0(p)``
follows from ``dd^c G(., p) = w - delta_p`` with ``w`` the Fubini-Study form.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .finite_scheme import ZeroCycleOnS, degree_log
from .hermitian import conventions
from .hermitian.bundles import HermBundle, SingularMetric
from .hermitian.fields import jet, values
from .hermitian.grid import CHARTS, ChartGrid
from .poly_ring import BinaryForm, resultant_forms


class ImproperIntersection(ValueError):
    """The two divisors share a point of the generic fiber."""


class NotSplit(ValueError):
    """The rank-2 metric is not an orthogonal sum in the given frame."""


ONE = BinaryForm((1,))
# generic point for normalizing leading constants; no integer form vanishes there
_PROBE = (0.3719 + 0.6143j, 1.0)


@dataclass(frozen=True)
class RationalSection:
    num: BinaryForm
    den: BinaryForm = ONE

    @property
    def degree(self) -> int:
        return self.num.degree - self.den.degree

    @classmethod
    def parse(cls, text: str) -> "RationalSection":
        if "/" in text:
            a, b = text.split("/", 1)
            return cls(BinaryForm.parse(a.strip()), BinaryForm.parse(b.strip()))
        return cls(BinaryForm.parse(text))

    @classmethod
    def monomial(cls, var: int, n: int) -> "RationalSection":
        """``X_var^n``, as a fraction when ``n < 0``."""
        def power(k):
            coeffs = [0] * (k + 1)
            coeffs[k if var == 0 else 0] = 1
            return BinaryForm(tuple(coeffs))
        return cls(power(n)) if n >= 0 else cls(ONE, power(-n))

    def __str__(self):
        return str(self.num) if self.den == ONE else f"({self.num})/({self.den})"


@dataclass(frozen=True)
class HermLineBundleArith:
    bundle: HermBundle
    section: RationalSection

    def __post_init__(self):
        if self.bundle.rank != 1 or self.bundle.phi is None:
            raise ValueError("need a line bundle given by a potential phi")
        if self.section.degree != self.bundle.twists[0]:
            raise ValueError(f"section of degree {self.section.degree} on "
                             f"O({self.bundle.twists[0]})")

    @property
    def twist(self) -> int:
        return self.bundle.twists[0]

    def with_section(self, s: RationalSection) -> "HermLineBundleArith":
        return HermLineBundleArith(self.bundle, s)


@dataclass(frozen=True)
class IntersectionLedger:
    finite_part: ZeroCycleOnS
    archimedean_point_part: float
    archimedean_integral_part: float
    total: float

    def to_json(self) -> dict:
        return {"finite_part": self.finite_part.to_json(),
                "finite_log_degree": degree_log(self.finite_part),
                "archimedean_point_part": self.archimedean_point_part,
                "archimedean_integral_part": self.archimedean_integral_part,
                "total": self.total}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


# --- finite part ----------------------------------------------------------------

def div_finite_intersection(F: BinaryForm, G: BinaryForm) -> ZeroCycleOnS:
    """``p -> v_p(|Res(F, G)|)``."""
    r = resultant_forms(F, G)
    if r == 0:
        raise ImproperIntersection(f"Res({F}, {G}) = 0")
    return ZeroCycleOnS.from_order(abs(r))


def _section_finite(s0: RationalSection, s2: RationalSection) -> ZeroCycleOnS:
    total = ZeroCycleOnS()
    for a, sa in ((s0.num, 1), (s0.den, -1)):
        for b, sb in ((s2.num, 1), (s2.den, -1)):
            z = div_finite_intersection(a, b)
            total = total + z if sa * sb > 0 else total - z
    return total


# --- complex points of divisors ---------------------------------------------------

def _points(F: BinaryForm) -> list[tuple[float, float]]:
    """Zeros of ``F`` as unit homogeneous vectors ``(p0, p1)``, with multiplicity."""
    c = list(F.coeffs)
    d = F.degree
    top = max((i for i, x in enumerate(c) if x), default=None)
    if top is None:
        raise ImproperIntersection("zero section")
    pts = []
    if top > 0:
        for z in np.roots(c[top::-1]):
            nrm = math.sqrt(abs(z) ** 2 + 1)
            pts.append((z / nrm, 1 / nrm))
    pts += [(1.0, 0.0)] * (d - top)  # zeros at X1 = 0
    return pts


def _leading(F: BinaryForm, pts) -> complex:
    """``lam`` with ``F(X) = lam * prod (p1 X0 - p0 X1)``."""
    x0, x1 = _PROBE
    val = sum(f * x0 ** i * x1 ** (F.degree - i) for i, f in enumerate(F.coeffs))
    prod = 1.0 + 0j
    for p0, p1 in pts:
        prod *= p1 * x0 - p0 * x1
    return val / prod


def _chart_point(p) -> tuple[str, complex]:
    p0, p1 = p
    if abs(p0) <= abs(p1):  # |z| <= 1, ties to the z-chart
        return "z", p0 / p1
    return "w", p1 / p0


def _phi_at(L: HermBundle, p) -> float:
    chart, c = _chart_point(p)
    return float(values(L.phi[chart], np.array([c])).real[0])


def log_norm2(L: HermLineBundleArith, chart: str, c: np.ndarray) -> np.ndarray:
    """``log ||s||^2`` at chart points."""
    def dehom(F):
        if chart == "z":
            return sum(f * c ** i for i, f in enumerate(F.coeffs))
        return sum(f * c ** (F.degree - i) for i, f in enumerate(F.coeffs))
    s = L.section
    phi = values(L.bundle.phi[chart], c).real
    return (np.log(np.abs(dehom(s.num)) ** 2) - np.log(np.abs(dehom(s.den)) ** 2)
            - L.twist * np.log1p(np.abs(c) ** 2) - phi)


def _green_at(L: HermLineBundleArith, p) -> float:
    chart, c = _chart_point(p)
    v = float(log_norm2(L, chart, np.array([c]))[0])
    if not math.isfinite(v):
        raise ImproperIntersection("a zero or pole of one section lies on the other's divisor")
    return -v


# --- archimedean integrals ---------------------------------------------------------

def _fs_density(c):
    return conventions.ddc_factor() / (1 + np.abs(c) ** 2) ** 2


def _integral_phi_omega(L: HermBundle, grid: ChartGrid) -> float:
    tot = 0.0
    for ch in CHARTS:
        phi = values(L.phi[ch], grid.points).real
        tot += float(np.sum(phi * _fs_density(grid.points) * grid.weights))
    return tot


def _integral_phi_ddc_phi(La: HermBundle, Lb: HermBundle, grid: ChartGrid, mode: str) -> float:
    """``int phi_a dd^c phi_b``."""
    tot = 0.0
    for ch in CHARTS:
        pa = values(La.phi[ch], grid.points).real
        lap = jet(Lb.phi[ch], grid.points, mode, grid.h).fzzb.real
        tot += float(np.sum(pa * conventions.ddc_factor() * lap * grid.weights))
    return tot


def _check_metric(L: HermBundle, grid: ChartGrid):
    for ch in CHARTS:
        phi = values(L.phi[ch], grid.points)
        if not np.all(np.isfinite(phi)):
            raise SingularMetric(f"{L.label}: potential is not finite on the {ch}-chart")


def arith_c1c1(L0: HermLineBundleArith, L2: HermLineBundleArith, grid: ChartGrid,
               mode: str = "fd") -> IntersectionLedger:
    _check_metric(L0.bundle, grid)
    _check_metric(L2.bundle, grid)
    finite = _section_finite(L0.section, L2.section)

    n0 = L0.twist
    s2 = L2.section
    zeros, poles = _points(s2.num), _points(s2.den) if s2.den.degree > 0 else []
    # point part: g0 on div s2
    point = sum(_green_at(L0, p) for p in zeros) - sum(_green_at(L0, q) for q in poles)

    # integral part: g2 = sum G(., p) - sum G(., q) + const + phi2
    J0 = _integral_phi_omega(L0.bundle, grid)
    green = sum(n0 + J0 - _phi_at(L0.bundle, p) for p in zeros) \
        - sum(n0 + J0 - _phi_at(L0.bundle, q) for q in poles)
    lam_num = _leading(s2.num, zeros)
    lam_den = _leading(s2.den, poles) if poles else complex(s2.den.coeffs[0])
    const = -math.log(abs(lam_num) ** 2) + math.log(abs(lam_den) ** 2)
    J2 = _integral_phi_omega(L2.bundle, grid)
    smooth = n0 * J2 + _integral_phi_ddc_phi(L2.bundle, L0.bundle, grid, mode)
    integral = green + const * n0 + smooth

    a_point, a_int = 0.5 * point, 0.5 * integral
    return IntersectionLedger(finite, a_point, a_int, degree_log(finite) + a_point + a_int)


def default_sections(n0: int, n2: int) -> tuple[RationalSection, RationalSection]:
    """``X0^n0`` and ``X1^n2``: their divisors never meet."""
    return RationalSection.monomial(0, n0), RationalSection.monomial(1, n2)


def arith_c2_split(E1: HermBundle, grid: ChartGrid, mode: str = "fd") -> float:
    """``c2^`` of an orthogonal sum of two line bundles, as ``c1^(L) c1^(M)``."""
    if E1.rank != 2:
        raise ValueError("expected a rank-2 bundle")
    if not E1.is_block_diagonal():
        raise NotSplit("E1 metric has off-diagonal terms in the standard frame")
    L, M = E1.summands()
    sL, sM = default_sections(L.twists[0], M.twists[0])
    return arith_c1c1(HermLineBundleArith(L, sL), HermLineBundleArith(M, sM), grid, mode).total
