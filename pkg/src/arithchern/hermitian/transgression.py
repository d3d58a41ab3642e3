"""Bott-Chern secondary forms of a metrized short exact sequence.

The sequence is deformed over the parameter line ``P^1`` (coordinate
``t``): at ``t = 0`` the family is ``E1`` with its own metric, at
``t = infinity`` it is the orthogonal sum of the induced metrics.  Then

    ch~ = - integral over P^1 of ch(family) * log|t|^2,

split by degree: ``ch~_1`` is a function, ``ch~_2`` a ``(1,1)``-form on the
sphere, and ``c~_2 = -ch~_2`` because the first-degree part vanishes for
induced metrics.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import _kernel, conventions
from .fields import jet, values
from .grid import CHARTS, ChartGrid, FormGrid, integrate

try:
    from . import _fiber_ext
except ImportError:  # no compiler at install time; numpy fallback
    _fiber_ext = None

BACKEND = "cython" if _fiber_ext is not None else "python"


class FamilyDegenerate(ValueError):
    """The family metric stopped being positive definite."""


def set_backend(name: str) -> str:
    """Switch between ``"cython"`` and ``"python"`` kernels; returns the previous one."""
    global BACKEND
    if name not in ("cython", "python"):
        raise ValueError(name)
    if name == "cython" and _fiber_ext is None:
        raise RuntimeError("compiled kernel is not available")
    prev, BACKEND = BACKEND, name
    return prev


def _fiber(fields, nodes, want_ch2):
    if BACKEND == "cython":
        return _fiber_ext.fiber_integrals(fields, nodes, want_ch2)
    return _kernel.fiber_integrals(fields, nodes, want_ch2)


@dataclass(frozen=True)
class FamilyChoice:
    """Profile of the deformation.

    ``m(r)`` scales the quotient block on the t-chart (``r = |t|^2``);
    ``n(rho) = rho * m(1/rho)`` is the same metric read in the frame
    ``(a, u b)`` with ``rho = |u|^2``.  Each returns value, first and
    second derivative.  Needs ``m(0) = 0`` (the given metric at ``t = 0``)
    and ``n(0) = 1`` (the split metric at infinity).
    """
    name: str
    m: Callable[[np.ndarray], tuple]
    n: Callable[[np.ndarray], tuple]

    def validate(self, tol: float = 1e-12) -> None:
        m0 = self.m(np.array([0.0]))[0][0]
        n0 = self.n(np.array([0.0]))[0][0]
        if abs(m0) > tol or abs(n0 - 1) > tol:
            raise FamilyDegenerate(f"{self.name}: endpoint metrics are not the "
                                   f"sequence and its splitting (m(0)={m0}, n(0)={n0})")
        rho = np.array([0.25, 0.5, 0.9])
        if np.max(np.abs(self.n(rho)[0] - rho * self.m(1 / rho)[0])) > 1e-10:
            raise FamilyDegenerate(f"{self.name}: the two chart profiles disagree")


def _linear_m(r):
    return r, np.ones_like(r), np.zeros_like(r)


def _linear_n(rho):
    return np.ones_like(rho), np.zeros_like(rho), np.zeros_like(rho)


def _quad_m(r):
    q = np.sqrt(1 + r * r)
    return q - 1, r / q, q ** -3


def _quad_n(rho):
    q = np.sqrt(1 + rho * rho)
    return q - rho, rho / q - 1, q ** -3


FAMILIES = {
    "linear": FamilyChoice("linear", _linear_m, _linear_n),
    "quadratic": FamilyChoice("quadratic", _quad_m, _quad_n),
}


def fiber_nodes(family: FamilyChoice, n_s: int = 64, R: float = 30.0) -> dict:
    """Gauss-Legendre nodes in ``s = log|t|^2`` on ``[-R, 0]``.

    The dropped tail is bounded by ``sup|integrand| * (R + 1) e^-R``.
    """
    x, w = np.polynomial.legendre.leggauss(n_s)
    s = 0.5 * R * (x - 1.0)
    w = 0.5 * R * w
    r = np.exp(s)
    m, m1, m2 = family.m(r)
    n, n1, n2 = family.n(r)
    return {"r": r, "wt": w * s * r, "m": m, "m1": m1, "m2": m2,
            "n": n, "n1": n1, "n2": n2}


def tail_bound(R: float) -> float:
    return (R + 1.0) * math.exp(-R)


_NEEDED = {"A": ("A", "Az", None, "Azz"), "x": ("X", "Xz", "Xzb", "Xzz"),
           "y": ("Y", "Yz", None, "Yzz"), "k": ("K", "Kz", None, "Kzz")}


def _field_arrays(fields, pts, mode, h, want_ch2):
    out = {}
    for key, names in _NEEDED.items():
        if want_ch2:
            J = jet(fields[key], pts, mode, h)
            parts = (J.f, J.fz, J.fzb, J.fzzb)
        else:
            parts = (values(fields[key], pts), None, None, None)
        for name, arr in zip(names, parts):
            if name is None or arr is None:
                continue
            real = key != "x" and name in ("A", "Y", "K", "Azz", "Yzz", "Kzz")
            out[name] = np.ascontiguousarray(arr.real if real else arr)
    return out


def fiber_values(seq, chart: str, pts: np.ndarray, family: FamilyChoice,
                 mode: str = "fd", h: float = 1e-3, n_s: int = 64, R: float = 30.0,
                 want_ch2: bool = True):
    """``(ch~_1, ch~_2 coefficient)`` at arbitrary points of one chart."""
    nodes = fiber_nodes(family, n_s, R)
    fields = _field_arrays(seq.family_fields(chart), np.asarray(pts, dtype=complex),
                           mode, h, want_ch2)
    I1, I2, min_det = _fiber(fields, nodes, want_ch2)
    if not min_det > 0:
        raise FamilyDegenerate(f"family metric degenerate on the {chart}-chart "
                               f"(min det {min_det:.3g})")
    k = conventions.DC_SCALE
    return -k * I1, -(k * k / math.pi) * I2


@dataclass
class BottChernResult:
    components: dict[int, FormGrid]
    integral_c2_tilde: float
    family: str
    diagnostics: dict = field(default_factory=dict)

    @property
    def c2_tilde(self) -> FormGrid:
        return -self.components[2]


def bott_chern(seq, grid: ChartGrid, family: FamilyChoice | str = "linear",
               mode: str = "fd", n_s: int = 64, R: float = 30.0) -> BottChernResult:
    if isinstance(family, str):
        family = FAMILIES[family]
    family.validate()
    seq.check_injective(grid)
    c1v, c2v, c1s, c2s = {}, {}, {}, {}
    for c in CHARTS:
        c1v[c], c2v[c] = fiber_values(seq, c, grid.points, family, mode, grid.h, n_s, R)
        seam = grid.seam if c == "z" else 1 / grid.seam
        c1s[c], c2s[c] = fiber_values(seq, c, seam, family, mode, grid.h, n_s, R)
    comps = {0: FormGrid.zeros((0, 0), grid),
             1: FormGrid((0, 0), grid, c1v, c1s),
             2: FormGrid((1, 1), grid, c2v, c2s)}
    total = -integrate(comps[2])
    diag = {"backend": BACKEND, "n_s": n_s, "R": R, "tail_bound": tail_bound(R),
            "sup_degree1": comps[1].sup(), "seam_defect_degree2": comps[2].seam_defect()}
    return BottChernResult(comps, total, family.name, diag)


def ddc_residual(seq, grid: ChartGrid, family: FamilyChoice | str = "linear",
                 mode: str = "fd", n_s: int = 64, R: float = 30.0) -> FormGrid:
    """``dd^c ch~_1 - (ch(E0) - ch(E1) + ch(E2))_1`` on the grid.

    ``dd^c`` of the secondary function is taken with the same 5-point
    stencil (step ``h``) as every other derivative, so the residual is
    ``O(h^2)``.
    """
    if isinstance(family, str):
        family = FAMILIES[family]
    h = grid.h
    target = seq.alternating_c1(grid, mode)
    vals = {}
    for c in CHARTS:
        pts = grid.points
        stencil = np.concatenate([pts, pts + h, pts - h, pts + 1j * h, pts - 1j * h])
        f, _ = fiber_values(seq, c, stencil, family, mode, h, n_s, R, want_ch2=False)
        f0, fe, fw, fn, fs = np.split(f, 5)
        lap = 0.25 * (fe + fw + fn + fs - 4 * f0) / (h * h)
        vals[c] = conventions.ddc_factor() * lap - np.real(target.values[c])
    return FormGrid((1, 1), grid, vals)


def family_spread(seq, grid: ChartGrid, names=("linear", "quadratic"),
                  mode: str = "fd", n_s: int = 64, R: float = 30.0) -> dict:
    vals = {n: bott_chern(seq, grid, n, mode, n_s, R).integral_c2_tilde for n in names}
    return {"integrals": vals, "spread": max(vals.values()) - min(vals.values())}
