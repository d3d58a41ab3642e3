"""Quadrature grids on the two standard charts of the Riemann sphere.

Each chart is the closed unit disk in its own coordinate (``z`` and
``w = 1/z``), sampled on a polar product grid: Gauss-Legendre in the radius
and the uniform trapezoid rule in the angle.  Both rules are spectrally
accurate for smooth integrands, so quadrature error is negligible next to
the finite-difference error ``O(h^2)`` with ``h = 1/N``.  Node counts
default to 64 radial by 128 angular and only grow past ``N = 256``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

CHARTS = ("z", "w")


class DegreeMismatch(ValueError):
    pass


@dataclass(frozen=True)
class ChartGrid:
    N: int
    n_r: int
    n_theta: int
    r: np.ndarray = field(repr=False)
    theta: np.ndarray = field(repr=False)
    points: np.ndarray = field(repr=False)   # flattened (n_r * n_theta,), same in both charts
    weights: np.ndarray = field(repr=False)  # for integrals against Lebesgue dA
    seam: np.ndarray = field(repr=False)     # samples of |c| = 1

    @classmethod
    def build(cls, N: int = 256, n_r: int | None = None,
              n_theta: int | None = None) -> "ChartGrid":
        if N < 4:
            raise ValueError("grid resolution must be at least 4")
        # quadrature is decoupled from the difference step: it only grows
        # past N = 256, so refinement studies see the O(h^2) error alone
        n_r = n_r or max(64, N // 4)
        n_theta = n_theta or max(128, N // 2)
        x, wx = np.polynomial.legendre.leggauss(n_r)
        r = 0.5 * (x + 1.0)
        wr = 0.5 * wx
        theta = 2 * np.pi * np.arange(n_theta) / n_theta
        rr, tt = np.meshgrid(r, theta, indexing="ij")
        pts = (rr * np.exp(1j * tt)).ravel()
        wts = np.outer(wr * r, np.full(n_theta, 2 * np.pi / n_theta)).ravel()
        seam = np.exp(1j * theta)
        return cls(N, n_r, n_theta, r, theta, pts, wts, seam)

    @property
    def h(self) -> float:
        """Finite-difference step."""
        return 1.0 / self.N

    @property
    def size(self) -> int:
        return self.points.size

    def mirror_index(self) -> np.ndarray:
        """Permutation sending the sample at ``(r, theta)`` to ``(r, -theta)``."""
        k = (-np.arange(self.n_theta)) % self.n_theta
        idx = np.arange(self.size).reshape(self.n_r, self.n_theta)
        return idx[:, k].ravel()

    def area_check(self) -> float:
        """``int (1/pi)(1+|c|^2)^-2 dA`` over both charts; equals 1 exactly."""
        dens = (1.0 / np.pi) / (1.0 + np.abs(self.points) ** 2) ** 2
        return 2.0 * float(np.sum(dens * self.weights))


@dataclass
class FormGrid:
    """Samples of a form's coefficient on both charts.

    ``bidegree`` ``(p, q)``; for ``(1, 1)`` the values are coefficients of
    the chart's Lebesgue area element ``dA``, for ``(0, 1)`` of ``dcbar``,
    for ``(0, 0)`` plain function values.  Values may carry trailing matrix
    axes.
    """
    bidegree: tuple[int, int]
    grid: ChartGrid
    values: dict[str, np.ndarray]
    seam: dict[str, np.ndarray] | None = None

    @classmethod
    def zeros(cls, bidegree, grid: ChartGrid, shape=()) -> "FormGrid":
        return cls(tuple(bidegree), grid,
                   {c: np.zeros((grid.size,) + tuple(shape)) for c in CHARTS})

    def _combine(self, other, op):
        if isinstance(other, FormGrid):
            if other.bidegree != self.bidegree:
                raise DegreeMismatch(f"{self.bidegree} vs {other.bidegree}")
            vals = {c: op(self.values[c], other.values[c]) for c in CHARTS}
            seam = None
            if self.seam is not None and other.seam is not None:
                seam = {c: op(self.seam[c], other.seam[c]) for c in CHARTS}
            return FormGrid(self.bidegree, self.grid, vals, seam)
        vals = {c: op(self.values[c], other) for c in CHARTS}
        seam = {c: op(v, other) for c, v in self.seam.items()} if self.seam else None
        return FormGrid(self.bidegree, self.grid, vals, seam)

    def __add__(self, o):
        return self._combine(o, np.add)

    def __sub__(self, o):
        return self._combine(o, np.subtract)

    def __mul__(self, o):
        return self._combine(o, np.multiply)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def sup(self) -> float:
        return max(float(np.max(np.abs(v))) if v.size else 0.0 for v in self.values.values())

    def trace(self) -> "FormGrid":
        vals = {c: np.trace(v, axis1=-2, axis2=-1) for c, v in self.values.items()}
        seam = None
        if self.seam is not None:
            seam = {c: np.trace(v, axis1=-2, axis2=-1) for c, v in self.seam.items()}
        return FormGrid(self.bidegree, self.grid, vals, seam)

    def real_structure_defect(self) -> float:
        """``sup |f(r, -theta) - conj f(r, theta)|``.

        Complex conjugation acts on a real ``(p, p)``-form with the parity
        ``(-1)^p``; in terms of the ``dA`` coefficient (``dA`` itself is odd)
        both ``p = 0`` and ``p = 1`` reduce to this symmetry.
        """
        m = self.grid.mirror_index()
        return max(float(np.max(np.abs(v[m] - np.conj(v)))) for v in self.values.values())

    def seam_defect(self) -> float:
        """Chart-overlap mismatch on ``|z| = 1``.

        At ``z = e^{i theta}`` the w-chart sample is ``w = e^{-i theta}``;
        ``|dz/dw| = 1`` there, so ``(1,1)`` coefficients and functions agree
        directly.
        """
        if self.seam is None:
            raise ValueError("form was built without seam samples")
        n = self.grid.n_theta
        back = (-np.arange(n)) % n
        return float(np.max(np.abs(self.seam["z"] - self.seam["w"][back])))


def integrate(form: FormGrid) -> float:
    """Integral of a top-degree form over the sphere.

    Sums are numpy pairwise reductions over a fixed point order, so the
    result is bit-reproducible.
    """
    if form.bidegree != (1, 1):
        raise DegreeMismatch(f"cannot integrate a {form.bidegree}-form over a curve")
    total = 0.0
    for c in CHARTS:
        v = form.values[c]
        if v.ndim != 1:
            raise DegreeMismatch("integrate a scalar form (take a trace first)")
        s = np.sum(v * form.grid.weights)
        if abs(np.imag(s)) > 1e-9 * max(1.0, abs(s)):
            raise ValueError(f"form has a non-real integral ({s})")
        total += float(np.real(s))
    return total
