"""Hermitian bundles on the Riemann sphere and their Chern-Weil forms.

A bundle here is a sum of ``O(a_i)`` with the standard frames ``X1^{a_i}``
on the z-chart and ``X0^{a_i}`` on the w-chart, so the transition cocycle
is ``diag(w^{a_i})``.  The metric is given chart by chart as the matrix
``H_ij = h(e_i, e_j)`` of closed-form expressions.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np
import sympy as sp

from . import conventions
from .expr import ChartExpr, check_global, const, fs_weight, parse_expr, parse_matrix
from .fields import jet, values
from .grid import CHARTS, ChartGrid, FormGrid


class SingularMetric(ValueError):
    """The metric is not positive definite at some sample."""


@dataclass(frozen=True)
class HermBundle:
    twists: tuple[int, ...]
    metric: Mapping[str, tuple[tuple[ChartExpr, ...], ...]]
    # for line bundles: metric = (1+|c|^2)^(-n) * exp(-phi) in the standard frame
    phi: Mapping[str, ChartExpr] | None = None
    label: str = ""

    @property
    def rank(self) -> int:
        return len(self.twists)

    @property
    def degree(self) -> int:
        return sum(self.twists)

    # --- constructors --------------------------------------------------------

    @classmethod
    def line(cls, n: int, phi: str | Mapping[str, ChartExpr] | None = None,
             label: str = "") -> "HermBundle":
        """``O(n)`` with metric ``FS^n * exp(-phi)``; ``phi`` a degree-0 expression."""
        if phi is None:
            phis = {c: const(0) for c in CHARTS}
        elif isinstance(phi, str):
            check_global(phi)
            phis = {c: parse_expr(phi, c) for c in CHARTS}
        else:
            phis = dict(phi)
        metric = {c: ((fs_weight(c) ** (-n) * (-phis[c]).exp(),),) for c in CHARTS}
        return cls((n,), metric, phis, label or f"O({n})")

    @classmethod
    def direct_sum(cls, *parts: "HermBundle") -> "HermBundle":
        """Orthogonal direct sum."""
        twists = tuple(a for p in parts for a in p.twists)
        r = len(twists)
        metric = {}
        for c in CHARTS:
            rows = [[const(0)] * r for _ in range(r)]
            off = 0
            for p in parts:
                for i in range(p.rank):
                    for j in range(p.rank):
                        rows[off + i][off + j] = p.metric[c][i][j]
                off += p.rank
            metric[c] = tuple(tuple(row) for row in rows)
        return cls(twists, metric, None, " + ".join(p.label for p in parts))

    @classmethod
    def twisted_matrix(cls, a: int, rank: int, matrix: str, label: str = "") -> "HermBundle":
        """``O(a)^rank`` with metric ``FS^a * M`` for a matrix ``M`` of degree-0 expressions."""
        metric = {}
        for c in CHARTS:
            m = parse_matrix(matrix, c)
            if len(m) != rank or len(m[0]) != rank:
                raise ValueError(f"expected a {rank}x{rank} matrix")
            w = fs_weight(c) ** (-a)
            metric[c] = tuple(tuple(w * e for e in row) for row in m)
        return cls((a,) * rank, metric, None, label or f"O({a})^{rank}")

    # --- queries -------------------------------------------------------------

    def is_block_diagonal(self) -> bool:
        for c in CHARTS:
            for i in range(self.rank):
                for j in range(self.rank):
                    if i != j and sp.simplify(self.metric[c][i][j].f) != 0:
                        return False
        return True

    def summands(self) -> tuple["HermBundle", ...]:
        """The line bundles of a block-diagonal metric."""
        if self.rank == 1:
            return (self,)
        if not self.is_block_diagonal():
            raise ValueError("metric is not block diagonal")
        out = []
        for i, a in enumerate(self.twists):
            phi = {c: -(self.metric[c][i][i] * fs_weight(c) ** a).log() for c in CHARTS}
            out.append(HermBundle.line(a, phi, f"{self.label}[{i}]"))
        return tuple(out)

    def metric_values(self, chart: str, pts: np.ndarray) -> np.ndarray:
        r = self.rank
        out = np.empty(np.shape(pts) + (r, r), dtype=complex)
        for i in range(r):
            for j in range(r):
                out[..., i, j] = values(self.metric[chart][i][j], pts)
        return out

    def check_positive(self, chart: str, pts: np.ndarray) -> None:
        h = self.metric_values(chart, pts)
        ev = np.linalg.eigvalsh(0.5 * (h + np.conj(np.swapaxes(h, -1, -2))))
        bad = ~(ev.min(axis=-1) > 0)
        if np.any(bad):
            k = int(np.argmax(bad))
            raise SingularMetric(f"{self.label}: metric not positive definite at "
                                 f"{chart}={complex(pts.flat[k]):.4g}")

    def transition_defect(self, grid: ChartGrid) -> float:
        """``sup |H_z - conj(g)^T H_w g|`` on the seam, ``g = diag(w^{a_i})``."""
        z = grid.seam
        w = 1 / z
        hz = self.metric_values("z", z)
        hw = self.metric_values("w", w)
        g = np.stack([w ** a for a in self.twists], axis=-1)
        pulled = np.conj(g)[:, :, None] * hw * g[:, None, :]
        return float(np.max(np.abs(hz - pulled)))


def _matrix_jets(E: HermBundle, chart: str, pts, mode, h):
    r = E.rank
    shape = np.shape(pts) + (r, r)
    H, Hz, Hzb, Hzzb = (np.empty(shape, dtype=complex) for _ in range(4))
    for i in range(r):
        for j in range(r):
            J = jet(E.metric[chart][i][j], pts, mode, h)
            H[..., i, j], Hz[..., i, j], Hzb[..., i, j], Hzzb[..., i, j] = J
    return H, Hz, Hzb, Hzzb


def _theta(E, chart, pts, mode, h):
    H, Hz, Hzb, Hzzb = _matrix_jets(E, chart, pts, mode, h)
    Hi = np.linalg.inv(H)
    return Hi @ Hzb @ Hi @ Hz - Hi @ Hzzb


def curvature(E: HermBundle, grid: ChartGrid, mode: str = "fd") -> FormGrid:
    """Curvature of the Chern connection, as the ``dA`` coefficient matrix.

    ``Theta = H^-1 H_zbar H^-1 H_z - H^-1 H_{z zbar}`` in a holomorphic
    frame, normalized so that ``c1 = (1/pi) tr Theta dA``.
    """
    vals, seam = {}, {}
    for c in CHARTS:
        E.check_positive(c, grid.points)
        vals[c] = _theta(E, c, grid.points, mode, grid.h)
        pts = grid.seam if c == "z" else 1 / grid.seam
        seam[c] = _theta(E, c, pts, mode, grid.h)
    return FormGrid((1, 1), grid, vals, seam)


def chern_forms(theta: FormGrid) -> dict[str, FormGrid]:
    """``c1``, ``ch2``, ``c2`` from a curvature matrix on the curve.

    On a curve the degree-2 forms vanish identically; they are returned as
    zero ``(2,2)``-forms so callers can treat every degree alike.  The
    surface version used by the transgression is :func:`surface_chern`.
    """
    k = conventions.ddc_factor()
    c1 = theta.trace() * k
    c1.values = {c: np.real_if_close(v, tol=1e6) for c, v in c1.values.items()}
    zero = FormGrid.zeros((2, 2), theta.grid)
    return {"c1": c1, "ch2": zero, "c2": zero}


def surface_chern(t11, t22, t12, t21) -> dict[str, np.ndarray]:
    """Chern forms on a surface from the four curvature components.

    ``tjk`` is the coefficient matrix of ``dz_j dzbar_k``; the returned
    degree-2 densities are coefficients of ``dA_1 dA_2``.
    """
    k = conventions.ddc_factor()
    tr = lambda m: np.trace(m, axis1=-2, axis2=-1)
    c1 = (k * tr(t11), k * tr(t22))
    ch2 = k * k * (tr(t11 @ t22) - tr(t12 @ t21))
    c1sq = 2 * k * k * (tr(t11) * tr(t22) - tr(t12) * tr(t21))
    return {"c1": c1, "ch2": ch2, "c1sq": c1sq, "c2": 0.5 * c1sq - ch2}
