"""Pointwise values and Wirtinger derivatives of chart expressions.

Two modes share one interface:

``"fd"``        second-order central differences with step ``h`` on the
                closed-form function (error ``O(h^2)``);
``"analytic"``  sympy differentiation in ``(c, cb)``, then lambdify.

The default in the verification pipeline is ``"fd"``; the analytic mode is
the oracle the tests compare against.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np
import sympy as sp

from .expr import C, CB, ChartExpr

MODES = ("fd", "analytic")


class Jet(NamedTuple):
    f: np.ndarray
    fz: np.ndarray
    fzb: np.ndarray
    fzzb: np.ndarray


_lambda_cache: dict = {}


def _numeric(e: sp.Expr):
    fn = _lambda_cache.get(e)
    if fn is None:
        raw = sp.lambdify((C, CB), e, "numpy")
        fn = _lambda_cache[e] = raw
    return lambda c: np.broadcast_to(np.asarray(fn(c, np.conj(c)), dtype=complex),
                                     np.shape(c))


def values(expr: ChartExpr, pts: np.ndarray) -> np.ndarray:
    return np.array(_numeric(expr.f)(pts))


def jet(expr: ChartExpr, pts: np.ndarray, mode: str = "fd", h: float = 1e-3) -> Jet:
    if mode == "analytic":
        f = expr.f
        return Jet(values(expr, pts),
                   np.array(_numeric(sp.diff(f, C))(pts)),
                   np.array(_numeric(sp.diff(f, CB))(pts)),
                   np.array(_numeric(sp.diff(f, C, CB))(pts)))
    if mode != "fd":
        raise ValueError(f"mode must be one of {MODES}")
    fn = _numeric(expr.f)
    f0 = np.array(fn(pts))
    fe, fw = fn(pts + h), fn(pts - h)
    fn_, fs = fn(pts + 1j * h), fn(pts - 1j * h)
    fx = (fe - fw) / (2 * h)
    fy = (fn_ - fs) / (2 * h)
    lap = (fe + fw + fn_ + fs - 4 * f0) / (h * h)
    return Jet(f0, 0.5 * (fx - 1j * fy), 0.5 * (fx + 1j * fy), 0.25 * lap)


def laplacian_zzb(fn, pts: np.ndarray, h: float) -> np.ndarray:
    """``d^2 f / dz dzbar`` of a numeric callable by the 5-point stencil."""
    f0 = fn(pts)
    return 0.25 * (fn(pts + h) + fn(pts - h) + fn(pts + 1j * h) + fn(pts - 1j * h)
                   - 4 * f0) / (h * h)
