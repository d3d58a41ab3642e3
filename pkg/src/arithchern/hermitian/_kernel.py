"""Fiber integrals of the transgression family, pure numpy version.

At each base point the family metric on ``E1`` over the parameter line is,
in the adapted frame,

    t-chart (|t| <= 1):  [[A, x], [conj x, y + m(|t|^2) k]]
    u-chart (|u| <= 1):  [[A, u x], [conj(u x), |u|^2 y + n(|u|^2) k]]

with ``u = 1/t`` and frame ``(a, u b)`` on the second chart.  The kernel
integrates ``tr Theta_tt`` and the mixed curvature quadratic against
``log|t|^2`` on both charts, in the variable ``s = log |t|^2``.  It returns
the raw sums; normalization lives in :mod:`.transgression`.

Field arrays (length P):
    A, Az, Azz      real field, d/dz, d^2/dz dzbar
    X, Xz, Xzb, Xzz complex field with both first derivatives
    Y, Yz, Yzz      real
    K, Kz, Kzz      real
Node arrays (length S): r = e^s, the weight w * s * e^s, and the family
profile m, m', m'' (t-chart) and n, n', n'' (u-chart) at r.
"""
from __future__ import annotations

import numpy as np


def _mat(a, b, c, d):
    out = np.empty(np.shape(a) + (2, 2), dtype=complex)
    out[..., 0, 0], out[..., 0, 1], out[..., 1, 0], out[..., 1, 1] = a, b, c, d
    return out


def _inv(H):
    a, b, c, d = H[..., 0, 0], H[..., 0, 1], H[..., 1, 0], H[..., 1, 1]
    det = a * d - b * c
    return _mat(d / det, -b / det, -c / det, a / det), det


def _tr(M):
    return M[..., 0, 0] + M[..., 1, 1]


def _trprod(P, Q):
    return (P[..., 0, 0] * Q[..., 0, 0] + P[..., 0, 1] * Q[..., 1, 0]
            + P[..., 1, 0] * Q[..., 0, 1] + P[..., 1, 1] * Q[..., 1, 1])


def fiber_integrals(f: dict, nodes: dict, want_ch2: bool = True):
    """Returns ``(I1, I2, min_det)``.

    ``I1 = sum_j wt_j (tau_t - tau_u)`` with ``tau = tr Theta`` of the
    parameter direction, ``I2`` the same for ``tr(Th_zz Th_tt) -
    tr(Th_zt Th_tz)``.  ``min_det`` is the smallest family determinant seen
    (positivity diagnostic).
    """
    A, X, Y, K = f["A"], f["X"], f["Y"], f["K"]
    P = A.shape[0]
    zero = np.zeros(P, dtype=complex)
    I1 = np.zeros(P)
    I2 = np.zeros(P)
    min_det = np.inf
    if want_ch2:
        Az, Azz = f["Az"], f["Azz"]
        Xz, Xzb, Xzz = f["Xz"], f["Xzb"], f["Xzz"]
        Yz, Yzz, Kz, Kzz = f["Yz"], f["Yzz"], f["Kz"], f["Kzz"]
    for j in range(len(nodes["r"])):
        r = nodes["r"][j]
        wt = nodes["wt"][j]
        sr = np.sqrt(r)
        for chart in ("t", "u"):
            if chart == "t":
                m, m1, m2 = nodes["m"][j], nodes["m1"][j], nodes["m2"][j]
                H = _mat(A, X, np.conj(X), Y + m * K)
                Ht = _mat(zero, zero, zero, m1 * sr * K)
                Htb = Ht
                Httb = _mat(zero, zero, zero, (m1 + r * m2) * K)
            else:
                n, n1, n2 = nodes["n"][j], nodes["n1"][j], nodes["n2"][j]
                H = _mat(A, sr * X, sr * np.conj(X), r * Y + n * K)
                g = sr * (Y + n1 * K)
                Ht = _mat(zero, X, zero, g)
                Htb = _mat(zero, zero, np.conj(X), g)
                Httb = _mat(zero, zero, zero, Y + (n1 + r * n2) * K)
            Hi, det = _inv(H)
            min_det = min(min_det, float(np.min(det.real)), float(np.min(A)))
            HiHt = Hi @ Ht
            Ttt = Hi @ Htb @ HiHt - Hi @ Httb
            tau = _tr(Ttt).real
            sign = 1.0 if chart == "t" else -1.0
            I1 += sign * wt * tau
            if not want_ch2:
                continue
            if chart == "t":
                Hz = _mat(Az, Xz, np.conj(Xzb), Yz + m * Kz)
                Hzz = _mat(Azz, Xzz, np.conj(Xzz), Yzz + m * Kzz)
                Hztb = _mat(zero, zero, zero, m1 * sr * Kz)
                Htzb = _mat(zero, zero, zero, m1 * sr * np.conj(Kz))
            else:
                Hz = _mat(Az, sr * Xz, sr * np.conj(Xzb), r * Yz + n * Kz)
                Hzz = _mat(Azz, sr * Xzz, sr * np.conj(Xzz), r * Yzz + n * Kzz)
                Hztb = _mat(zero, zero, np.conj(Xzb), sr * (Yz + n1 * Kz))
                Htzb = _mat(zero, Xzb, zero, sr * (np.conj(Yz) + n1 * np.conj(Kz)))
            Hzb = np.conj(np.swapaxes(Hz, -1, -2))
            HiHz = Hi @ Hz
            Tzz = Hi @ Hzb @ HiHz - Hi @ Hzz
            Tzt = Hi @ Htb @ HiHz - Hi @ Hztb
            Ttz = Hi @ Hzb @ HiHt - Hi @ Htzb
            G = (_trprod(Tzz, Ttt) - _trprod(Tzt, Ttz)).real
            I2 += sign * wt * G
    return I1, I2, min_det
