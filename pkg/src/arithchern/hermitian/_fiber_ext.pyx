# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled fiber integrals; same contract as ``_kernel.fiber_integrals``.

The numpy version materializes every 2x2 product for all points at once;
here each point runs its own node loop with the matrices on the stack.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, INFINITY

cnp.import_array()


ctypedef struct M2:
    double complex a
    double complex b
    double complex c
    double complex d


cdef inline M2 mk(double complex a, double complex b, double complex c,
                  double complex d) noexcept nogil:
    cdef M2 m
    m.a = a
    m.b = b
    m.c = c
    m.d = d
    return m


cdef inline M2 mul(M2 x, M2 y) noexcept nogil:
    return mk(x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
              x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d)


cdef inline M2 sub(M2 x, M2 y) noexcept nogil:
    return mk(x.a - y.a, x.b - y.b, x.c - y.c, x.d - y.d)


cdef inline M2 dagger(M2 x) noexcept nogil:
    return mk(x.a.conjugate(), x.c.conjugate(), x.b.conjugate(), x.d.conjugate())


cdef inline double complex trprod(M2 p, M2 q) noexcept nogil:
    return p.a * q.a + p.b * q.c + p.c * q.b + p.d * q.d


def fiber_integrals(dict f, dict nodes, bint want_ch2=True):
    cdef double[::1] A = np.ascontiguousarray(f["A"], dtype=np.float64)
    cdef double complex[::1] X = np.ascontiguousarray(f["X"], dtype=np.complex128)
    cdef double[::1] Y = np.ascontiguousarray(f["Y"], dtype=np.float64)
    cdef double[::1] K = np.ascontiguousarray(f["K"], dtype=np.float64)
    cdef Py_ssize_t P = A.shape[0]
    cdef double complex[::1] Az, Xz, Xzb, Xzz, Yz, Kz
    cdef double[::1] Azz, Yzz, Kzz
    if want_ch2:
        Az = np.ascontiguousarray(f["Az"], dtype=np.complex128)
        Azz = np.ascontiguousarray(np.real(f["Azz"]), dtype=np.float64)
        Xz = np.ascontiguousarray(f["Xz"], dtype=np.complex128)
        Xzb = np.ascontiguousarray(f["Xzb"], dtype=np.complex128)
        Xzz = np.ascontiguousarray(f["Xzz"], dtype=np.complex128)
        Yz = np.ascontiguousarray(f["Yz"], dtype=np.complex128)
        Yzz = np.ascontiguousarray(np.real(f["Yzz"]), dtype=np.float64)
        Kz = np.ascontiguousarray(f["Kz"], dtype=np.complex128)
        Kzz = np.ascontiguousarray(np.real(f["Kzz"]), dtype=np.float64)
    cdef double[::1] r = np.ascontiguousarray(nodes["r"], dtype=np.float64)
    cdef double[::1] wt = np.ascontiguousarray(nodes["wt"], dtype=np.float64)
    cdef double[::1] m = np.ascontiguousarray(nodes["m"], dtype=np.float64)
    cdef double[::1] m1 = np.ascontiguousarray(nodes["m1"], dtype=np.float64)
    cdef double[::1] m2 = np.ascontiguousarray(nodes["m2"], dtype=np.float64)
    cdef double[::1] n = np.ascontiguousarray(nodes["n"], dtype=np.float64)
    cdef double[::1] n1 = np.ascontiguousarray(nodes["n1"], dtype=np.float64)
    cdef double[::1] n2 = np.ascontiguousarray(nodes["n2"], dtype=np.float64)
    cdef Py_ssize_t S = r.shape[0]

    out1 = np.zeros(P)
    out2 = np.zeros(P)
    cdef double[::1] I1 = out1
    cdef double[::1] I2 = out2
    cdef double min_det = INFINITY

    cdef Py_ssize_t i, j
    cdef int chart
    cdef double rj, sr, w, sign, tau, G, dre
    cdef double complex x, xc, det, g, zero = 0
    cdef M2 H, Hi, Ht, Htb, Httb, Hz, Hzb, Hzz, Hztb, Htzb
    cdef M2 HiHt, HiHz, Ttt, Tzz, Tzt, Ttz

    with nogil:
        for i in range(P):
            x = X[i]
            xc = x.conjugate()
            if A[i] < min_det:
                min_det = A[i]
            for j in range(S):
                rj = r[j]
                sr = sqrt(rj)
                w = wt[j]
                for chart in range(2):
                    if chart == 0:
                        H = mk(A[i], x, xc, Y[i] + m[j] * K[i])
                        Ht = mk(zero, zero, zero, m1[j] * sr * K[i])
                        Htb = Ht
                        Httb = mk(zero, zero, zero, (m1[j] + rj * m2[j]) * K[i])
                        sign = 1.0
                    else:
                        H = mk(A[i], sr * x, sr * xc, rj * Y[i] + n[j] * K[i])
                        g = sr * (Y[i] + n1[j] * K[i])
                        Ht = mk(zero, x, zero, g)
                        Htb = mk(zero, zero, xc, g)
                        Httb = mk(zero, zero, zero, Y[i] + (n1[j] + rj * n2[j]) * K[i])
                        sign = -1.0
                    det = H.a * H.d - H.b * H.c
                    dre = det.real
                    if dre < min_det:
                        min_det = dre
                    Hi = mk(H.d / det, -H.b / det, -H.c / det, H.a / det)
                    HiHt = mul(Hi, Ht)
                    Ttt = sub(mul(mul(Hi, Htb), HiHt), mul(Hi, Httb))
                    tau = (Ttt.a + Ttt.d).real
                    I1[i] += sign * w * tau
                    if not want_ch2:
                        continue
                    if chart == 0:
                        Hz = mk(Az[i], Xz[i], Xzb[i].conjugate(), Yz[i] + m[j] * Kz[i])
                        Hzz = mk(Azz[i], Xzz[i], Xzz[i].conjugate(), Yzz[i] + m[j] * Kzz[i])
                        Hztb = mk(zero, zero, zero, m1[j] * sr * Kz[i])
                        Htzb = mk(zero, zero, zero, m1[j] * sr * Kz[i].conjugate())
                    else:
                        Hz = mk(Az[i], sr * Xz[i], sr * Xzb[i].conjugate(),
                                rj * Yz[i] + n[j] * Kz[i])
                        Hzz = mk(Azz[i], sr * Xzz[i], sr * Xzz[i].conjugate(),
                                 rj * Yzz[i] + n[j] * Kzz[i])
                        Hztb = mk(zero, zero, Xzb[i].conjugate(), sr * (Yz[i] + n1[j] * Kz[i]))
                        Htzb = mk(zero, Xzb[i], zero,
                                  sr * (Yz[i].conjugate() + n1[j] * Kz[i].conjugate()))
                    Hzb = dagger(Hz)
                    HiHz = mul(Hi, Hz)
                    Tzz = sub(mul(mul(Hi, Hzb), HiHz), mul(Hi, Hzz))
                    Tzt = sub(mul(mul(Hi, Htb), HiHz), mul(Hi, Hztb))
                    Ttz = sub(mul(mul(Hi, Hzb), HiHt), mul(Hi, Htzb))
                    G = (trprod(Tzz, Ttt) - trprod(Tzt, Ttz)).real
                    I2[i] += sign * w * G
    return out1, out2, min_det
