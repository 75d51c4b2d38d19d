"""Compiled Dirichlet-polynomial kernels over arithmetic tau grids.

Every kernel computes  sum_n c_n * exp(-i * tau_j * log n)  for
tau_j = tau0 + j * dtau.  The per-term phase advances by the rotation
exp(-i * dtau * log n) and is re-anchored by direct evaluation every
ANCHOR steps of the *global* grid index.  A sub-range that starts between
anchors first rotates forward from the preceding anchor, so every entry is
bit-identical however the grid is partitioned.
"""
import numpy as np
from numba import njit

ANCHOR = 1024


@njit(cache=True, nogil=True)
def dirichlet_grid(logn, coef, tau0, dtau, j0, count):
    """Kahan-compensated sum over terms for grid indices j0 .. j0+count-1."""
    acc_re = np.zeros(count)
    acc_im = np.zeros(count)
    cmp_re = np.zeros(count)
    cmp_im = np.zeros(count)
    for m in range(logn.shape[0]):
        ln = logn[m]
        c = coef[m]
        if c == 0:
            continue
        rot = np.exp(-1j * dtau * ln)
        cur = 0j
        for j in range(count):
            g = j0 + j
            if g % ANCHOR == 0:
                cur = c * np.exp(-1j * (tau0 + g * dtau) * ln)
            elif j == 0:
                a = g - g % ANCHOR
                cur = c * np.exp(-1j * (tau0 + a * dtau) * ln)
                for _ in range(g - a):
                    cur = cur * rot
            y = cur.real - cmp_re[j]
            t = acc_re[j] + y
            cmp_re[j] = (t - acc_re[j]) - y
            acc_re[j] = t
            y = cur.imag - cmp_im[j]
            t = acc_im[j] + y
            cmp_im[j] = (t - acc_im[j]) - y
            acc_im[j] = t
            cur = cur * rot
    return acc_re + 1j * acc_im


@njit(cache=True, nogil=True)
def dirichlet_point(logn, coef, tau):
    """Single-point Kahan sum of coef_n * exp(-i tau log n)."""
    s_re = 0.0
    s_im = 0.0
    c_re = 0.0
    c_im = 0.0
    for m in range(logn.shape[0]):
        v = coef[m] * np.exp(-1j * tau * logn[m])
        y = v.real - c_re
        t = s_re + y
        c_re = (t - s_re) - y
        s_re = t
        y = v.imag - c_im
        t = s_im + y
        c_im = (t - s_im) - y
        s_im = t
    return s_re + 1j * s_im


@njit(cache=True, nogil=True)
def power_sum(sigma, t, nmax):
    """Kahan sum of n^-(sigma + i t) for n = 1 .. nmax."""
    s_re = 0.0
    s_im = 0.0
    c_re = 0.0
    c_im = 0.0
    for n in range(1, nmax + 1):
        ln = np.log(n)
        mag = np.exp(-sigma * ln)
        ang = -t * ln
        vr = mag * np.cos(ang)
        vi = mag * np.sin(ang)
        y = vr - c_re
        tt = s_re + y
        c_re = (tt - s_re) - y
        s_re = tt
        y = vi - c_im
        tt = s_im + y
        c_im = (tt - s_im) - y
        s_im = tt
    return s_re + 1j * s_im
