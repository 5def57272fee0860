"""Hot kernels with an optional numba backend.

Set ``ISOFLOW_NO_NUMBA=1`` in the environment to force the pure-numpy
implementations (the selection is made once, at import time).
"""
import os

import numpy as np

try:
    if os.environ.get("ISOFLOW_NO_NUMBA", "").strip() not in ("", "0"):
        raise ImportError("numba disabled by ISOFLOW_NO_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

BACKEND = "numba" if HAVE_NUMBA else "numpy"


def trig_eval_numpy(coeffs, kmin, u):
    """Evaluate rows of trigonometric polynomials at arbitrary points.

    ``coeffs[r, j]`` multiplies ``exp(1j * (kmin + j) * u)``.  Returns an
    array of shape ``(rows, len(u))``.
    """
    k = kmin + np.arange(coeffs.shape[1])
    return coeffs @ np.exp(1j * np.outer(k, u))


def _trig_eval_loops(coeffs, kmin, u):
    rows, nk = coeffs.shape
    m = u.shape[0]
    cr = coeffs.real.copy()
    ci = coeffs.imag.copy()
    c = np.cos(u)
    s = np.sin(u)
    acc_re = np.zeros((rows, m))
    acc_im = np.zeros((rows, m))
    # phasors are advanced outward from k = 0 so the dominant low modes
    # carry the least accumulated rounding; the point loop is innermost
    # so that it vectorises
    j0 = -kmin
    for direction in (1, -1):
        w_re = np.ones(m)
        w_im = np.zeros(m)
        if direction == 1:
            start, stop = j0, nk
        else:
            start, stop = j0 - 1, -1
            for p in range(m):
                w_re[p] = c[p]
                w_im[p] = -s[p]
        for j in range(start, stop, direction):
            for r in range(rows):
                a_re = cr[r, j]
                a_im = ci[r, j]
                for p in range(m):
                    acc_re[r, p] += a_re * w_re[p] - a_im * w_im[p]
                    acc_im[r, p] += a_re * w_im[p] + a_im * w_re[p]
            sd = s * direction
            for p in range(m):
                t = w_re[p] * c[p] - w_im[p] * sd[p]
                w_im[p] = w_re[p] * sd[p] + w_im[p] * c[p]
                w_re[p] = t
    out = np.empty((rows, m), dtype=np.complex128)
    for r in range(rows):
        for p in range(m):
            out[r, p] = complex(acc_re[r, p], acc_im[r, p])
    return out


if HAVE_NUMBA:
    _trig_eval_jit = njit(cache=True, nogil=True)(_trig_eval_loops)

    def trig_eval(coeffs, kmin, u):
        return _trig_eval_jit(
            np.ascontiguousarray(coeffs, dtype=np.complex128),
            int(kmin),
            np.ascontiguousarray(u, dtype=np.float64),
        )

else:
    trig_eval = trig_eval_numpy


def pchip_eval_numpy(x, y, xq):
    """Monotone piecewise-cubic (PCHIP) interpolation of ``y(x)`` at ``xq``."""
    from scipy.interpolate import PchipInterpolator

    return PchipInterpolator(x, y)(xq)


def _pchip_edge(h0, h1, m0, m1):
    d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1)
    if d * m0 <= 0.0:
        return 0.0
    if m0 * m1 <= 0.0 and abs(d) > abs(3.0 * m0):
        return 3.0 * m0
    return d


def _pchip_loops(x, y, xq):
    n = x.shape[0]
    h = np.empty(n - 1)
    m = np.empty(n - 1)
    for i in range(n - 1):
        h[i] = x[i + 1] - x[i]
        m[i] = (y[i + 1] - y[i]) / h[i]
    d = np.empty(n)
    # Fritsch-Butland weighted harmonic mean, same rule as scipy's PCHIP
    for i in range(1, n - 1):
        if m[i - 1] * m[i] <= 0.0:
            d[i] = 0.0
        else:
            w1 = 2.0 * h[i] + h[i - 1]
            w2 = h[i] + 2.0 * h[i - 1]
            d[i] = (w1 + w2) / (w1 / m[i - 1] + w2 / m[i])
    d[0] = _pchip_edge(h[0], h[1], m[0], m[1])
    d[n - 1] = _pchip_edge(h[n - 2], h[n - 3], m[n - 2], m[n - 3])
    out = np.empty(xq.shape[0])
    i = 0
    for q in range(xq.shape[0]):
        xv = xq[q]
        # xq is sorted in every call site; fall back to a search if not
        if xv < x[i]:
            i = 0
        while i < n - 2 and xv > x[i + 1]:
            i += 1
        t = (xv - x[i]) / h[i]
        t2 = t * t
        t3 = t2 * t
        out[q] = ((2 * t3 - 3 * t2 + 1) * y[i] + (t3 - 2 * t2 + t) * h[i] * d[i]
                  + (-2 * t3 + 3 * t2) * y[i + 1] + (t3 - t2) * h[i] * d[i + 1])
    return out


if HAVE_NUMBA:
    _pchip_edge = njit(cache=True)(_pchip_edge)
    _pchip_jit = njit(cache=True)(_pchip_loops)

    def pchip_eval(x, y, xq):
        return _pchip_jit(np.ascontiguousarray(x, dtype=np.float64),
                          np.ascontiguousarray(y, dtype=np.float64),
                          np.ascontiguousarray(xq, dtype=np.float64))

else:
    pchip_eval = pchip_eval_numpy
