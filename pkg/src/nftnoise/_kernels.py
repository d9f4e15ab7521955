"""Compiled transfer-matrix sweeps for the Zakharov-Shabat problem.

All sweeps act on ``w = exp(j*lam*t_start) * v`` so that the left boundary
condition is simply ``w = (1, 0)``.  A negative ``dt`` walks the grid
backwards with the inverse step matrix (both schemes are unimodular).
"""
import numpy as np
from numba import njit

FORWARD_DIFFERENCE = 0
ABLOWITZ_LADIK = 1

# |k*dt|^2 below this uses the truncated series for cosh/sinh
_SERIES_LIMIT = 0.05


@njit(cache=True)
def _fd_coeffs(lam, q2, dt):
    x = (-lam * lam - q2) * dt * dt
    if abs(x) < _SERIES_LIMIT:
        c = 1.0 + x * (0.5 + x * (1.0 / 24 + x * (1.0 / 720 + x * (1.0 / 40320))))
        s = dt * (1.0 + x * (1.0 / 6 + x * (1.0 / 120 + x * (1.0 / 5040 + x * (1.0 / 362880)))))
    else:
        k = np.sqrt(-lam * lam - q2 + 0j)
        c = np.cosh(k * dt)
        s = np.sinh(k * dt) / k
    return c, s


@njit(cache=True)
def sweep(q, dt, lam, w1, w2, start, stop, method):
    """Apply step matrices for samples ``start..stop-1`` (reversed if dt < 0)."""
    if dt > 0:
        first, last, inc = start, stop, 1
    else:
        first, last, inc = stop - 1, start - 1, -1
    z = np.exp(-1j * lam * dt)
    zi = 1.0 / z
    n = first
    while n != last:
        qn = q[n]
        if method == FORWARD_DIFFERENCE:
            c, s = _fd_coeffs(lam, qn.real * qn.real + qn.imag * qn.imag, dt)
            d = 1j * lam * s
            qs = qn * s
            n1 = (c - d) * w1 + qs * w2
            n2 = -np.conj(qs) * w1 + (c + d) * w2
        else:
            Q = qn * dt
            g = 1.0 / np.sqrt(1.0 + Q.real * Q.real + Q.imag * Q.imag)
            n1 = g * (z * w1 + Q * w2)
            n2 = g * (-np.conj(Q) * w1 + zi * w2)
        w1 = n1
        w2 = n2
        n += inc
    return w1, w2


@njit(cache=True)
def scatter(q, dt, t_start, lam, method):
    """Return ``(a, b)`` from a single left-to-right sweep."""
    w1, w2 = sweep(q, dt, lam, 1.0 + 0j, 0j, 0, q.size, method)
    length = q.size * dt
    a = w1 * np.exp(1j * lam * length)
    b = w2 * np.exp(-1j * lam * (2 * t_start + length))
    return a, b


@njit(cache=True)
def a_many(q, dt, lams, method):
    """``a(lam)`` for every entry of ``lams`` (NaN where the sweep overflows)."""
    out = np.empty(lams.size, dtype=np.complex128)
    length = q.size * dt
    for i in range(lams.size):
        lam = lams[i]
        w1, w2 = sweep(q, dt, lam, 1.0 + 0j, 0j, 0, q.size, method)
        out[i] = w1 * np.exp(1j * lam * length)
    return out


@njit(cache=True)
def newton(q, dt, lam0, h_rel, tol, max_iter, method):
    """Newton iteration on a(lam) with a central-difference derivative.

    Returns ``(lam, |a|, iterations, status)``; status 0 converged,
    1 max_iter reached, 2 non-finite / zero derivative.
    """
    length = q.size * dt
    lam = lam0
    for it in range(max_iter + 1):
        if not (np.isfinite(lam.real) and np.isfinite(lam.imag) and abs(lam) < 1e3):
            return lam, np.inf, it, 2
        h = h_rel * (1.0 + abs(lam))
        w1, w2 = sweep(q, dt, lam, 1.0 + 0j, 0j, 0, q.size, method)
        a0 = w1 * np.exp(1j * lam * length)
        if not (np.isfinite(a0.real) and np.isfinite(a0.imag)):
            return lam, np.inf, it, 2
        if abs(a0) < tol:
            return lam, abs(a0), it, 0
        if it == max_iter:
            break
        w1, w2 = sweep(q, dt, lam + h, 1.0 + 0j, 0j, 0, q.size, method)
        ap = w1 * np.exp(1j * (lam + h) * length)
        w1, w2 = sweep(q, dt, lam - h, 1.0 + 0j, 0j, 0, q.size, method)
        am = w1 * np.exp(1j * (lam - h) * length)
        da = (ap - am) / (2 * h)
        if abs(da) == 0.0 or not (np.isfinite(da.real) and np.isfinite(da.imag)):
            return lam, abs(a0), it, 2
        lam = lam - a0 / da
    return lam, abs(a0), max_iter, 1


@njit(cache=True)
def newton_deflated(q, dt, lam0, known, h_rel, tol, max_iter, method):
    """Newton on ``a(lam) * prod (lam - conj(r)) / (lam - r)`` over ``known`` roots r.

    The deflated function keeps the remaining zeros of ``a`` but not the known
    ones, so seeds near an already-found root are pushed to a new one.
    Convergence is judged on ``|a|`` itself.  Same return as :func:`newton`;
    iterates leaving the upper half plane or ``|lam| > 1e3`` fail with status 2.
    """
    length = q.size * dt
    lam = lam0
    a_abs = np.inf
    for it in range(max_iter + 1):
        if not (lam.imag > 0.0 and abs(lam) < 1e3):
            return lam, a_abs, it, 2
        h = h_rel * (1.0 + abs(lam))
        w1, w2 = sweep(q, dt, lam, 1.0 + 0j, 0j, 0, q.size, method)
        a0 = w1 * np.exp(1j * lam * length)
        if not (np.isfinite(a0.real) and np.isfinite(a0.imag)):
            return lam, np.inf, it, 2
        a_abs = abs(a0)
        if a_abs < tol:
            return lam, a_abs, it, 0
        if it == max_iter:
            break
        w1, w2 = sweep(q, dt, lam + h, 1.0 + 0j, 0j, 0, q.size, method)
        ap = w1 * np.exp(1j * (lam + h) * length)
        w1, w2 = sweep(q, dt, lam - h, 1.0 + 0j, 0j, 0, q.size, method)
        am = w1 * np.exp(1j * (lam - h) * length)
        logd = (ap - am) / (2 * h) / a0
        for r in known:
            d1 = lam - r
            d2 = lam - np.conj(r)
            if abs(d1) < 1e-12 or abs(d2) < 1e-12:
                return lam, a_abs, it, 2
            logd -= 1.0 / d1 - 1.0 / d2
        if not (np.isfinite(logd.real) and np.isfinite(logd.imag)) or abs(logd) == 0.0:
            return lam, a_abs, it, 2
        lam = lam - 1.0 / logd
    return lam, a_abs, max_iter, 1
