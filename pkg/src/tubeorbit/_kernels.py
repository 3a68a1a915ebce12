"""Hot numeric kernels with a numba backend and a pure-numpy fallback.

Three kernels dominate runtime:

* ``action_grad`` -- trapezoidal action and its coefficient gradient on the
  uniform grid, called once per optimizer trial point.
* ``action_delta`` -- the change of that action under a coefficient step,
  with the integrand increment expanded so it never cancels against the
  action itself. The line search needs it once the decrease drops below the
  rounding level of the action.
* ``rk4_path`` -- fixed-step classical RK4 over one period, used by every
  shooting check (16384 steps by default).

The backend is chosen once at import time. Set ``TUBEORBIT_NUMBA=0`` to force
the numpy path (numba is also skipped if it cannot be imported). Both
implementations stay importable as ``numpy_impl`` / ``numba_impl`` so the
benchmark and the backend-agreement tests can call them side by side.

Summation order: the numba ``action_grad`` and ``action_delta`` reduce grid
points in increasing index order with plain sequential accumulation, so they
are bitwise reproducible.
The numpy path delegates the reductions to BLAS matrix-vector products, which
are reproducible for a fixed BLAS thread count.
"""

import math
import os
from types import SimpleNamespace

import numpy as np

__all__ = ["BACKEND", "action_grad", "action_delta", "rk4_path", "numpy_impl", "numba_impl"]


def _action_grad_np(S, C, w, t, a, b, omega, k, m, J, g):
    M = t.shape[0]
    h = omega / M
    nu = 2.0 * math.pi * k / omega
    x = S @ a
    xd = C @ (w * a)
    phi = nu * t + S @ b
    phid = nu + C @ (w * b)
    sphi = np.sin(phi)
    inertia = m * x * x + J
    lag = 0.5 * inertia * phid * phid + 0.5 * m * xd * xd - m * g * x * sphi
    dl_dx = m * x * phid * phid - m * g * sphi
    dl_dphi = -m * g * x * np.cos(phi)
    ga = h * (S.T @ dl_dx + w * (C.T @ (m * xd)))
    gb = h * (S.T @ dl_dphi + w * (C.T @ (inertia * phid)))
    return h * lag.sum(), ga, gb


def _action_delta_np(S, C, w, t, a, b, da, db, omega, k, m, J, g):
    M = t.shape[0]
    h = omega / M
    nu = 2.0 * math.pi * k / omega
    x = S @ a
    xd = C @ (w * a)
    phi = nu * t + S @ b
    phid = nu + C @ (w * b)
    dx = S @ da
    dxd = C @ (w * da)
    dphi = S @ db
    dphid = C @ (w * db)
    dlag = (m * xd * dxd + 0.5 * m * dxd * dxd
            + 0.5 * (m * x * x + J) * (2.0 * phid * dphid + dphid * dphid)
            + 0.5 * m * (2.0 * x * dx + dx * dx) * (phid + dphid) ** 2
            - m * g * (dx * np.sin(phi + dphi)
                       + 2.0 * x * np.cos(phi + 0.5 * dphi) * np.sin(0.5 * dphi)))
    return h * dlag.sum()


def _rhs(x, phi, xd, phid, m, J, g):
    xdd = x * phid * phid - g * math.sin(phi)
    phidd = (-2.0 * m * x * xd * phid - m * g * x * math.cos(phi)) / (m * x * x + J)
    return xd, phid, xdd, phidd


def _rk4_np(s0, h, steps, m, J, g):
    out = np.empty((steps + 1, 4))
    x, phi, xd, phid = (float(v) for v in s0)
    out[0] = x, phi, xd, phid
    for n in range(steps):
        k1 = _rhs(x, phi, xd, phid, m, J, g)
        k2 = _rhs(x + 0.5 * h * k1[0], phi + 0.5 * h * k1[1],
                  xd + 0.5 * h * k1[2], phid + 0.5 * h * k1[3], m, J, g)
        k3 = _rhs(x + 0.5 * h * k2[0], phi + 0.5 * h * k2[1],
                  xd + 0.5 * h * k2[2], phid + 0.5 * h * k2[3], m, J, g)
        k4 = _rhs(x + h * k3[0], phi + h * k3[1],
                  xd + h * k3[2], phid + h * k3[3], m, J, g)
        x += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
        phi += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
        xd += h / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
        phid += h / 6.0 * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3])
        out[n + 1] = x, phi, xd, phid
        if not (math.isfinite(x) and math.isfinite(phi)
                and math.isfinite(xd) and math.isfinite(phid)):
            return out, n + 1
    return out, -1


numpy_impl = SimpleNamespace(action_grad=_action_grad_np, action_delta=_action_delta_np,
                             rk4_path=_rk4_np)
numba_impl = None

if os.environ.get("TUBEORBIT_NUMBA", "1") != "0":
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - numba is a declared dependency
        njit = None

    if njit is not None:

        @njit(cache=True)
        def _action_grad_nb(S, C, w, t, a, b, omega, k, m, J, g):
            M, N = S.shape
            h = omega / M
            nu = 2.0 * math.pi * k / omega
            ga = np.zeros(N)
            gb = np.zeros(N)
            total = 0.0
            for i in range(M):
                x = 0.0
                xd = 0.0
                psi = 0.0
                psid = 0.0
                for j in range(N):
                    x += a[j] * S[i, j]
                    xd += w[j] * a[j] * C[i, j]
                    psi += b[j] * S[i, j]
                    psid += w[j] * b[j] * C[i, j]
                phi = nu * t[i] + psi
                phid = nu + psid
                sphi = math.sin(phi)
                inertia = m * x * x + J
                total += 0.5 * inertia * phid * phid + 0.5 * m * xd * xd - m * g * x * sphi
                dl_dx = m * x * phid * phid - m * g * sphi
                dl_dphi = -m * g * x * math.cos(phi)
                px = m * xd
                pphi = inertia * phid
                for j in range(N):
                    ga[j] += dl_dx * S[i, j] + w[j] * px * C[i, j]
                    gb[j] += dl_dphi * S[i, j] + w[j] * pphi * C[i, j]
            for j in range(N):
                ga[j] *= h
                gb[j] *= h
            return h * total, ga, gb

        @njit(cache=True)
        def _action_delta_nb(S, C, w, t, a, b, da, db, omega, k, m, J, g):
            M, N = S.shape
            h = omega / M
            nu = 2.0 * math.pi * k / omega
            total = 0.0
            for i in range(M):
                x = 0.0
                xd = 0.0
                psi = 0.0
                psid = 0.0
                dx = 0.0
                dxd = 0.0
                dphi = 0.0
                dphid = 0.0
                for j in range(N):
                    x += a[j] * S[i, j]
                    xd += w[j] * a[j] * C[i, j]
                    psi += b[j] * S[i, j]
                    psid += w[j] * b[j] * C[i, j]
                    dx += da[j] * S[i, j]
                    dxd += w[j] * da[j] * C[i, j]
                    dphi += db[j] * S[i, j]
                    dphid += w[j] * db[j] * C[i, j]
                phi = nu * t[i] + psi
                phid = nu + psid
                pn = phid + dphid
                total += (m * xd * dxd + 0.5 * m * dxd * dxd
                          + 0.5 * (m * x * x + J) * (2.0 * phid * dphid + dphid * dphid)
                          + 0.5 * m * (2.0 * x * dx + dx * dx) * pn * pn
                          - m * g * (dx * math.sin(phi + dphi)
                                     + 2.0 * x * math.cos(phi + 0.5 * dphi) * math.sin(0.5 * dphi)))
            return h * total

        @njit(cache=True)
        def _rhs_nb(x, phi, xd, phid, m, J, g):
            xdd = x * phid * phid - g * math.sin(phi)
            phidd = (-2.0 * m * x * xd * phid - m * g * x * math.cos(phi)) / (m * x * x + J)
            return xd, phid, xdd, phidd

        @njit(cache=True)
        def _rk4_nb(s0, h, steps, m, J, g):
            out = np.empty((steps + 1, 4))
            x, phi, xd, phid = s0[0], s0[1], s0[2], s0[3]
            out[0, 0] = x
            out[0, 1] = phi
            out[0, 2] = xd
            out[0, 3] = phid
            for n in range(steps):
                k1 = _rhs_nb(x, phi, xd, phid, m, J, g)
                k2 = _rhs_nb(x + 0.5 * h * k1[0], phi + 0.5 * h * k1[1],
                             xd + 0.5 * h * k1[2], phid + 0.5 * h * k1[3], m, J, g)
                k3 = _rhs_nb(x + 0.5 * h * k2[0], phi + 0.5 * h * k2[1],
                             xd + 0.5 * h * k2[2], phid + 0.5 * h * k2[3], m, J, g)
                k4 = _rhs_nb(x + h * k3[0], phi + h * k3[1],
                             xd + h * k3[2], phid + h * k3[3], m, J, g)
                x += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
                phi += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
                xd += h / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
                phid += h / 6.0 * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3])
                out[n + 1, 0] = x
                out[n + 1, 1] = phi
                out[n + 1, 2] = xd
                out[n + 1, 3] = phid
                if not (math.isfinite(x) and math.isfinite(phi)
                        and math.isfinite(xd) and math.isfinite(phid)):
                    return out, n + 1
            return out, -1

        numba_impl = SimpleNamespace(action_grad=_action_grad_nb, action_delta=_action_delta_nb,
                                     rk4_path=_rk4_nb)

_active = numba_impl if numba_impl is not None else numpy_impl
BACKEND = "numba" if numba_impl is not None else "numpy"


def action_grad(S, C, w, t, a, b, omega, k, m, J, g):
    """Return ``(S, dS/da, dS/db)`` on the grid ``t`` with basis tables ``S, C``."""
    return _active.action_grad(S, C, w, t, a, b, float(omega), float(k),
                               float(m), float(J), float(g))


def action_delta(S, C, w, t, a, b, da, db, omega, k, m, J, g):
    """Return ``S(a + da, b + db) - S(a, b)`` without cancellation against ``S``."""
    return _active.action_delta(S, C, w, t, a, b, np.ascontiguousarray(da, dtype=np.float64),
                                np.ascontiguousarray(db, dtype=np.float64), float(omega),
                                float(k), float(m), float(J), float(g))


def rk4_path(s0, h, steps, m, J, g):
    """Integrate ``steps`` RK4 steps of size ``h``; returns ``(states, bad_index)``.

    ``bad_index`` is -1 on success, otherwise the first step whose state is
    non-finite.
    """
    s0 = np.ascontiguousarray(s0, dtype=np.float64)
    return _active.rk4_path(s0, float(h), int(steps), float(m), float(J), float(g))
