"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The numba implementations are used when numba imports cleanly and the
environment variable ``SYMTANH_DISABLE_NUMBA`` is unset (or set to ``0``).
Both implementations stay importable as ``NUMPY_KERNELS`` and
``NUMBA_KERNELS`` so the benchmark and the backend tests can compare them.

All kernels take and return contiguous float64 1-D arrays.
"""

from __future__ import annotations

import math
import os

import numpy as np

__all__ = [
    "BACKEND",
    "NUMBA_KERNELS",
    "NUMPY_KERNELS",
    "caputo_weights",
    "compensated_dot",
    "density_values",
    "symmetrized_values",
]

_DISABLE = os.environ.get("SYMTANH_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")


# ---------------------------------------------------------------------------
# numpy reference implementations
# ---------------------------------------------------------------------------


def _density_np(z, lam, log_q):
    # M(z) = sinh(2 lam) / (2 (cosh(2 lam z - log q) + cosh(2 lam))), divided
    # through by e^{|a|} so nothing overflows for large |z|.
    a = np.abs(2.0 * lam * z - log_q)
    e = np.exp(-a)
    return math.sinh(2.0 * lam) * e / (1.0 + e * e + 2.0 * math.cosh(2.0 * lam) * e)


def _symmetrized_np(z, lam, log_q):
    az = np.abs(z)
    return 0.5 * (_density_np(az, lam, log_q) + _density_np(az, lam, -log_q))


def _compensated_dot_np(a, b):
    return math.fsum((np.asarray(a) * np.asarray(b)).tolist())


def _caputo_weights_np(tau, nu):
    """Product-integration weights of tau**(nu-1) against hat functions on ``tau``."""
    h = np.diff(tau)
    p0 = tau**nu / nu
    p1 = tau ** (nu + 1.0) / (nu + 1.0)
    a = np.diff(p0)  # int tau^(nu-1) over each cell
    b = np.diff(p1)  # int tau^nu over each cell
    left = (tau[1:] * a - b) / h
    right = (b - tau[:-1] * a) / h
    w = np.zeros_like(tau)
    w[:-1] += left
    w[1:] += right
    return w


NUMPY_KERNELS = {
    "density_values": _density_np,
    "symmetrized_values": _symmetrized_np,
    "compensated_dot": _compensated_dot_np,
    "caputo_weights": _caputo_weights_np,
}


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

NUMBA_KERNELS: dict = {}

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is an optional accelerator
    njit = None

if njit is not None:

    @njit(cache=True)
    def _density_nb(z, lam, log_q):
        out = np.empty_like(z)
        s = math.sinh(2.0 * lam)
        c2 = 2.0 * math.cosh(2.0 * lam)
        for i in range(z.size):
            e = math.exp(-abs(2.0 * lam * z[i] - log_q))
            out[i] = s * e / (1.0 + e * e + c2 * e)
        return out

    @njit(cache=True)
    def _symmetrized_nb(z, lam, log_q):
        out = np.empty_like(z)
        s = math.sinh(2.0 * lam)
        c2 = 2.0 * math.cosh(2.0 * lam)
        for i in range(z.size):
            az = abs(z[i])
            e1 = math.exp(-abs(2.0 * lam * az - log_q))
            e2 = math.exp(-abs(2.0 * lam * az + log_q))
            m1 = s * e1 / (1.0 + e1 * e1 + c2 * e1)
            m2 = s * e2 / (1.0 + e2 * e2 + c2 * e2)
            out[i] = 0.5 * (m1 + m2)
        return out

    @njit(cache=True)
    def _compensated_dot_nb(a, b):
        # Neumaier summation of the elementwise products
        total = 0.0
        comp = 0.0
        for i in range(a.size):
            v = a[i] * b[i]
            t = total + v
            if abs(total) >= abs(v):
                comp += (total - t) + v
            else:
                comp += (v - t) + total
            total = t
        return total + comp

    @njit(cache=True)
    def _caputo_weights_nb(tau, nu):
        m = tau.size
        w = np.zeros(m)
        prev0 = tau[0] ** nu / nu
        prev1 = tau[0] ** (nu + 1.0) / (nu + 1.0)
        for i in range(m - 1):
            cur0 = tau[i + 1] ** nu / nu
            cur1 = tau[i + 1] ** (nu + 1.0) / (nu + 1.0)
            a = cur0 - prev0
            b = cur1 - prev1
            h = tau[i + 1] - tau[i]
            w[i] += (tau[i + 1] * a - b) / h
            w[i + 1] += (b - tau[i] * a) / h
            prev0 = cur0
            prev1 = cur1
        return w

    NUMBA_KERNELS = {
        "density_values": _density_nb,
        "symmetrized_values": _symmetrized_nb,
        "compensated_dot": _compensated_dot_nb,
        "caputo_weights": _caputo_weights_nb,
    }


BACKEND = "numba" if (NUMBA_KERNELS and not _DISABLE) else "numpy"
_ACTIVE = NUMBA_KERNELS if BACKEND == "numba" else NUMPY_KERNELS


def density_values(z, lam, log_q):
    return _ACTIVE["density_values"](np.ascontiguousarray(z, dtype=np.float64), float(lam), float(log_q))


def symmetrized_values(z, lam, log_q):
    return _ACTIVE["symmetrized_values"](np.ascontiguousarray(z, dtype=np.float64), float(lam), float(log_q))


def compensated_dot(a, b) -> float:
    return float(
        _ACTIVE["compensated_dot"](
            np.ascontiguousarray(a, dtype=np.float64), np.ascontiguousarray(b, dtype=np.float64)
        )
    )


def caputo_weights(tau, nu):
    return _ACTIVE["caputo_weights"](np.ascontiguousarray(tau, dtype=np.float64), float(nu))
