"""Left and right Caputo derivatives and the fractional Taylor remainder.

The Caputo integral

    D^alpha_{*a} f(t) = 1/Gamma(N - alpha) int_a^t (t - s)^{N - alpha - 1} f^{(N)}(s) ds

is discretised by product integration: ``f^{(N)}`` is replaced by its
piecewise-linear interpolant on a mesh graded toward the weak singularity at
``s = t`` and the power weight is integrated exactly on every cell.  The
scheme is exact whenever ``f^{(N)}`` is affine and second order otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import roots_jacobi

from . import _accel
from .corpus import TestFunction
from .errors import DomainError

__all__ = [
    "CaputoScheme",
    "FractionalOrder",
    "caputo_left",
    "caputo_right",
    "fractional_remainder",
    "taylor_remainder",
]


@dataclass(frozen=True)
class FractionalOrder:
    alpha: float

    def __post_init__(self):
        a = self.alpha
        if not (math.isfinite(a) and a > 0) or float(a).is_integer():
            raise ValueError(f"alpha must be a positive non-integer real, got {a!r}")
        object.__setattr__(self, "alpha", float(a))

    @property
    def N(self) -> int:
        return math.ceil(self.alpha)

    @property
    def nu(self) -> float:
        """Exponent ``N - alpha`` of the Caputo kernel, in (0, 1)."""
        return self.N - self.alpha


@dataclass(frozen=True)
class CaputoScheme:
    mesh_points: int = 1024
    grading_exponent: float = 2.0

    def __post_init__(self):
        if int(self.mesh_points) != self.mesh_points or self.mesh_points < 16:
            raise ValueError(f"mesh_points must be an integer >= 16, got {self.mesh_points!r}")
        if not self.grading_exponent >= 1.0:
            raise ValueError(f"grading_exponent must be >= 1, got {self.grading_exponent!r}")
        object.__setattr__(self, "mesh_points", int(self.mesh_points))


def _graded_offsets(length: float, scheme: CaputoScheme) -> np.ndarray:
    # distances from the singular endpoint, clustered near zero
    u = np.linspace(0.0, 1.0, scheme.mesh_points + 1)
    return length * u**scheme.grading_exponent


def _power_integral(g, length: float, order: FractionalOrder, scheme: CaputoScheme) -> float:
    """``int_0^length tau^(nu-1) g(tau) d tau / Gamma(nu)`` by product integration."""
    tau = _graded_offsets(length, scheme)
    values = np.asarray(g(tau), dtype=np.float64)
    weights = _accel.caputo_weights(tau, order.nu)
    return _accel.compensated_dot(weights, values) / math.gamma(order.nu)


def caputo_left(f: TestFunction, order: FractionalOrder, anchor: float, t: float, scheme: CaputoScheme = CaputoScheme()) -> float:
    """Left Caputo derivative ``D^alpha_{*anchor} f(t)`` for ``t >= anchor``."""
    dn = f.derivative(order.N)
    anchor, t = float(anchor), float(t)
    if t < anchor:
        raise DomainError(f"left Caputo derivative needs t >= anchor (t={t}, anchor={anchor})")
    if t == anchor:
        return 0.0
    return _power_integral(lambda tau: dn(t - tau), t - anchor, order, scheme)


def caputo_right(f: TestFunction, order: FractionalOrder, anchor: float, t: float, scheme: CaputoScheme = CaputoScheme()) -> float:
    """Right Caputo derivative ``D^alpha_{anchor-} f(t)`` for ``t <= anchor``.

    Uses the convention with the ``(-1)^N`` factor, under which
    ``D^alpha_{b-} (b - t)^p = Gamma(p+1)/Gamma(p+1-alpha) (b - t)^(p-alpha)``.
    """
    dn = f.derivative(order.N)
    anchor, t = float(anchor), float(t)
    if t > anchor:
        raise DomainError(f"right Caputo derivative needs t <= anchor (t={t}, anchor={anchor})")
    if t == anchor:
        return 0.0
    sign = -1.0 if order.N % 2 else 1.0
    return sign * _power_integral(lambda tau: dn(t + tau), anchor - t, order, scheme)


def taylor_remainder(f: TestFunction, N: int, x: float, y: float) -> float:
    """``f(y) - sum_{j<N} f^(j)(x) (y-x)^j / j!``, evaluated directly."""
    h = float(y) - float(x)
    if h == 0.0:
        return 0.0
    terms = [f.derivative(j)(x) * h**j / math.factorial(j) for j in range(N)]
    return float(f(y)) - math.fsum(terms)


def _remainder_integral(f, order, x, y, scheme, nodes):
    # Gauss-Jacobi absorbs both endpoint singularities: (y-t)^(alpha-1) from
    # the Taylor kernel and (t-x)^nu from the Caputo derivative near t = x.
    alpha, nu, big_n = order.alpha, order.nu, order.N
    h = abs(y - x)
    if y > x:
        u, w = roots_jacobi(nodes, alpha - 1.0, nu)
        ts = x + h * (1.0 + u) / 2.0
        dvals = np.array([caputo_left(f, order, x, t, scheme) for t in ts])
        smooth = dvals / (ts - x) ** nu
    else:
        u, w = roots_jacobi(nodes, nu, alpha - 1.0)
        ts = y + h * (1.0 + u) / 2.0
        dvals = np.array([caputo_right(f, order, x, t, scheme) for t in ts])
        smooth = dvals / (x - ts) ** nu
    return (h / 2.0) ** big_n * _accel.compensated_dot(w, smooth) / math.gamma(alpha)


def fractional_remainder(
    f: TestFunction,
    order: FractionalOrder,
    x: float,
    y: float,
    scheme: CaputoScheme = CaputoScheme(),
    form: str = "difference",
    nodes: int = 24,
) -> float:
    """Fractional Taylor remainder of ``f`` at ``y`` around ``x``.

    ``form="difference"`` returns the exact left-hand difference
    ``f(y) - sum_{j<N} f^(j)(x) (y-x)^j / j!``.  ``form="integral"`` evaluates

        1/Gamma(alpha) int_x^y (y - t)^(alpha-1) D^alpha_{*x} f(t) dt      (y > x)
        1/Gamma(alpha) int_y^x (t - y)^(alpha-1) D^alpha_{x-} f(t) dt      (y < x)

    with numerically computed Caputo derivatives, for cross-validation.
    """
    f.derivative(order.N)  # OrderUnavailable early
    x, y = float(x), float(y)
    if y == x:
        return 0.0
    if form == "difference":
        return taylor_remainder(f, order.N, x, y)
    if form == "integral":
        return _remainder_integral(f, order, x, y, scheme, nodes)
    raise ValueError(f"form must be 'difference' or 'integral', got {form!r}")
