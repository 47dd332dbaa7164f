"""Perturbed tanh activation, its density kernel and the symmetrized kernel.

The activation is

    g(x) = (e^{lam x} - q e^{-lam x}) / (e^{lam x} + q e^{-lam x})
         = tanh(lam x - log(q)/2),

so every quantity here is evaluated through the shifted-tanh form, which is
overflow free for any ``lam * x``.  The density is

    M_q(x) = (g(x + 1) - g(x - 1)) / 4
           = sinh(2 lam) / (2 (cosh(2 lam x - log q) + cosh(2 lam)))

and the symmetrized kernel averages ``M_q`` and ``M_{1/q}``.

All functions accept scalars or arrays and return the same shape.
"""

from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import _accel
from .errors import RadiusCapped

__all__ = [
    "ActivationParams",
    "KernelEvalPolicy",
    "KERNELS",
    "activation",
    "activation_dq",
    "activation_dx",
    "activation_dxx",
    "density",
    "density_dq",
    "kernel_decay_radius",
    "kernel_values",
    "symmetrized_kernel",
    "symmetrized_kernel_dq",
]

KERNELS = ("symmetrized", "density")


@dataclass(frozen=True)
class ActivationParams:
    """Deformation ``q`` and steepness ``lam`` of the perturbed tanh."""

    q: float = 1.0
    lam: float = 1.0

    def __post_init__(self):
        for name in ("q", "lam"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float, np.floating, np.integer)) and math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be a finite positive real, got {v!r}")
        object.__setattr__(self, "q", float(self.q))
        object.__setattr__(self, "lam", float(self.lam))

    @property
    def shift(self) -> float:
        """Center of the activation's inflection, ``log(q) / (2 lam)``."""
        return math.log(self.q) / (2.0 * self.lam)

    def reciprocal(self) -> ActivationParams:
        return ActivationParams(1.0 / self.q, self.lam)


@dataclass(frozen=True)
class KernelEvalPolicy:
    truncation_tol: float = 1e-14
    max_radius: int = 200

    def __post_init__(self):
        if not (0.0 < self.truncation_tol < 1.0):
            raise ValueError(f"truncation_tol must lie in (0, 1), got {self.truncation_tol!r}")
        if int(self.max_radius) != self.max_radius or self.max_radius < 4:
            raise ValueError(f"max_radius must be an integer >= 4, got {self.max_radius!r}")
        object.__setattr__(self, "max_radius", int(self.max_radius))


def _shape_like(x, values):
    if np.ndim(x) == 0:
        return float(values.reshape(-1)[0])
    return values.reshape(np.shape(x))


def _sech2(a):
    e = np.exp(-2.0 * np.abs(a))
    return 4.0 * e / (1.0 + e) ** 2


def _arg(p: ActivationParams, x):
    return p.lam * np.asarray(x, dtype=np.float64) - 0.5 * math.log(p.q)


def activation(p: ActivationParams, x):
    """Perturbed tanh ``g_{q,lam}(x)``; values lie in (-1, 1)."""
    return _shape_like(x, np.tanh(np.atleast_1d(_arg(p, x))))


def activation_dx(p: ActivationParams, x):
    """First derivative in ``x``: ``4 lam q / (e^{lam x} + q e^{-lam x})^2``.

    Equivalently ``lam * sech^2(lam x - log(q)/2)``; strictly positive.
    """
    return _shape_like(x, p.lam * _sech2(np.atleast_1d(_arg(p, x))))


def activation_dxx(p: ActivationParams, x):
    """Second derivative in ``x``.

    Closed form ``8 lam^2 q e^{2 lam x} (q - e^{2 lam x}) / (e^{2 lam x} + q)^3``;
    it vanishes exactly at ``x = log(q) / (2 lam)`` and is negative beyond.
    """
    a = np.atleast_1d(_arg(p, x))
    return _shape_like(x, -2.0 * p.lam**2 * _sech2(a) * np.tanh(a))


def activation_dq(p: ActivationParams, x):
    """Derivative in ``q``: ``-2 / (e^{lam x} + q e^{-lam x})^2``, always negative."""
    a = np.atleast_1d(_arg(p, x))
    return _shape_like(x, -_sech2(a) / (2.0 * p.q))


def density(p: ActivationParams, x):
    """Density ``M_{q,lam}(x) = (g(x+1) - g(x-1)) / 4``; positive, unit mass."""
    z = np.atleast_1d(np.asarray(x, dtype=np.float64)).ravel()
    return _shape_like(x, _accel.density_values(z, p.lam, math.log(p.q)))


def symmetrized_kernel(p: ActivationParams, x):
    """Even kernel ``(M_{q,lam}(x) + M_{1/q,lam}(x)) / 2``."""
    z = np.atleast_1d(np.asarray(x, dtype=np.float64)).ravel()
    return _shape_like(x, _accel.symmetrized_values(z, p.lam, math.log(p.q)))


def density_dq(p: ActivationParams, x):
    x = np.asarray(x, dtype=np.float64)
    return 0.25 * (np.asarray(activation_dq(p, x + 1.0)) - np.asarray(activation_dq(p, x - 1.0)))


def symmetrized_kernel_dq(p: ActivationParams, x):
    """``d/dq`` of the symmetrized kernel.

    The ``1/q`` half enters through ``d(1/q)/dq = -1/q^2``.  Because the kernel
    is invariant under ``q -> 1/q`` this derivative is identically zero at
    ``q = 1``.
    """
    return 0.5 * (density_dq(p, x) - density_dq(p.reciprocal(), x) / p.q**2)


def kernel_values(p: ActivationParams, z, kernel: str = "symmetrized"):
    """Evaluate the named lattice kernel ("symmetrized" or "density") on an array."""
    if kernel == "symmetrized":
        return _accel.symmetrized_values(z, p.lam, math.log(p.q))
    if kernel == "density":
        return _accel.density_values(z, p.lam, math.log(p.q))
    raise ValueError(f"unknown kernel {kernel!r}; expected one of {KERNELS}")


def kernel_decay_radius(
    p: ActivationParams, policy: KernelEvalPolicy = KernelEvalPolicy(), kernel: str = "symmetrized"
) -> int:
    """Smallest integer ``R >= 1`` with ``K(z) < tol`` for every ``|z| >= R``.

    Both kernels are bumps of ``M_1`` centred within ``|z| <= |shift|`` and
    decrease monotonically outside that band, so beyond it the sup over
    ``|z| >= R`` is attained at ``z = +-R``.  Inside the band the kernel is
    sampled densely.  Emits :class:`RadiusCapped` and returns ``max_radius``
    when the tolerance is not reached.
    """
    radius, capped = _decay_radius(p, policy, kernel)
    if capped:
        warnings.warn(
            f"kernel tail above {policy.truncation_tol:g} at max_radius={policy.max_radius} "
            f"(q={p.q:g}, lam={p.lam:g})",
            RadiusCapped,
            stacklevel=2,
        )
    return radius


@functools.lru_cache(maxsize=1024)
def _decay_radius(p: ActivationParams, policy: KernelEvalPolicy, kernel: str) -> tuple[int, bool]:
    tol = policy.truncation_tol
    s = abs(p.shift)
    radii = np.arange(1, policy.max_radius + 1, dtype=np.float64)
    edge = np.maximum(kernel_values(p, radii, kernel), kernel_values(p, -radii, kernel))
    for r, v in zip(radii, edge):
        if v >= tol:
            continue
        if r < s:
            band = np.linspace(r, s, 257)
            band = np.concatenate([band, -band])
            if kernel_values(p, band, kernel).max() >= tol:
                continue
        return int(r), False
    return policy.max_radius, True
