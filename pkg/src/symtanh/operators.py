"""Lattice neural-network operators built on the tanh kernels.

Every operator has the form

    Op_n(f, x) = sum_k  sample_k(f) * K(n x - k)

and differs only in how ``sample_k`` reads ``f`` near ``k / n``:

* ``basic``        point value ``f(k/n)``
* ``kantorovich``  cell average ``n * int_0^{1/n} f(t + k/n) dt`` (Gauss-Legendre)
* ``quadrature``   ``sum_r w_r f(k/n + r/(n theta))`` for ``r = 1..theta``

The lattice is truncated to ``k = round(n x) + [-R, R]`` with ``R`` from
:func:`kernel_decay_radius`.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import _accel
from .errors import OrderTooHigh
from .kernel import KERNELS, ActivationParams, KernelEvalPolicy, kernel_decay_radius, kernel_values

__all__ = [
    "MAX_MOMENT_ORDER",
    "OPERATOR_KINDS",
    "OperatorSpec",
    "apply",
    "apply_basic",
    "apply_kantorovich",
    "apply_quadrature",
    "moment",
]

OPERATOR_KINDS = ("basic", "kantorovich", "quadrature")
MAX_MOMENT_ORDER = 12
DEFAULT_QUAD_WEIGHTS = (1 / 3, 1 / 3, 1 / 3)


@dataclass(frozen=True)
class OperatorSpec:
    kind: str = "basic"
    n: int = 16
    inner_quadrature_points: int = 8
    quad_weights: tuple = DEFAULT_QUAD_WEIGHTS
    policy: KernelEvalPolicy = field(default_factory=KernelEvalPolicy)
    kernel: str = "symmetrized"

    def __post_init__(self):
        if self.kind not in OPERATOR_KINDS:
            raise ValueError(f"kind must be one of {OPERATOR_KINDS}, got {self.kind!r}")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        if int(self.inner_quadrature_points) != self.inner_quadrature_points or self.inner_quadrature_points < 2:
            raise ValueError(f"inner_quadrature_points must be an integer >= 2, got {self.inner_quadrature_points!r}")
        w = tuple(float(v) for v in self.quad_weights)
        if not w or any(v < 0 or not math.isfinite(v) for v in w) or abs(math.fsum(w) - 1.0) > 1e-12:
            raise ValueError(f"quad_weights must be nonempty, nonnegative and sum to 1, got {self.quad_weights!r}")
        if self.kernel not in KERNELS:
            raise ValueError(f"kernel must be one of {KERNELS}, got {self.kernel!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "inner_quadrature_points", int(self.inner_quadrature_points))
        object.__setattr__(self, "quad_weights", w)


@functools.lru_cache(maxsize=64)
def _gauss_legendre(m: int):
    return np.polynomial.legendre.leggauss(m)


def _cell_rule(spec: OperatorSpec):
    """Offsets from ``k/n`` and weights of the per-lattice-site sampling rule."""
    n = spec.n
    if spec.kind == "basic":
        return np.zeros(1), np.ones(1)
    if spec.kind == "kantorovich":
        xi, w = _gauss_legendre(spec.inner_quadrature_points)
        return (xi + 1.0) / (2.0 * n), w / 2.0
    theta = len(spec.quad_weights)
    return np.arange(1, theta + 1) / (n * theta), np.asarray(spec.quad_weights)


def _lattice(p: ActivationParams, spec: OperatorSpec, x: float):
    radius = kernel_decay_radius(p, spec.policy, spec.kernel)
    center = int(np.rint(spec.n * x))
    k = np.arange(center - radius, center + radius + 1, dtype=np.float64)
    return k, kernel_values(p, spec.n * x - k, spec.kernel)


def _evaluate(p: ActivationParams, spec: OperatorSpec, sample: Callable, x: float) -> float:
    x = float(x)
    k, weights = _lattice(p, spec, x)
    offsets, node_w = _cell_rule(spec)
    points = k[:, None] / spec.n + offsets[None, :]
    values = np.asarray(sample(points), dtype=np.float64).reshape(points.shape)
    return _accel.compensated_dot(values @ node_w, weights)


def apply(p: ActivationParams, spec: OperatorSpec, f: Callable, x: float) -> float:
    """Evaluate the operator named by ``spec.kind`` on ``f`` at ``x``."""
    return _evaluate(p, spec, f, x)


def _require(spec: OperatorSpec, kind: str):
    if spec.kind != kind:
        raise ValueError(f"spec.kind is {spec.kind!r}, expected {kind!r}")


def apply_basic(p: ActivationParams, spec: OperatorSpec, f: Callable, x: float) -> float:
    """``sum_k f(k/n) K(n x - k)``."""
    _require(spec, "basic")
    return _evaluate(p, spec, f, x)


def apply_kantorovich(p: ActivationParams, spec: OperatorSpec, f: Callable, x: float) -> float:
    _require(spec, "kantorovich")
    return _evaluate(p, spec, f, x)


def apply_quadrature(p: ActivationParams, spec: OperatorSpec, f: Callable, x: float) -> float:
    _require(spec, "quadrature")
    return _evaluate(p, spec, f, x)


def moment(p: ActivationParams, spec: OperatorSpec, j: int, x: float) -> float:
    """The operator applied to ``t -> (t - x)^j``, evaluated at ``x``.

    Raises :class:`OrderTooHigh` for ``j > 12``.
    """
    if int(j) != j or j < 0:
        raise ValueError(f"moment order must be a nonnegative integer, got {j!r}")
    if j > MAX_MOMENT_ORDER:
        raise OrderTooHigh(f"moment order {j} exceeds {MAX_MOMENT_ORDER}")
    x = float(x)
    j = int(j)
    return _evaluate(p, spec, lambda t: (t - x) ** j, x)
