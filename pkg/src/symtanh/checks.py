"""Randomized kernel property suite used by ``symtanh kernel-check``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from . import kernel as K

__all__ = ["CheckResult", "kernel_property_checks"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    threshold: float
    passed: bool
    mode: str  # "max" (value <= threshold) or "min" (value > threshold)


def _max(name, value, threshold):
    return CheckResult(name, float(value), threshold, bool(value <= threshold), "max")


def _min(name, value, threshold):
    return CheckResult(name, float(value), threshold, bool(value > threshold), "min")


def _fd_rel(exact, fd):
    return float(np.max(np.abs(exact - fd) / np.maximum(np.abs(exact), 1e-300)))


def unit_mass(p: K.ActivationParams, policy: K.KernelEvalPolicy, kernel: str) -> float:
    """Integral of the kernel over ``[-R, R]`` with ``R`` from the decay radius."""
    r = K.kernel_decay_radius(p, policy, kernel)
    fn = (lambda z: K.density(p, z)) if kernel == "density" else (lambda z: K.symmetrized_kernel(p, z))
    # split at the bump centres so quad sees the mass
    s = abs(p.shift)
    cuts = sorted({-float(r), -s, 0.0, s, float(r)})
    total = 0.0
    for a, b in zip(cuts, cuts[1:]):
        if b > a:
            total += integrate.quad(fn, a, b, epsabs=1e-15, epsrel=1e-13, limit=400)[0]
    return total


def partition_sum(p: K.ActivationParams, policy: K.KernelEvalPolicy, kernel: str, x: float) -> float:
    r = K.kernel_decay_radius(p, policy, kernel)
    k = np.arange(math.floor(x) - r - 1, math.floor(x) + r + 2, dtype=np.float64)
    return math.fsum(K.kernel_values(p, x - k, kernel).tolist())


def kernel_property_checks(
    p: K.ActivationParams,
    policy: K.KernelEvalPolicy = K.KernelEvalPolicy(),
    seed: int = 0,
    grid_size: int = 1000,
) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    x = rng.uniform(-10.0, 10.0, grid_size)
    g = K.activation(p, x)
    out = [
        _max("oddness", np.max(np.abs(K.activation(p, -x) + g)), 1e-12),
        _max("reflection", np.max(np.abs(K.activation(p, -x) + K.activation(p.reciprocal(), x))), 1e-12),
        _min("monotonicity", np.min(K.activation_dx(p, x)), 0.0),
        _min("positivity_density", np.min(K.density(p, x)), 0.0),
        _min("positivity_symmetrized", np.min(K.symmetrized_kernel(p, x)), 0.0),
        _max("evenness", np.max(np.abs(K.symmetrized_kernel(p, -x) - K.symmetrized_kernel(p, x))), 1e-12),
        _max("unit_mass_density", abs(unit_mass(p, policy, "density") - 1.0), 1e-8),
        _max("unit_mass_symmetrized", abs(unit_mass(p, policy, "symmetrized") - 1.0), 1e-8),
    ]
    xs = rng.uniform(-50.0, 50.0, 100)
    for kern in ("density", "symmetrized"):
        dev = max(abs(partition_sum(p, policy, kern, v) - 1.0) for v in xs)
        out.append(_max(f"partition_{kern}", dev, 1e-10))

    # derivative consistency on a grid away from the flat tails
    xd = p.shift + rng.uniform(-3.0, 3.0, 200) / p.lam
    h = 1e-5
    fd1 = (K.activation(p, xd + h) - K.activation(p, xd - h)) / (2 * h)
    fd2 = (K.activation_dx(p, xd + h) - K.activation_dx(p, xd - h)) / (2 * h)
    hq = 1e-5 * p.q
    fdq = (
        K.activation(K.ActivationParams(p.q + hq, p.lam), xd) - K.activation(K.ActivationParams(p.q - hq, p.lam), xd)
    ) / (2 * hq)
    # the second derivative changes sign at the shift; compare in absolute terms there
    scale2 = np.maximum(np.abs(K.activation_dxx(p, xd)), 1e-3 * p.lam**2)
    out += [
        _max("dx_vs_fd", _fd_rel(K.activation_dx(p, xd), fd1), 1e-6),
        _max("dxx_vs_fd", float(np.max(np.abs(K.activation_dxx(p, xd) - fd2) / scale2)), 1e-6),
        _max("dq_vs_fd", _fd_rel(K.activation_dq(p, xd), fdq), 1e-6),
    ]
    return out
