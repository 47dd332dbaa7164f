"""Expansion residuals, empirical rates, q-perturbation sweeps and the
fractional correction term for the Kantorovich operator."""

from __future__ import annotations

import dataclasses
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import numpy as np
from scipy import integrate

from .corpus import TestFunction
from .errors import InsufficientData, WindowTooSmall
from .fractional import CaputoScheme, FractionalOrder, caputo_left
from .kernel import ActivationParams
from .operators import OperatorSpec, apply, moment

__all__ = [
    "FIT_FLOOR",
    "ExpansionReport",
    "StabilityReport",
    "composite_scale",
    "composite_slope",
    "damasclin_correction",
    "damasclin_integral",
    "default_window",
    "expansion_report",
    "kantorovich_rate_check",
    "rate_fit",
    "stability_sweep",
    "voronovskaya_residual",
]

# values at or below this are accumulation noise and are dropped from fits
FIT_FLOOR = 1e-14


@dataclass
class ExpansionReport:
    function_name: str
    kind: str
    x: float
    beta: float
    N: int
    eps: float
    rows: list = field(default_factory=list)  # (n, raw_error, residual)
    fitted_raw_rate: float = math.nan
    fitted_residual_rate: float = math.nan
    composite_raw_slope: Optional[float] = None
    composite_residual_slope: Optional[float] = None

    @property
    def target_rate(self) -> float:
        """``beta (N - eps)``, the order the remainder is claimed to beat."""
        return self.beta * (self.N - self.eps)


@dataclass
class StabilityReport:
    function_name: str
    x: float
    n: int
    kernel: str
    rows: list = field(default_factory=list)  # (delta, |C_n(q=1+delta) - C_n(q=1)|)
    fitted_slope_in_delta: float = math.nan


def _pmap(fn: Callable, items: Sequence, workers: int = 1) -> list:
    if workers <= 1 or len(items) < 2:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _usable(rows):
    xs, ys = [], []
    for a, v in rows:
        if abs(v) > FIT_FLOOR and a > 0:
            xs.append(a)
            ys.append(abs(v))
    if len(xs) < 3:
        raise InsufficientData(f"need at least 3 rows with |value| > {FIT_FLOOR:g}, got {len(xs)}")
    return np.log(np.asarray(xs, dtype=np.float64)), np.log(np.asarray(ys))


def _slope(rows) -> float:
    lx, ly = _usable(rows)
    return float(np.polyfit(lx, ly, 1)[0])


def rate_fit(rows: Iterable) -> float:
    """Decay order: minus the least-squares slope of ``log|value|`` on ``log n``.

    Rows with ``|value| <= 1e-14`` are ignored; raises :class:`InsufficientData`
    when fewer than three remain.
    """
    return -_slope(list(rows))


def composite_scale(n, beta: float):
    """``1/n + 1/n^beta``."""
    n = np.asarray(n, dtype=np.float64)
    return 1.0 / n + n**-beta


def composite_slope(rows: Iterable, beta: float) -> float:
    """Slope of ``log|value|`` against ``log(1/n + 1/n^beta)`` (positive for decay)."""
    rows = list(rows)
    return _slope([(float(composite_scale(n, beta)), v) for n, v in rows])


def _fit_or_nan(fn, *args) -> float:
    try:
        return fn(*args)
    except InsufficientData:
        return math.nan


def voronovskaya_residual(p: ActivationParams, spec: OperatorSpec, f: TestFunction, x: float, N: int) -> tuple[float, float]:
    """``(Op_n f(x) - f(x), that minus sum_{j=1}^N f^(j)(x)/j! * moment_j(x))``."""
    x = float(x)
    for j in range(1, N + 1):
        f.derivative(j)
    raw = apply(p, spec, f, x) - float(f(x))
    terms = []
    for j in range(1, N + 1):
        c = float(f.derivative(j)(x))
        if c != 0.0:
            terms.append(c / math.factorial(j) * moment(p, spec, j, x))
    return raw, raw - math.fsum(terms)


def expansion_report(
    p: ActivationParams,
    spec: OperatorSpec,
    f: TestFunction,
    x: float,
    N: int,
    beta: float,
    eps: float,
    ns: Sequence[int],
    workers: int = 1,
) -> ExpansionReport:
    ns = sorted(int(n) for n in ns)

    def one(n):
        raw, res = voronovskaya_residual(p, dataclasses.replace(spec, n=n), f, x, N)
        return (n, raw, res)

    rows = _pmap(one, ns, workers)
    return ExpansionReport(
        function_name=f.name,
        kind=spec.kind,
        x=float(x),
        beta=beta,
        N=N,
        eps=eps,
        rows=rows,
        fitted_raw_rate=_fit_or_nan(rate_fit, [(n, r) for n, r, _ in rows]),
        fitted_residual_rate=_fit_or_nan(rate_fit, [(n, s) for n, _, s in rows]),
    )


def kantorovich_rate_check(
    p: ActivationParams,
    f: TestFunction,
    x: float,
    N: int,
    beta: float,
    eps: float,
    ns: Sequence[int],
    spec: Optional[OperatorSpec] = None,
    workers: int = 1,
) -> ExpansionReport:
    """Expansion report for the Kantorovich operator plus fits on the
    ``1/n + 1/n^beta`` scale."""
    ns = list(ns)
    if len(ns) < 4 or any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("ns must be strictly ascending with at least 4 entries")
    spec = dataclasses.replace(spec or OperatorSpec(), kind="kantorovich")
    report = expansion_report(p, spec, f, x, N, beta, eps, ns, workers)
    report.composite_raw_slope = _fit_or_nan(composite_slope, [(n, r) for n, r, _ in report.rows], beta)
    report.composite_residual_slope = _fit_or_nan(composite_slope, [(n, s) for n, _, s in report.rows], beta)
    return report


def stability_sweep(
    p_base: ActivationParams,
    spec: OperatorSpec,
    f: TestFunction,
    x: float,
    deltas: Sequence[float],
    kernel: str = "density",
    workers: int = 1,
) -> StabilityReport:
    """Compare the Kantorovich operator at ``q = 1 + delta`` against ``q = 1``.

    ``kernel`` selects the lattice kernel. The default ``"density"`` uses the
    unsymmetrized ``M_q``, whose first-order sensitivity to ``q`` is nonzero.
    The symmetrized kernel is invariant under ``q -> 1/q``, so with
    ``kernel="symmetrized"`` the difference is second order in ``delta``.
    """
    if p_base.q != 1.0:
        raise ValueError(f"stability sweep is anchored at q = 1, got q = {p_base.q}")
    deltas = sorted(float(d) for d in deltas)
    if any(not (0.0 <= d < 0.5) for d in deltas):
        raise ValueError("deltas must lie in [0, 0.5)")
    spec = dataclasses.replace(spec, kind="kantorovich", kernel=kernel)
    base = apply(p_base, spec, f, x)

    def one(d):
        if d == 0.0:
            return (d, 0.0)
        return (d, abs(apply(ActivationParams(1.0 + d, p_base.lam), spec, f, x) - base))

    rows = _pmap(one, deltas, workers)
    return StabilityReport(
        function_name=f.name,
        x=float(x),
        n=spec.n,
        kernel=kernel,
        rows=rows,
        fitted_slope_in_delta=_fit_or_nan(lambda r: -rate_fit(r), rows),
    )


def default_window(p: ActivationParams) -> float:
    """Ten kernel decay lengths plus a margin: ``10 / lam + 5``."""
    return 10.0 / p.lam + 5.0


def damasclin_integral(
    f: TestFunction,
    order: FractionalOrder,
    x: float,
    window: float,
    scheme: CaputoScheme = CaputoScheme(),
) -> float:
    """``1/Gamma(alpha) int_x^{x+window} (D f(t) - D f(x)) (t-x)^(alpha-1) dt``.

    ``D`` is the left Caputo derivative anchored at ``x`` (so ``D f(x) = 0``).
    The substitution ``u = (t - x)^alpha`` turns the weight into ``du / alpha``.
    """
    if not window > 0:
        raise ValueError(f"window must be positive, got {window!r}")
    x = float(x)
    a = order.alpha
    inv = 1.0 / a

    def integrand(u):
        return caputo_left(f, order, x, x + u**inv, scheme) / a

    upper = window**a
    value, _ = integrate.quad(integrand, 0.0, upper, epsabs=1e-13, epsrel=1e-10, limit=200)
    value /= math.gamma(a)
    tail = abs(caputo_left(f, order, x, x + window, scheme) * window ** (a - 1.0)) / math.gamma(a)
    if tail > 1e-10 * abs(value):
        warnings.warn(
            f"integrand at the window edge ({tail:.3g}) is not negligible against the integral ({value:.3g})",
            WindowTooSmall,
            stacklevel=3,
        )
    return value


def damasclin_correction(
    p: ActivationParams,
    spec: OperatorSpec,
    f: TestFunction,
    order: FractionalOrder,
    x: float,
    beta: float,
    eps: float,
    scheme: CaputoScheme = CaputoScheme(),
    window: Optional[float] = None,
) -> float:
    """Fractional correction term for ``C_n``: the truncated integral above
    divided by ``n^{beta (N - eps)}`` with ``N = ceil(alpha)``."""
    if not 0.0 < beta < 1.0:
        raise ValueError(f"beta must lie in (0, 1), got {beta!r}")
    if not 0.0 < eps <= order.N:
        raise ValueError(f"eps must lie in (0, N={order.N}], got {eps!r}")
    if window is None:
        window = default_window(p)
    value = damasclin_integral(f, order, x, window, scheme)
    return value * float(spec.n) ** (-beta * (order.N - eps))
