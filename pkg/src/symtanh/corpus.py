"""Analytic test functions with exact derivatives and Caputo closed forms."""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

import numpy as np
from numpy.polynomial import Polynomial

from .errors import OrderUnavailable

__all__ = [
    "CorpusEntry",
    "TestFunction",
    "constant",
    "flat",
    "gauss",
    "get_entry",
    "get_function",
    "lorentz",
    "polynomial",
    "power",
    "standard_corpus",
]

Map = Callable[[np.ndarray], np.ndarray]

# bounded-derivative entries get their sup norms from a grid scan on this range
_SCAN = np.linspace(-12.0, 12.0, 240_001)


@dataclass(frozen=True, eq=False)
class TestFunction:
    """A real function with hand-coded derivatives up to ``n_max``.

    ``caputo(alpha, x0, t)`` and ``caputo_right(alpha, x0, t)`` are optional
    closed forms of the left (``t >= x0``) and right (``t <= x0``) Caputo
    derivatives; the right one carries the ``(-1)^N`` factor.
    """

    __test__ = False  # keep pytest from collecting this class

    name: str
    eval: Map
    derivatives: tuple[Map, ...]
    caputo: Optional[Callable[[float, float, np.ndarray], np.ndarray]] = None
    caputo_right: Optional[Callable[[float, float, np.ndarray], np.ndarray]] = None
    sup_norms: Mapping[int, float] = field(default_factory=dict)

    @property
    def n_max(self) -> int:
        return len(self.derivatives)

    def derivative(self, j: int) -> Map:
        if j == 0:
            return self.eval
        if not 1 <= j <= self.n_max:
            raise OrderUnavailable(f"{self.name} provides derivatives up to order {self.n_max}, not {j}")
        return self.derivatives[j - 1]

    def has_derivative(self, j: int) -> bool:
        return 0 <= j <= self.n_max

    def __call__(self, t):
        return self.eval(t)


@dataclass(frozen=True)
class CorpusEntry:
    function: TestFunction
    tags: frozenset
    flat_point: Optional[float] = None  # x0 for the vanishing_derivatives_at tag
    flat_order: int = 0  # derivatives 1..flat_order vanish at flat_point

    @property
    def name(self) -> str:
        return self.function.name


def _vectorized(fn):
    @functools.wraps(fn)
    def wrapper(t):
        out = fn(np.asarray(t, dtype=np.float64))
        return float(out) if np.ndim(out) == 0 else out

    return wrapper


def _scan_sup(maps, orders):
    return {j: float(np.max(np.abs(maps[j](_SCAN)))) for j in orders}


def constant(c: float, name: Optional[str] = None, n_max: int = 8) -> TestFunction:
    return polynomial([c], name or f"const({c:g})", n_max=n_max)


def polynomial(coeffs, name: str, n_max: int = 8) -> TestFunction:
    """Polynomial with ``coeffs`` in increasing degree; exact Caputo forms at any anchor."""
    poly = Polynomial(coeffs)
    derivs = [poly.deriv(j) if j <= poly.degree() else Polynomial([0.0]) for j in range(n_max + 1)]

    def ev(j):
        pj = derivs[j]
        return _vectorized(lambda t: pj(t) + 0.0 * t)

    def caputo_left(alpha, x0, t):
        big_n = math.ceil(alpha)
        t = np.asarray(t, dtype=np.float64)
        if np.any(t < x0):
            raise ValueError("left Caputo closed form needs t >= anchor")
        h = t - x0
        out = np.zeros_like(h)
        for m in range(big_n, poly.degree() + 1):
            out = out + poly.deriv(m)(x0) / math.gamma(m + 1 - alpha) * h ** (m - alpha)
        return float(out) if out.ndim == 0 else out

    def caputo_right(alpha, x0, t):
        big_n = math.ceil(alpha)
        t = np.asarray(t, dtype=np.float64)
        if np.any(t > x0):
            raise ValueError("right Caputo closed form needs t <= anchor")
        h = x0 - t
        out = np.zeros_like(h)
        for m in range(big_n, poly.degree() + 1):
            # f(t) = sum d_m (x0 - t)^m with d_m = (-1)^m f^(m)(x0) / m!
            dm = (-1) ** m * poly.deriv(m)(x0) / math.factorial(m)
            out = out + dm * math.gamma(m + 1) / math.gamma(m + 1 - alpha) * h ** (m - alpha)
        return float(out) if out.ndim == 0 else out

    sups = {j: abs(float(derivs[j].coef[0])) for j in range(n_max + 1) if derivs[j].degree() == 0}
    return TestFunction(
        name=name,
        eval=ev(0),
        derivatives=tuple(ev(j) for j in range(1, n_max + 1)),
        caputo=caputo_left,
        caputo_right=caputo_right,
        sup_norms=sups,
    )


def power(p: int, a: float = 0.0, name: Optional[str] = None, n_max: int = 8) -> TestFunction:
    """``(t - a)^p`` for a nonnegative integer ``p``."""
    if int(p) != p or p < 0:
        raise ValueError("power functions in the corpus use nonnegative integer exponents")
    coeffs = [math.comb(p, m) * (-a) ** (p - m) for m in range(p + 1)]
    return polynomial(coeffs, name or f"power{p}@{a:g}", n_max=n_max)


def _hermite_chain(p0: Polynomial, n_max: int):
    # d/dt [P(t) e^{-t^2}] = (P' - 2 t P) e^{-t^2}
    polys = [p0]
    two_t = Polynomial([0.0, 2.0])
    for _ in range(n_max):
        polys.append(polys[-1].deriv() - two_t * polys[-1])
    return polys


def _gaussian_family(p0: Polynomial, name: str, n_max: int) -> TestFunction:
    polys = _hermite_chain(p0, n_max)
    maps = [_vectorized(lambda t, pj=pj: pj(t) * np.exp(-t * t)) for pj in polys]
    return TestFunction(
        name=name,
        eval=maps[0],
        derivatives=tuple(maps[1:]),
        sup_norms=_scan_sup(maps, range(n_max + 1)),
    )


def gauss(n_max: int = 8) -> TestFunction:
    return _gaussian_family(Polynomial([1.0]), "gauss", n_max)


def flat(order: int, n_max: int = 8) -> TestFunction:
    """``t^(order+1) e^{-t^2}``: derivatives 1..order vanish at 0."""
    return _gaussian_family(Polynomial([0.0] * (order + 1) + [1.0]), f"flat{order}", max(n_max, order + 1))


def lorentz(n_max: int = 8) -> TestFunction:
    """``1 / (1 + t^2)``; f^(j)(t) = (-1)^j j! Im[(t - i)^{-(j+1)}]."""

    def make(j):
        c = (-1) ** j * math.factorial(j)
        return _vectorized(lambda t: c * np.imag((t - 1j) ** (-(j + 1))))

    maps = [make(j) for j in range(n_max + 1)]
    maps[0] = _vectorized(lambda t: 1.0 / (1.0 + t * t))
    return TestFunction(
        name="lorentz",
        eval=maps[0],
        derivatives=tuple(maps[1:]),
        sup_norms=_scan_sup(maps, range(n_max + 1)),
    )


def _trig(name: str, n_max: int) -> TestFunction:
    cycle = [np.sin, np.cos, lambda t: -np.sin(t), lambda t: -np.cos(t)]
    start = 0 if name == "sin" else 1
    maps = [_vectorized(cycle[(start + j) % 4]) for j in range(n_max + 1)]
    return TestFunction(
        name=name,
        eval=maps[0],
        derivatives=tuple(maps[1:]),
        sup_norms={j: 1.0 for j in range(n_max + 1)},
    )


@functools.lru_cache(maxsize=1)
def _registry() -> dict[str, CorpusEntry]:
    bounded = "bounded_derivatives"
    poly_tags = frozenset({"polynomial", "has_caputo_closed_form"})
    entries = [
        CorpusEntry(_trig("sin", 8), frozenset({bounded})),
        CorpusEntry(_trig("cos", 8), frozenset({bounded})),
        CorpusEntry(gauss(), frozenset({bounded})),
        CorpusEntry(lorentz(), frozenset({bounded})),
        CorpusEntry(constant(1.0, "const"), poly_tags | {bounded}),
        CorpusEntry(polynomial([0.0, 1.0], "poly1"), poly_tags),
        CorpusEntry(polynomial([0.0, 0.0, 1.0], "poly2"), poly_tags),
        CorpusEntry(polynomial([0.0, 0.0, 0.0, 1.0], "poly3"), poly_tags),
        CorpusEntry(power(1, 0.5, "power1"), poly_tags),
        CorpusEntry(power(2, 0.5, "power2"), poly_tags),
        CorpusEntry(power(3, 0.5, "power3"), poly_tags),
    ]
    for order in range(1, 5):
        entries.append(
            CorpusEntry(
                flat(order),
                frozenset({bounded, "vanishing_derivatives_at"}),
                flat_point=0.0,
                flat_order=order,
            )
        )
    return {e.name: e for e in entries}


def standard_corpus() -> list[CorpusEntry]:
    return list(_registry().values())


def get_entry(name: str) -> CorpusEntry:
    try:
        return _registry()[name]
    except KeyError:
        raise KeyError(f"unknown corpus function {name!r}; available: {', '.join(_registry())}") from None


def get_function(name: str) -> TestFunction:
    return get_entry(name).function
