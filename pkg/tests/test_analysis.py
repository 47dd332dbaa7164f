from __future__ import annotations

import math
import warnings

import numpy as np
import pytest

from symtanh import analysis as A
from symtanh.corpus import get_function, polynomial, power, standard_corpus
from symtanh.errors import InsufficientData, WindowTooSmall
from symtanh.fractional import CaputoScheme, FractionalOrder, caputo_left
from symtanh.kernel import ActivationParams
from symtanh.operators import OPERATOR_KINDS, OperatorSpec

P1 = ActivationParams()
NS = [2**k for k in range(3, 11)]


# rate fits


def test_rate_fit_examples():
    assert A.rate_fit([(n, n**-2.0) for n in (10, 20, 40, 80)]) == pytest.approx(2.0, abs=1e-12)
    assert A.rate_fit([(n, 3.0 * n**-1.5) for n in (8, 16, 32)]) == pytest.approx(1.5, abs=1e-12)


def test_rate_fit_drops_floor_rows():
    rows = [(10, 1e-2), (20, 2.5e-3), (40, 6.25e-4), (80, 1e-16), (160, 0.0)]
    assert A.rate_fit(rows) == pytest.approx(2.0, abs=1e-12)
    with pytest.raises(InsufficientData):
        A.rate_fit([(10, 1e-3), (20, 1e-15), (40, 0.0)])


def test_composite_slope_on_exact_power():
    beta = 0.6
    rows = [(n, float(A.composite_scale(n, beta)) ** 1.7) for n in NS]
    assert A.composite_slope(rows, beta) == pytest.approx(1.7, abs=1e-12)


# expansion residuals


@pytest.mark.parametrize("kind", OPERATOR_KINDS)
@pytest.mark.parametrize("N", [2, 3])
def test_polynomial_residual_vanishes(kind, N):
    f = polynomial([0.3, -1.0, 0.5, 0.25][: N + 1], f"deg{N}")
    for n in NS:
        _, res = A.voronovskaya_residual(P1, OperatorSpec(kind, n=n), f, 0.3, N)
        assert abs(res) <= 1e-9


@pytest.mark.parametrize("entry", [e for e in standard_corpus() if "vanishing_derivatives_at" in e.tags], ids=lambda e: e.name)
@pytest.mark.parametrize("kind", OPERATOR_KINDS)
def test_flat_point_residual_equals_raw(entry, kind):
    for N in range(1, entry.flat_order + 1):
        for n in (16, 128):
            raw, res = A.voronovskaya_residual(P1, OperatorSpec(kind, n=n), entry.function, entry.flat_point, N)
            assert raw == res


def test_odd_flat_function_is_reproduced_exactly_at_zero():
    # even kernel + odd f: the basic operator returns exactly 0 at the origin
    raw, _ = A.voronovskaya_residual(P1, OperatorSpec("basic", n=64), get_function("flat2"), 0.0, 2)
    assert raw == 0.0


def test_sin_basic_rate():
    rep = A.expansion_report(P1, OperatorSpec("basic"), get_function("sin"), 0.3, 2, 0.7, 0.1, [2**k for k in range(4, 13)])
    assert rep.fitted_residual_rate >= rep.target_rate - 0.25
    assert rep.fitted_residual_rate > rep.fitted_raw_rate
    assert rep.target_rate == pytest.approx(0.7 * 1.9)


@pytest.mark.parametrize("name", ["sin", "cos", "gauss", "lorentz", "flat1", "flat3"])
@pytest.mark.parametrize("kind", OPERATOR_KINDS)
@pytest.mark.parametrize("N", [1, 2, 3])
def test_residual_beats_raw(name, kind, N):
    rep = A.expansion_report(P1, OperatorSpec(kind), get_function(name), 0.3, N, 0.7, 0.1, NS)
    assert rep.fitted_residual_rate >= rep.fitted_raw_rate


def test_worker_pool_is_deterministic():
    f = get_function("lorentz")
    a = A.expansion_report(P1, OperatorSpec("kantorovich"), f, 0.1, 2, 0.7, 0.1, NS, workers=1)
    b = A.expansion_report(P1, OperatorSpec("kantorovich"), f, 0.1, 2, 0.7, 0.1, NS, workers=4)
    assert a.rows == b.rows


# Kantorovich rate check


def test_kantorovich_polynomial_residual():
    rep = A.kantorovich_rate_check(P1, power(2), 0.3, 2, 0.7, 0.1, NS)
    assert max(abs(r) for _, _, r in rep.rows) <= 1e-9
    assert rep.kind == "kantorovich"


def test_kantorovich_gauss_composite_slope():
    rep = A.kantorovich_rate_check(P1, get_function("gauss"), 0.3, 2, 0.7, 0.1, [2**k for k in range(4, 13)])
    assert rep.composite_residual_slope >= 2 - 0.1 - 0.3


def test_kantorovich_sin_raw_first_order():
    rep = A.kantorovich_rate_check(P1, get_function("sin"), 0.3, 2, 0.7, 0.1, [2**k for k in range(4, 13)])
    assert rep.fitted_raw_rate <= 1.1


@pytest.mark.parametrize("ns", [[16, 32, 64], [16, 64, 32, 128], [16, 16, 32, 64]])
def test_kantorovich_ns_validation(ns):
    with pytest.raises(ValueError):
        A.kantorovich_rate_check(P1, get_function("sin"), 0.3, 2, 0.7, 0.1, ns)


# stability


def test_stability_zero_delta():
    rep = A.stability_sweep(P1, OperatorSpec(n=64), get_function("sin"), 0.3, [0.0])
    assert rep.rows == [(0.0, 0.0)]
    assert math.isnan(rep.fitted_slope_in_delta)


def test_stability_first_order_and_monotone():
    deltas = [0.1, 0.05, 0.02, 0.01, 0.005, 0.002, 0.001]
    rep = A.stability_sweep(P1, OperatorSpec(n=64), get_function("sin"), 0.3, deltas)
    assert 0.85 <= rep.fitted_slope_in_delta <= 1.15
    diffs = [d for _, d in rep.rows]
    assert all(b > a for a, b in zip(diffs, diffs[1:]))


@pytest.mark.parametrize("name", [e.name for e in standard_corpus() if e.name != "const"])
@pytest.mark.parametrize("n", [32, 256])
def test_stability_slope_across_corpus(name, n):
    rep = A.stability_sweep(P1, OperatorSpec(n=n), get_function(name), 0.3, [0.1, 0.03, 0.01, 0.003, 0.001])
    assert 0.8 <= rep.fitted_slope_in_delta <= 1.2


def test_stability_symmetrized_kernel_is_second_order():
    rep = A.stability_sweep(
        P1, OperatorSpec(n=64), get_function("sin"), 0.3, [0.1, 0.03, 0.01, 0.003, 0.001], kernel="symmetrized"
    )
    assert 1.8 <= rep.fitted_slope_in_delta <= 2.2


def test_stability_validation():
    with pytest.raises(ValueError):
        A.stability_sweep(ActivationParams(2.0, 1.0), OperatorSpec(), get_function("sin"), 0.3, [0.1])
    with pytest.raises(ValueError):
        A.stability_sweep(P1, OperatorSpec(), get_function("sin"), 0.3, [0.6])


# fractional correction


def test_default_window():
    assert A.default_window(ActivationParams(1.0, 2.0)) == 10.0


@pytest.mark.parametrize("alpha", [0.5, 1.5])
def test_correction_vanishes_on_low_degree_polynomials(alpha):
    order = FractionalOrder(alpha)
    f = polynomial([1.5, -2.0][: order.N], "low")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", WindowTooSmall)
        val = A.damasclin_correction(P1, OperatorSpec(n=32), f, order, 0.2, 0.7, 0.1)
    assert abs(val) <= 1e-8


def test_correction_scales_with_n():
    f = get_function("gauss")
    order = FractionalOrder(0.6)
    beta, eps = 0.7, 0.1
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", WindowTooSmall)
        a = A.damasclin_correction(P1, OperatorSpec(n=32), f, order, 0.3, beta, eps, window=4.0)
        b = A.damasclin_correction(P1, OperatorSpec(n=64), f, order, 0.3, beta, eps, window=4.0)
    assert b == pytest.approx(a * 2 ** (-beta * (order.N - eps)), rel=1e-14)


@pytest.mark.parametrize("alpha", [0.5, 1.5])
def test_correction_integral_brute_force(alpha):
    order = FractionalOrder(alpha)
    m, x, L = order.N + 2, 0.2, 2.0
    f = power(m, x)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", WindowTooSmall)
        got = A.damasclin_integral(f, order, x, L)
    # D (t-x)^m = m!/Gamma(m+1-alpha) (t-x)^(m-alpha); midpoint sum on 1e5 cells
    h = L / 100_000
    t = x + h * (np.arange(100_000) + 0.5)
    integrand = math.factorial(m) / math.gamma(m + 1 - alpha) * (t - x) ** (m - alpha) * (t - x) ** (alpha - 1)
    assert got == pytest.approx(integrand.sum() * h / math.gamma(alpha), rel=1e-3)


def test_correction_window_advisory():
    with pytest.warns(WindowTooSmall):
        A.damasclin_integral(get_function("sin"), FractionalOrder(0.5), 0.3, 2.0)


@pytest.mark.parametrize("beta,eps", [(0.0, 0.1), (1.0, 0.1), (0.7, 0.0), (0.7, 2.0)])
def test_correction_validation(beta, eps):
    with pytest.raises(ValueError):
        A.damasclin_correction(P1, OperatorSpec(), get_function("sin"), FractionalOrder(0.5), 0.3, beta, eps)


def test_correction_integral_uses_anchor_at_x():
    f = get_function("gauss")
    order = FractionalOrder(0.4)
    assert caputo_left(f, order, 0.3, 0.3) == 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", WindowTooSmall)
        v1 = A.damasclin_integral(f, order, 0.3, 1.0, CaputoScheme(256))
        v2 = A.damasclin_integral(f, order, 0.3, 1.0, CaputoScheme(1024))
    assert v1 == pytest.approx(v2, rel=1e-4)
