from __future__ import annotations

import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from symtanh import kernel as K
from symtanh.checks import kernel_property_checks, partition_sum, unit_mass
from symtanh.errors import RadiusCapped

P1 = K.ActivationParams(1.0, 1.0)
qs = st.floats(0.2, 5.0)
lams = st.floats(0.2, 5.0)
xs = st.floats(-10.0, 10.0)


def fd(fn, x, h):
    return (fn(x + h) - fn(x - h)) / (2 * h)


# activation and its derivatives


def test_activation_reference_values():
    assert K.activation(P1, 0.0) == 0.0
    assert K.activation(K.ActivationParams(2.0, 1.0), 0.0) == pytest.approx(-1.0 / 3.0, abs=1e-15)
    # matches the rational form (1 - q e^{-2 lam x}) / (1 + q e^{-2 lam x})
    p = K.ActivationParams(2.5, 0.7)
    x = np.linspace(-3, 3, 41)
    e = 2.5 * np.exp(-1.4 * x)
    np.testing.assert_allclose(K.activation(p, x), (1 - e) / (1 + e), rtol=1e-14, atol=1e-15)


def test_activation_limits():
    p = K.ActivationParams(3.0, 0.5)
    assert abs(K.activation(p, 1e3) - 1.0) < 1e-12
    assert abs(K.activation(p, -1e3) + 1.0) < 1e-12
    assert np.all(np.isfinite(K.activation(p, np.array([-1e308, 1e308]))))


def test_activation_dx_reference_values():
    # true derivative of tanh at 0 is 1
    assert K.activation_dx(P1, 0.0) == pytest.approx(1.0, rel=1e-15)
    assert K.activation_dx(K.ActivationParams(4.0, 1.0), 0.0) == pytest.approx(16.0 / 25.0, rel=1e-14)
    p = K.ActivationParams(1.5, 0.7)
    assert K.activation_dx(p, 0.3) == pytest.approx(fd(lambda t: K.activation(p, t), 0.3, 1e-5), abs=1e-8)


def test_activation_dxx_zero_and_fd():
    for q, lam in [(1.0, 1.0), (3.0, 2.0), (0.4, 0.6)]:
        p = K.ActivationParams(q, lam)
        assert abs(K.activation_dxx(p, math.log(q) / (2 * lam))) < 1e-12
    p = K.ActivationParams(2.0, 1.0)
    assert K.activation_dxx(p, 0.4) == pytest.approx(fd(lambda t: K.activation_dx(p, t), 0.4, 1e-5), abs=1e-7)


def test_activation_dq_reference_values():
    assert K.activation_dq(P1, 0.0) == pytest.approx(-0.5, rel=1e-15)
    assert K.activation_dq(K.ActivationParams(2.0, 1.0), 0.0) == pytest.approx(-2.0 / 9.0, rel=1e-14)
    x, lam, q, h = 0.5, 2.0, 1.2, 1e-6
    num = (K.activation(K.ActivationParams(q + h, lam), x) - K.activation(K.ActivationParams(q - h, lam), x)) / (2 * h)
    assert K.activation_dq(K.ActivationParams(q, lam), x) == pytest.approx(num, abs=1e-8)


def test_activation_dx_rational_form():
    p = K.ActivationParams(2.7, 1.3)
    x = np.linspace(-4, 4, 33)
    rational = 4 * p.lam * p.q / (np.exp(p.lam * x) + p.q * np.exp(-p.lam * x)) ** 2
    np.testing.assert_allclose(K.activation_dx(p, x), rational, rtol=1e-13)


@given(qs, lams, xs)
def test_reflection_identity(q, lam, x):
    p = K.ActivationParams(q, lam)
    assert abs(K.activation(p, -x) + K.activation(p.reciprocal(), x)) <= 1e-12


@given(lams, xs)
def test_odd_when_unperturbed(lam, x):
    p = K.ActivationParams(1.0, lam)
    assert abs(K.activation(p, -x) + K.activation(p, x)) <= 1e-12


@given(qs, lams, xs, st.floats(1e-3, 5.0))
def test_monotone(q, lam, x, step):
    p = K.ActivationParams(q, lam)
    assert K.activation_dx(p, x) > 0
    assert K.activation(p, x + step) >= K.activation(p, x)


@given(qs, lams)
def test_saturation(q, lam):
    p = K.ActivationParams(q, lam)
    assert abs(K.activation(p, 20 / lam) - 1) < 1e-8
    assert abs(K.activation(p, -20 / lam) + 1) < 1e-8


@given(qs, lams, st.floats(-3.0, 3.0))
def test_derivatives_match_fd(q, lam, u):
    p = K.ActivationParams(q, lam)
    x = p.shift + u / lam
    h = 1e-4 / lam
    d1 = K.activation_dx(p, x)
    assert abs(d1 - fd(lambda t: K.activation(p, t), x, h)) <= 1e-6 * abs(d1)
    d2 = K.activation_dxx(p, x)
    assert abs(d2 - fd(lambda t: K.activation_dx(p, t), x, h)) <= 1e-6 * max(abs(d2), 1e-3 * lam**2)


# density and symmetrized kernel


def test_density_reference_values():
    assert K.density(P1, 0.0) == pytest.approx(math.tanh(1.0) / 2.0, rel=1e-14)
    z = np.linspace(-6, 6, 25)
    np.testing.assert_allclose(K.symmetrized_kernel(P1, z), K.density(P1, z), rtol=1e-14)
    p = K.ActivationParams(2.0, 1.3)
    np.testing.assert_allclose(
        K.density(p, z), 0.25 * (K.activation(p, z + 1) - K.activation(p, z - 1)), rtol=1e-12, atol=1e-16
    )


def test_density_is_shifted_unperturbed_bump():
    p = K.ActivationParams(3.0, 0.8)
    z = np.linspace(-5, 5, 21)
    np.testing.assert_allclose(K.density(p, z), K.density(K.ActivationParams(1.0, 0.8), z - p.shift), rtol=1e-13)


def test_density_reflection():
    p = K.ActivationParams(2.2, 1.1)
    z = np.linspace(-5, 5, 21)
    np.testing.assert_allclose(K.density(p, -z), K.density(p.reciprocal(), z), rtol=1e-13)


def test_symmetrized_evenness_example():
    p = K.ActivationParams(2.0, 1.0)
    assert abs(K.symmetrized_kernel(p, 1.3) - K.symmetrized_kernel(p, -1.3)) <= 1e-12


@given(qs, lams, st.floats(-40.0, 40.0))
def test_kernel_positive_and_even(q, lam, z):
    p = K.ActivationParams(q, lam)
    assert K.density(p, z) > 0
    phi = K.symmetrized_kernel(p, z)
    assert phi > 0
    assert abs(phi - K.symmetrized_kernel(p, -z)) <= 1e-12


@given(qs, lams, st.floats(-50.0, 50.0))
def test_partition_of_unity(q, lam, x):
    p = K.ActivationParams(q, lam)
    pol = K.KernelEvalPolicy()
    assert abs(partition_sum(p, pol, "symmetrized", x) - 1.0) <= 1e-10
    assert abs(partition_sum(p, pol, "density", x) - 1.0) <= 1e-10


@pytest.mark.parametrize("q,lam", [(1.0, 1.0), (0.3, 0.5), (4.0, 2.0), (1.7, 4.5)])
def test_unit_mass(q, lam):
    p = K.ActivationParams(q, lam)
    pol = K.KernelEvalPolicy()
    for kern in K.KERNELS:
        assert abs(unit_mass(p, pol, kern) - 1.0) <= 1e-8
    # independent route: infinite-range quadrature
    full = integrate.quad(lambda z: K.symmetrized_kernel(p, z), -np.inf, np.inf, epsabs=1e-13)[0]
    assert abs(full - 1.0) <= 1e-8


@given(qs, lams, st.floats(-4.0, 4.0))
def test_kernel_dq_matches_fd(q, lam, z):
    h = 1e-6 * q
    a, b = K.ActivationParams(q + h, lam), K.ActivationParams(q - h, lam)
    p = K.ActivationParams(q, lam)
    num = (K.symmetrized_kernel(a, z) - K.symmetrized_kernel(b, z)) / (2 * h)
    assert abs(K.symmetrized_kernel_dq(p, z) - num) <= 1e-7
    num = (K.density(a, z) - K.density(b, z)) / (2 * h)
    assert abs(K.density_dq(p, z) - num) <= 1e-7


def test_symmetrized_dq_vanishes_at_unit_q():
    z = np.linspace(-5, 5, 41)
    assert np.max(np.abs(K.symmetrized_kernel_dq(K.ActivationParams(1.0, 0.9), z))) <= 1e-15
    # the unsymmetrized density does respond to q at first order
    assert np.max(np.abs(K.density_dq(K.ActivationParams(1.0, 0.9), z))) > 1e-2


def test_tail_values_do_not_underflow_to_cancellation():
    p = K.ActivationParams(1.0, 1.0)
    z = 15.0
    # asymptotic form sinh(2) e^{-2z} for large z
    assert K.density(p, z) == pytest.approx(math.sinh(2.0) * math.exp(-2 * z), rel=1e-10)


# decay radius


def test_decay_radius_examples():
    pol = K.KernelEvalPolicy(truncation_tol=1e-12)
    r = K.kernel_decay_radius(P1, pol)
    assert K.symmetrized_kernel(P1, r) < 1e-12 <= K.symmetrized_kernel(P1, r - 1)
    assert K.kernel_decay_radius(K.ActivationParams(1.0, 5.0), pol) <= r
    assert K.kernel_decay_radius(P1, K.KernelEvalPolicy(truncation_tol=0.5)) == 1


@given(qs, lams)
def test_decay_radius_bounds_tail(q, lam):
    p = K.ActivationParams(q, lam)
    pol = K.KernelEvalPolicy()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RadiusCapped)
        for kern in K.KERNELS:
            r = K.kernel_decay_radius(p, pol, kern)
            z = np.concatenate([np.linspace(r, r + 60, 601), -np.linspace(r, r + 60, 601)])
            if r < pol.max_radius:
                assert K.kernel_values(p, z, kern).max() < pol.truncation_tol


def test_radius_capped_warns_every_time():
    p = K.ActivationParams(1.0, 0.01)
    for _ in range(2):
        with pytest.warns(RadiusCapped):
            assert K.kernel_decay_radius(p, K.KernelEvalPolicy(max_radius=200)) == 200


# validation


@pytest.mark.parametrize("q,lam", [(0.0, 1.0), (-1.0, 1.0), (1.0, 0.0), (math.nan, 1.0), (1.0, math.inf)])
def test_params_reject_bad_values(q, lam):
    with pytest.raises(ValueError):
        K.ActivationParams(q, lam)


@pytest.mark.parametrize("kw", [dict(truncation_tol=0.0), dict(truncation_tol=1.0), dict(max_radius=0)])
def test_policy_rejects_bad_values(kw):
    with pytest.raises(ValueError):
        K.KernelEvalPolicy(**kw)


def test_unknown_kernel():
    with pytest.raises(ValueError):
        K.kernel_values(P1, 0.0, "gaussian")


def test_shapes_preserved():
    assert isinstance(K.activation(P1, 0.5), float)
    assert isinstance(K.symmetrized_kernel(P1, 0.5), float)
    assert K.density(P1, np.zeros((3, 4))).shape == (3, 4)


def test_property_suite_unperturbed_all_pass():
    assert all(c.passed for c in kernel_property_checks(K.ActivationParams(1.0, 1.3), seed=1))


def test_property_suite_perturbed_only_oddness_fails():
    res = {c.name: c for c in kernel_property_checks(K.ActivationParams(2.0, 1.0), seed=1)}
    assert not res["oddness"].passed
    assert all(c.passed for name, c in res.items() if name != "oddness")
