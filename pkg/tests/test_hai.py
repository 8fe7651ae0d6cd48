import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wigner_hydrogen.core import Config, ConvergenceFailure, FeynmanParams, PhasePoint
from wigner_hydrogen.hai import (MAX_PHASE, DerivOrder, HaiRequest, adaptive_gauss_legendre,
                                 c_of_u, feynman_identity_check, hai_eval, hai_eval_many,
                                 radial_fourier_kernel, radial_fourier_quadrature)


def request(r_vec, k_vec, b1, b2, order=(0, 0)):
    return HaiRequest(PhasePoint(r_vec, k_vec), FeynmanParams(b1, b2), order)


@pytest.mark.parametrize("u, b1, b2, k, expected", [
    (0.0, 1.0, 2.0, 5.0, 2.0),
    (1.0, 3.0, 7.0, 5.0, 3.0),
    (0.5, 1.0, 1.0, 1.0, math.sqrt(2.0)),
])
def test_c_of_u_examples(u, b1, b2, k, expected):
    assert c_of_u(u, FeynmanParams(b1, b2), k) == pytest.approx(expected, rel=1e-15)


def test_c_of_u_domain():
    with pytest.raises(ValueError):
        c_of_u(1.5, FeynmanParams(1, 1), 0.0)
    with pytest.raises(ValueError):
        c_of_u(np.array([0.2, -0.1]), FeynmanParams(1, 1), 0.0)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.05, 5), st.floats(0.05, 5), st.floats(0, 10))
def test_c_positive_on_interval(b1, b2, k):
    u = np.linspace(0, 1, 33)
    assert np.all(c_of_u(u, FeynmanParams(b1, b2), k) >= min(b1, b2) * (1 - 1e-12))


def test_hai_trivial_examples():
    v = hai_eval(request((0, 0, 0), (0, 0, 0), 1.0, 1.0))
    assert v.value == pytest.approx(1.0, abs=1e-14)
    v = hai_eval(request((0, 0, 1), (0, 0, 0), 1.0, 1.0))
    assert v.value == pytest.approx(math.exp(-2), abs=1e-14)
    assert v.est_error <= Config().quad_tol


def test_hai_closed_form_at_zero_r_and_k():
    # with r = k = 0, I = int du (u b1^2 + (1-u) b2^2)^(-1/2) = 2 / (b1 + b2)
    v = hai_eval(request((0, 0, 0), (0, 0, 0), 0.5, 2.0))
    assert v.value == pytest.approx(2 / 2.5, rel=1e-13)
    # d^2/dbeta1 dbeta2 of 2 / (b1 + b2) with beta = b^2
    b1, b2 = 0.5, 2.0
    expected = 1 / (b1 * b2 * (b1 + b2) ** 3)
    v = hai_eval(request((0, 0, 0), (0, 0, 0), b1, b2, (1, 1)))
    assert v.value == pytest.approx(expected, rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.3, 3), st.floats(0.3, 3), st.floats(0, 3), st.floats(-3, 3),
       st.floats(0.1, 3))
def test_conjugation_symmetry(b1, b2, r, kz, kx):
    cfg = Config()
    plus = hai_eval(request((0, 0, r), (kx, 0, kz), b1, b2)).value
    minus = hai_eval(request((0, 0, -r), (kx, 0, kz), b1, b2)).value
    assert abs(minus - plus.conjugate()) <= 10 * cfg.quad_tol


@pytest.mark.parametrize("order", [(0, 0), (1, 1), (2, 1), (2, 2)])
def test_real_when_dot_vanishes(order):
    # r along z, k along x: dot = 0
    v = hai_eval(request((0, 0, 1.7), (2.2, 0, 0), 0.7, 1.3, order))
    assert abs(v.value.imag) <= 10 * Config().quad_tol


def test_monotone_in_r():
    vals = [hai_eval(request((0, 0, r), (1.0, 0, 0), 0.8, 1.1)).value.real
            for r in np.linspace(0, 6, 25)]
    assert np.all(np.diff(vals) < 0)


def test_phase_cutoff():
    with pytest.raises(ConvergenceFailure):
        hai_eval(request((0, 0, 1e3), (0, 0, 0.1 + MAX_PHASE / 4e3), 1, 1))
    _, _, failed = hai_eval_many(np.array([[0, 0, 1e3]]), np.array([[0, 0, 1e3]]), 1.0, 1.0,
                                 [(0, 0)])
    assert failed.all()


def test_refinement_failure_reports_achieved():
    with pytest.raises(ConvergenceFailure) as info:
        hai_eval(request((0, 0, 3), (0, 0, 1), 1, 1), Config(quad_tol=1e-300))
    assert info.value.achieved > 0


def test_error_estimate_within_tolerance():
    for cfg in (Config(), Config(quad_tol=1e-6)):
        v = hai_eval(request((0.3, 1, 2), (0.5, -1, 2), 0.5, 0.5, (2, 1, (0, 1, 0))), cfg)
        assert v.est_error <= cfg.quad_tol


def test_large_k_boundary_layer():
    # at r = 0 the 1s combination reduces to a rational function of k
    for k in (40.0, 160.0):
        v = hai_eval(request((0, 0, 0), (0, 0, k), 1.0, 1.0, (1, 1)))
        assert v.value.real * 8 / math.pi ** 3 == pytest.approx(
            1 / (math.pi ** 3 * (1 + k * k) ** 2), rel=1e-7)


def test_vectorised_matches_scalar():
    rng = np.random.default_rng(1)
    r = rng.uniform(-2, 2, (6, 3))
    k = rng.uniform(-1, 1, (6, 3))
    orders = [(1, 1), (2, 0, (1, 0, 0))]
    values, errors, failed = hai_eval_many(r, k, 0.25, 0.25, orders)
    assert values.shape == (6, 2) and not failed.any()
    for i in range(6):
        for j, order in enumerate(orders):
            v = hai_eval(request(r[i], k[i], 0.5, 0.5, order))
            assert values[i, j] == pytest.approx(v.value, abs=1e-13)


def test_deriv_order_validation():
    assert DerivOrder.coerce((2, 1, 2)).k == (0, 0, 2)
    assert DerivOrder.coerce((1, 1)).x_order == 2
    with pytest.raises(ValueError):
        DerivOrder(3, 2)
    with pytest.raises(ValueError):
        DerivOrder(0, 0, (3, 0, 0))


@pytest.mark.parametrize("A, B, expected", [(1, 1, 1.0), (1, 2, 0.5), (3.7, 0.2, 1 / 0.74)])
def test_feynman_examples(A, B, expected):
    assert feynman_identity_check(A, B) == pytest.approx(expected, rel=1e-13)


def test_feynman_random_pairs():
    rng = np.random.default_rng(12)
    for A, B in rng.uniform(0.05, 20, (50, 2)):
        assert abs(feynman_identity_check(A, B) - 1 / (A * B)) <= 1e-10


def test_feynman_domain():
    with pytest.raises(ValueError):
        feynman_identity_check(0.0, 1.0)


@pytest.mark.parametrize("r, C, expected", [
    (0.0, 1.0, math.pi ** 2),
    (1.0, 1.0, math.pi ** 2 * math.exp(-2)),
    (0.5, 2.0, math.pi ** 2 / 2 * math.exp(-2)),
])
def test_radial_kernel_examples(r, C, expected):
    assert radial_fourier_kernel(r, C) == pytest.approx(expected, rel=1e-14)
    assert radial_fourier_quadrature(r, C) == pytest.approx(expected, abs=1e-6)


def test_radial_kernel_vs_quadrature():
    rng = np.random.default_rng(13)
    for r, C in zip(rng.uniform(0, 6, 20), rng.uniform(0.2, 3, 20)):
        assert abs(radial_fourier_kernel(r, C) - radial_fourier_quadrature(r, C)) <= 1e-6


def test_radial_kernel_domain():
    with pytest.raises(ValueError):
        radial_fourier_kernel(1.0, 0.0)
    with pytest.raises(ValueError):
        radial_fourier_kernel(-1.0, 1.0)


def test_adaptive_gauss_legendre():
    value, err = adaptive_gauss_legendre(lambda x: np.cos(40 * x), 0.0, 1.0, 1e-12)
    assert value == pytest.approx(math.sin(40) / 40, abs=1e-12)
    assert err <= 1e-12
    with pytest.raises(ConvergenceFailure):
        adaptive_gauss_legendre(lambda x: np.sign(x - 1 / 3), 0.0, 1.0, 1e-300, max_depth=5)
