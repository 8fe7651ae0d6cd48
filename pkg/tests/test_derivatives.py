"""Hand-derived integrand derivatives against dual-number and finite-difference oracles."""

import math

import numpy as np
import pytest
from dual import integrate_on_panels

from wigner_hydrogen.core import Config, FeynmanParams, PhasePoint
from wigner_hydrogen.hai import DerivOrder, HaiRequest, hai_eval, hai_panels
from wigner_hydrogen.wigner import operator_catalog

STATES = ("1s", "2s", "2p0", "2p+1", "2p-1")
FD_STEP = 1e-5
# tight enough that quadrature noise divided by the step stays far below 1e-6
FD_CFG = Config(quad_tol=1e-13)


def catalog_orders():
    orders = []
    for state in STATES:
        for order in operator_catalog(state).orders:
            if order not in orders:
                orders.append(order)
    return orders


def sample_points(n=3, seed=4242):
    """Phase points and Feynman parameters with ``b`` and ``|k|`` in ``[0.3, 3]``."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        r_vec = rng.uniform(-1.5, 1.5, 3)
        k_dir = rng.normal(size=3)
        k_vec = rng.uniform(0.3, 3.0) * k_dir / np.linalg.norm(k_dir)
        b1, b2 = rng.uniform(0.3, 3.0, 2)
        out.append((r_vec, k_vec, b1, b2))
    return out


def analytic(order, r_vec, k_vec, beta1, beta2, cfg=FD_CFG):
    req = HaiRequest(PhasePoint(r_vec, k_vec),
                     FeynmanParams(math.sqrt(beta1), math.sqrt(beta2)), order)
    return hai_eval(req, cfg).value


def dual_value(order, r_vec, k_vec, b1, b2, cfg=None):
    req = HaiRequest(PhasePoint(r_vec, k_vec), FeynmanParams(b1, b2), order)
    lo, hi = hai_panels(req, cfg)
    return (hai_eval(req, cfg).value,
            integrate_on_panels(lo, hi, r_vec, k_vec, b1 * b1, b2 * b2, tuple(req.deriv_order)))


def finite_difference(order, r_vec, k_vec, beta1, beta2, h=FD_STEP):
    """Central difference in one variable of the analytic derivative one order lower.

    For first-order multi-indices this differentiates the underived integral.
    """
    order = DerivOrder.coerce(order)
    alpha = list(order.k)
    if order.beta1:
        lower = DerivOrder(order.beta1 - 1, order.beta2, alpha)
        plus = (r_vec, k_vec, beta1 + h, beta2)
        minus = (r_vec, k_vec, beta1 - h, beta2)
    elif order.beta2:
        lower = DerivOrder(order.beta1, order.beta2 - 1, alpha)
        plus = (r_vec, k_vec, beta1, beta2 + h)
        minus = (r_vec, k_vec, beta1, beta2 - h)
    else:
        axis = next(i for i in range(3) if alpha[i])
        alpha[axis] -= 1
        lower = DerivOrder(0, 0, alpha)
        step = np.eye(3)[axis] * h
        plus = (r_vec, k_vec + step, beta1, beta2)
        minus = (r_vec, k_vec - step, beta1, beta2)
    return (analytic(lower, *plus) - analytic(lower, *minus)) / (2 * h)


def test_dual_example_first_mixed():
    value, reference = dual_value((1, 1, (0, 0, 0)), np.array([0.0, 0.0, 2.0]),
                                  np.array([0.0, 0.0, 1.0]), 0.5, 0.5)
    assert abs(value - reference) <= 1e-8


@pytest.mark.parametrize("point", sample_points(), ids=["p0", "p1", "p2"])
def test_dual_catalog(point):
    r_vec, k_vec, b1, b2 = point
    for order in catalog_orders():
        value, reference = dual_value(order, r_vec, k_vec, b1, b2)
        assert abs(value - reference) <= 1e-6, order


FIRST_ORDERS = [(1, 0), (0, 1), (0, 0, (1, 0, 0)), (0, 0, (0, 1, 0)), (0, 0, (0, 0, 1))]
SECOND_ORDERS = [(2, 0), (1, 1), (0, 2), (1, 0, (0, 0, 1)), (0, 1, (1, 0, 0)),
                 (0, 0, (2, 0, 0)), (0, 0, (1, 1, 0)), (0, 0, (0, 1, 1))]


@pytest.mark.parametrize("order", FIRST_ORDERS + SECOND_ORDERS, ids=str)
def test_finite_difference_low_orders(order):
    for r_vec, k_vec, b1, b2 in sample_points(2, seed=99):
        value = analytic(order, r_vec, k_vec, b1 * b1, b2 * b2)
        assert abs(value - finite_difference(order, r_vec, k_vec, b1 * b1, b2 * b2)) <= 1e-6


def test_finite_difference_catalog():
    r_vec, k_vec, b1, b2 = sample_points(1, seed=7)[0]
    for order in catalog_orders():
        value = analytic(order, r_vec, k_vec, b1 * b1, b2 * b2)
        fd = finite_difference(order, r_vec, k_vec, b1 * b1, b2 * b2)
        assert abs(value - fd) <= 1e-6, order
