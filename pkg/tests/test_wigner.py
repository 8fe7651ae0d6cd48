import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wigner_hydrogen.core import Config, ConvergenceFailure, PhasePoint, UnsupportedState
from wigner_hydrogen.hai import DerivOrder, MAX_PHASE
from wigner_hydrogen.states import momentum_density, position_density
from wigner_hydrogen.wigner import (BOUND, marginal_momentum, marginal_position,
                                    operator_catalog, wigner_eval, wigner_many, wigner_scalar)

STATES = ("1s", "2s", "2p0", "2p+1", "2p-1")

# Each value agrees with the brute-force transform to about 1e-15.
REGRESSION = [
    ("1s", (0, 0, 1), (0, 0, 0), 0.018914005705107158),
    ("1s", (0, 0, 2), (0, 0, 1), -0.00022945651543689033),
    ("1s", (0.5, -0.3, 0.8), (0.2, 0.4, -0.1), 0.012069741249419686),
    ("2s", (0, 0, 3), (0, 0, 0.2), 0.006644011710850835),
    ("2s", (1, 0.5, -2), (0.1, -0.3, 0.25), -0.0017360587653204376),
    ("2p0", (0, 0, 2), (0, 0.3, 0), -0.0012504271452113275),
    ("2p0", (1, 0.5, -2), (0.1, -0.3, 0.25), 0.004773887999702353),
    ("2p+1", (2, 0, 0), (0, 0.2, 0), 0.008707982308041368),
    ("2p+1", (1, 0.5, -2), (0.1, -0.3, 0.25), -0.0021118897818526404),
    ("2p-1", (1, 0.5, -2), (0.1, -0.3, 0.25), 0.0023611704470016736),
]


@pytest.mark.parametrize("state, r_vec, k_vec, expected", REGRESSION)
def test_regression_values(state, r_vec, k_vec, expected):
    assert wigner_eval(state, PhasePoint(r_vec, k_vec)).w == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("state", STATES)
def test_parity_at_origin(state):
    value = wigner_eval(state, PhasePoint((0, 0, 0), (0, 0, 0)))
    sign = 1 if state.endswith("s") else -1
    assert value.w == pytest.approx(sign * 0.0322515, abs=1e-7)
    assert abs(value.w - sign * BOUND) <= 1e-7


@pytest.mark.parametrize("state", STATES)
def test_bound_and_reality_coarse(state):
    cfg = Config()
    r, k, theta = np.meshgrid(np.linspace(0, 10, 5), np.linspace(0, 3, 5),
                              np.linspace(0, math.pi, 5), indexing="ij")
    w, im, _, failed = wigner_scalar(state, r, k, theta, cfg)
    assert not failed.any()
    assert np.abs(w).max() <= BOUND + 1e-6
    assert im.max() <= 1e-7
    assert im.max() <= 100 * cfg.quad_tol


def _rotation(a, b, c):
    def rz(t):
        return np.array([[math.cos(t), -math.sin(t), 0], [math.sin(t), math.cos(t), 0], [0, 0, 1]])
    ry = np.array([[math.cos(b), 0, math.sin(b)], [0, 1, 0], [-math.sin(b), 0, math.cos(b)]])
    return rz(a) @ ry @ rz(c)


vec = st.lists(st.floats(-2, 2, allow_nan=False), min_size=3, max_size=3)
angle = st.floats(0, 2 * math.pi)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(["1s", "2s"]), vec, vec, angle, angle, angle)
def test_s_states_depend_on_scalars_only(state, r, k, a, b, c):
    rot = _rotation(a, b, c)
    w0 = wigner_eval(state, PhasePoint(r, k)).w
    w1 = wigner_eval(state, PhasePoint(rot @ np.array(r), rot @ np.array(k))).w
    assert abs(w1 - w0) <= 1e-9


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(["2p0", "2p+1", "2p-1"]), vec, vec, angle)
def test_p_states_invariant_about_z(state, r, k, a):
    rot = _rotation(a, 0.0, 0.0)
    w0 = wigner_eval(state, PhasePoint(r, k)).w
    w1 = wigner_eval(state, PhasePoint(rot @ np.array(r), rot @ np.array(k))).w
    assert abs(w1 - w0) <= 1e-9


def test_2p0_not_invariant_about_x():
    r, k = np.array([0.3, 0.4, 1.2]), np.array([0.2, -0.5, 0.1])
    rot = _rotation(0.0, 1.0, 0.0)
    w0 = wigner_eval("2p0", PhasePoint(r, k)).w
    w1 = wigner_eval("2p0", PhasePoint(rot @ r, rot @ k)).w
    assert abs(w1 - w0) > 1e-4


def test_opposite_m_related_by_mirror():
    # y -> -y maps the m = +1 amplitude onto minus the conjugate of m = -1
    r, k = np.array([1.0, 0.5, -2.0]), np.array([0.1, -0.3, 0.25])
    flip = np.array([1.0, -1.0, 1.0])
    plus = wigner_eval("2p+1", PhasePoint(r, k)).w
    minus = wigner_eval("2p-1", PhasePoint(r * flip, k * flip)).w
    assert plus == pytest.approx(minus, abs=1e-12)


@pytest.mark.parametrize("state", STATES)
def test_bohr_radius_scaling(state):
    # W is dimensionless, so W_a(r, k) = W_1(r / a, k a)
    a = 1.7
    r, k = np.array([0.4, -1.1, 0.9]), np.array([0.3, 0.2, -0.6])
    scaled = wigner_eval(state, PhasePoint(r * a, k / a), Config(bohr_radius=a)).w
    assert scaled == pytest.approx(wigner_eval(state, PhasePoint(r, k)).w, abs=1e-12)


def test_reference_point_matches_oracle_constant():
    # 1s at r = 2a, k = 1/a, theta = 0; brute-force value -2.2945651543689e-4
    value = wigner_eval("1s", PhasePoint.from_scalars(2.0, 1.0, 0.0))
    assert value.w == pytest.approx(-2.2945651543689e-4, abs=1e-12)


def test_catalog_examples():
    one = operator_catalog("1s")
    assert len(one.terms) == 1 and one.orders == (DerivOrder(1, 1),)
    assert one.b_fix == 1.0
    coef = one.terms[0].coefficient(np.zeros((1, 3)), np.zeros((1, 3)))
    assert coef[0] == pytest.approx(8 / math.pi ** 3)
    assert operator_catalog("2s").b_fix == 0.5
    assert operator_catalog("2s", a=2.0).b_fix == 0.25
    assert len(operator_catalog("2s").terms) == 4
    assert not operator_catalog("2p0").derived
    assert operator_catalog("2p+1").derived and operator_catalog("2p-1").derived
    for state in STATES:
        for order in operator_catalog(state).orders:
            assert DerivOrder.coerce(order) == order
    with pytest.raises(UnsupportedState):
        operator_catalog("3p0")


def test_many_shapes_and_failures():
    r = np.zeros((2, 3, 3))
    r[..., 2] = np.linspace(0, 2, 3)
    w, im, err, failed = wigner_many("2s", r, np.array([0.0, 0.1, 0.0]))
    assert w.shape == im.shape == err.shape == failed.shape == (2, 3)
    assert not failed.any()
    big = MAX_PHASE
    w, _, _, failed = wigner_many("1s", np.array([[0, 0, 1.0], [0, 0, big]]),
                                  np.array([[0, 0, 1.0], [0, 0, 1.0]]))
    assert failed.tolist() == [False, True] and np.isnan(w[1])
    with pytest.raises(ConvergenceFailure):
        wigner_eval("1s", PhasePoint((0, 0, big), (0, 0, 1.0)))


@pytest.mark.parametrize("state, r_vec, expected", [
    ("1s", (0, 0, 0), 1 / math.pi),
    ("1s", (0, 0, 1), math.exp(-2) / math.pi),
    ("2p0", (0, 0, 0), 0.0),
])
def test_position_marginal_examples(state, r_vec, expected):
    assert marginal_position(state, r_vec) == pytest.approx(expected, abs=1e-4)


def test_momentum_marginal_examples():
    assert marginal_momentum("1s", (0, 0, 0)) == pytest.approx(8 / math.pi ** 2, abs=1e-4)
    two = marginal_momentum("2s", (0, 0, 0))
    assert two > 0
    assert two == pytest.approx(float(momentum_density("2s", np.zeros(3))), abs=1e-4)


def test_momentum_marginal_tail():
    # the 1s density falls off as (k a)^-8
    for k in (3.0, 6.0):
        value = marginal_momentum("1s", (0, 0, k))
        exact = float(momentum_density("1s", np.array([0, 0, k])))
        assert value == pytest.approx(exact, rel=1e-3)
    assert float(momentum_density("1s", np.array([0, 0, 1e3]))) * 1e24 == pytest.approx(
        8 / math.pi ** 2, rel=1e-5)


@pytest.mark.parametrize("state, r_vec", [
    ("1s", (0, 0, 0)), ("1s", (0.6, 0.0, 0.8)), ("2p+1", (0.0, 2.0, 0.0)),
])
def test_position_cutoff_doubling(state, r_vec):
    n = int(state[0])
    base = marginal_position(state, r_vec)
    doubled = marginal_position(state, r_vec, k_cutoff=40.0 / n)
    assert abs(doubled - base) < 1e-6
    assert abs(base - float(position_density(state, np.array(r_vec)))) <= 1e-4


@pytest.mark.parametrize("state, k_vec", [("1s", (0, 0, 0)), ("2s", (0.2, 0.0, 0.1)),
                                          ("2p0", (0.0, 0.3, 0.2))])
def test_momentum_cutoff_doubling(state, k_vec):
    n = int(state[0])
    base = marginal_momentum(state, k_vec)
    doubled = marginal_momentum(state, k_vec, r_cutoff=60.0 * n)
    assert abs(doubled - base) < 1e-6
