"""Invariant audits shared by ``wigner-hydrogen check`` and the test suite.

Each audit returns :class:`CheckResult` records carrying the measured
residual next to the tolerance it is held to.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .core import Config, PhasePoint, QuantumNumbers
from .hai import feynman_identity_check, radial_fourier_kernel, radial_fourier_quadrature
from .oracle import OracleSettings, oracle_integral
from .wigner import (BOUND, closed_form_density, marginal_momentum, marginal_position,
                     normalization, wigner_eval, wigner_many, wigner_scalar)

SEED = 20240917


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    residual: float
    tolerance: float
    seconds: float = 0.0

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return (f"{status} {self.name}: residual={self.residual:.3e} "
                f"tol={self.tolerance:.1e} ({self.seconds:.1f}s)")


def _result(name, residual, tolerance, start):
    residual = float(residual)
    passed = bool(np.isfinite(residual) and residual <= tolerance)
    return CheckResult(name, passed, residual, tolerance, time.perf_counter() - start)


def _unit_vectors(rng, n):
    v = rng.normal(size=(n, 3))
    return v / np.linalg.norm(v, axis=1)[:, None]


def bound_sample(a=1.0, shape=(50, 50, 5)):
    """``(r, k, theta)`` grid over ``[0, 10a] x [0, 3/a] x [0, pi]``."""
    n_r, n_k, n_t = shape
    return np.meshgrid(np.linspace(0, 10 * a, n_r), np.linspace(0, 3 / a, n_k),
                       np.linspace(0, math.pi, n_t), indexing="ij")


def marginal_samples(qn, n_points=10, a=1.0, seed=SEED):
    """Seeded position and wavevector sample points for the marginal audit.

    The first point of each set is the origin; the rest have
    ``|r| in [0.5, 2.5] n a`` and ``|k| in [0.1, 1] / (n a)`` in random directions.
    """
    qn = QuantumNumbers.parse(qn)
    rng = np.random.default_rng(seed)
    scale = qn.n * a
    radii = np.r_[0.0, rng.uniform(0.5, 2.5, n_points - 1)] * scale
    waves = np.r_[0.0, rng.uniform(0.1, 1.0, n_points - 1)] / scale
    dirs = _unit_vectors(rng, n_points)
    return radii[:, None] * dirs, waves[:, None] * dirs


def oracle_points(qn, n_points=20, a=1.0, seed=SEED):
    """Seeded phase points with ``r_vec`` in ``[-2na, 2na]^3`` and ``k_vec`` in ``[-0.8, 0.8]^3 / (na)``."""
    qn = QuantumNumbers.parse(qn)
    rng = np.random.default_rng(seed + 7 * qn.n + 3 * qn.l + qn.m)
    scale = qn.n * a
    r = rng.uniform(-2, 2, (n_points, 3)) * scale
    k = rng.uniform(-0.8, 0.8, (n_points, 3)) / scale
    return [PhasePoint(ri, ki) for ri, ki in zip(r, k)]


def check_parity(qn, cfg=None, tol=1e-7):
    start = time.perf_counter()
    qn = QuantumNumbers.parse(qn)
    value = wigner_eval(qn, PhasePoint((0, 0, 0), (0, 0, 0)), cfg).w
    return _result(f"parity {qn.label}", abs(value - qn.parity * BOUND), tol, start)


def check_bound_and_reality(qn, cfg=None, bound_tol=1e-6, imag_tol=1e-7, shape=(50, 50, 5)):
    """Bound ``|W| <= 1/pi^3`` and reality on the ``(r, k, theta)`` sample grid."""
    start = time.perf_counter()
    cfg = cfg or Config()
    qn = QuantumNumbers.parse(qn)
    r, k, theta = bound_sample(cfg.bohr_radius, shape)
    w, im, _, failed = wigner_scalar(qn, r, k, theta, cfg)
    excess = np.inf if failed.any() else max(0.0, np.abs(w).max() - BOUND)
    imag = np.inf if failed.any() else im.max()
    return [_result(f"bound {qn.label}", excess, bound_tol, start),
            _result(f"reality {qn.label}", imag, imag_tol, start)]


def check_normalization(qn, cfg=None, tol=None):
    start = time.perf_counter()
    qn = QuantumNumbers.parse(qn)
    tol = tol if tol is not None else (1e-3 if qn.l == 0 else 1e-2)
    res = normalization(qn, cfg)
    return _result(f"normalization {qn.label}", abs(res.value - 1.0), tol, start)


def check_marginals(qn, cfg=None, n_points=10, tol=1e-4):
    start = time.perf_counter()
    cfg = cfg or Config()
    qn = QuantumNumbers.parse(qn)
    a = cfg.bohr_radius
    r_pts, k_pts = marginal_samples(qn, n_points, a)
    pos = max(abs(marginal_position(qn, v, cfg) - closed_form_density(qn, "r", v, a))
              for v in r_pts)
    out = [_result(f"position marginal {qn.label}", pos, tol, start)]
    start = time.perf_counter()
    mom = max(abs(marginal_momentum(qn, v, cfg) - closed_form_density(qn, "k", v, a))
              for v in k_pts)
    out.append(_result(f"momentum marginal {qn.label}", mom, tol, start))
    return out


def check_oracle(qn, cfg=None, n_points=20, tol=1e-5):
    start = time.perf_counter()
    cfg = cfg or Config()
    qn = QuantumNumbers.parse(qn)
    worst = 0.0
    for p in oracle_points(qn, n_points, cfg.bohr_radius):
        ref = oracle_integral(qn, p.r_vec, p.k_vec, OracleSettings(), cfg.bohr_radius)
        worst = max(worst, abs(wigner_eval(qn, p, cfg).w - ref.w))
    return _result(f"oracle equivalence {qn.label}", worst, tol, start)


def _rotation(rng):
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q * np.sign(np.diag(r))
    return q * np.sign(np.linalg.det(q))


def _z_rotation(angle):
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def check_rotation(qn, cfg=None, n_points=20, tol=1e-9):
    """s states: invariance under any rotation; p states: under rotations about z."""
    start = time.perf_counter()
    qn = QuantumNumbers.parse(qn)
    rng = np.random.default_rng(SEED + 1)
    r_vec = rng.uniform(-2, 2, (n_points, 3))
    k_vec = rng.uniform(-1, 1, (n_points, 3))
    if qn.l == 0:
        rots = [_rotation(rng) for _ in range(n_points)]
    else:
        rots = [_z_rotation(angle) for angle in rng.uniform(0, 2 * math.pi, n_points)]
    rot = np.array(rots)
    w0, *_ = wigner_many(qn, r_vec, k_vec, cfg)
    w1, *_ = wigner_many(qn, np.einsum("nij,nj->ni", rot, r_vec),
                         np.einsum("nij,nj->ni", rot, k_vec), cfg)
    return _result(f"rotational covariance {qn.label}", np.abs(w1 - w0).max(), tol, start)


def figure2_slices(cfg=None, n=50):
    """``4 pi r^2 k^2 W_1s`` on ``(0, 10a] x (0, 3/a]`` at ``theta = pi/2`` and ``theta = 0``."""
    cfg = cfg or Config()
    a = cfg.bohr_radius
    r, k = np.meshgrid(np.linspace(10 * a / n, 10 * a, n), np.linspace(3 / (a * n), 3 / a, n),
                       indexing="ij")
    weight = 4 * math.pi * r * r * k * k
    perp = wigner_scalar("1s", r, k, math.pi / 2, cfg)[0] * weight
    para = wigner_scalar("1s", r, k, 0.0, cfg)[0] * weight
    return perp, para


def check_figure2(cfg=None, nonneg_tol=1e-8, negative_level=1e-4):
    start = time.perf_counter()
    perp, para = figure2_slices(cfg)
    out = [_result("figure-2 perpendicular slice nonnegative", max(0.0, -perp.min()),
                   nonneg_tol, start)]
    # residual is how far the parallel slice is from dipping below -negative_level
    out.append(_result("figure-2 parallel slice has negative region",
                       max(0.0, para.min() + negative_level), 0.0, start))
    return out


def figure5_argmax(cfg=None, k=0.2, r_max=12.0, n_r=60, n_phi=91):
    """``phi2`` of the maximum of ``W_2p1`` over the ``(r, phi2)`` slice, r along x."""
    cfg = cfg or Config()
    a = cfg.bohr_radius
    r = np.linspace(0, r_max * a, n_r + 1)[1:]
    phi = np.linspace(0, math.pi, n_phi)
    R, P = np.meshgrid(r, phi, indexing="ij")
    zeros = np.zeros_like(R)
    r_vec = np.stack([R, zeros, zeros], axis=-1)
    k_vec = (k / a) * np.stack([np.cos(P), np.sin(P), zeros], axis=-1)
    w, *_ = wigner_many("2p1", r_vec, k_vec, cfg)
    return float(P.flat[np.argmax(w)])


def check_figure5(cfg=None, tol=0.2):
    start = time.perf_counter()
    return _result("figure-5 argmax at perpendicular", abs(figure5_argmax(cfg) - math.pi / 2),
                   tol, start)


def kernel_samples(seed=SEED):
    rng = np.random.default_rng(seed)
    pairs = rng.uniform(0.05, 20.0, (50, 2))
    rc = np.column_stack([rng.uniform(0.0, 6.0, 20), rng.uniform(0.2, 3.0, 20)])
    return pairs, rc


def check_kernels(feynman_tol=1e-10, radial_tol=1e-6):
    start = time.perf_counter()
    pairs, rc = kernel_samples()
    feyn = 0.0
    for A, B in pairs:
        err = abs(feynman_identity_check(A, B) - 1.0 / (A * B))
        feyn = max(feyn, err, err * A * B)
    out = [_result("feynman identity", feyn, feynman_tol, start)]
    start = time.perf_counter()
    radial = max(abs(radial_fourier_kernel(r, c) - radial_fourier_quadrature(r, c)) for r, c in rc)
    out.append(_result("radial fourier kernel", radial, radial_tol, start))
    return out


def run_checks(qn, level="fast", cfg=None):
    """Audits for one state; ``full`` adds marginals, oracle and figure checks."""
    qn = QuantumNumbers.parse(qn)
    if level not in ("fast", "full"):
        raise ValueError(f"level must be 'fast' or 'full', got {level!r}")
    results = [check_parity(qn, cfg)]
    results += check_bound_and_reality(qn, cfg)
    results.append(check_rotation(qn, cfg))
    results.append(check_normalization(qn, cfg))
    if level == "full":
        results += check_kernels()
        results += check_marginals(qn, cfg)
        results.append(check_oracle(qn, cfg))
        if qn.label == "1s":
            results += check_figure2(cfg)
        if qn.label == "2p+1":
            results.append(check_figure5(cfg))
    return results
