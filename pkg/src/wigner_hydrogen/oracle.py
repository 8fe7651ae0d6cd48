"""Brute-force Wigner transform of the position-space eigenfunctions.

    W(r, k) = int d^3q / (2 pi)^3  psi*(r + q/2) exp(i q.k) psi(r - q/2)

This path deliberately shares no code with the generating-integral
machinery.  The product ``psi*(r + q/2) psi(r - q/2)`` has cusps at
``q = -2r`` and ``q = +2r``, so the q-integral is done in prolate
spheroidal coordinates with those two points as foci:

    q = x eta e3 + sqrt((x^2 - c^2)(1 - eta^2)) (cos phi e1 + sin phi e2)
    d^3q = (x^2 - c^2 eta^2) dx deta dphi,      c = 2 |r|

with ``e3 = r_hat``.  Both distances ``|q -+ 2r|`` are linear in ``x`` and
``eta``, which removes the cusps; at ``r = 0`` the system collapses to
ordinary spherical coordinates.  ``x`` and ``eta`` use Gauss-Legendre
panels, ``phi`` the periodic trapezoid rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import QuantumNumbers, WignerHydrogenError
from .states import psi_pos


class ToleranceNotMet(WignerHydrogenError, ArithmeticError):
    def __init__(self, message, achieved):
        super().__init__(message)
        self.achieved = achieved


@dataclass(frozen=True)
class OracleSettings:
    """Resolution of the brute-force quadrature.

    ``q_cutoff`` defaults to ``40 n a``.  ``radial_order`` is the number of
    Gauss-Legendre nodes per radial panel and ``angular_order`` the base
    node count in ``eta`` and ``phi``; both grow with ``|q| k`` to follow
    the oscillation.
    """

    q_cutoff: float | None = None
    radial_order: int = 12
    angular_order: int = 16
    tol: float = 1e-7

    def __post_init__(self):
        if self.q_cutoff is not None and not self.q_cutoff > 0:
            raise ValueError("q_cutoff must be positive")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.radial_order < 2 or self.angular_order < 2:
            raise ValueError("quadrature orders must be at least 2")


@dataclass(frozen=True)
class OracleResult:
    value: complex
    est_error: float

    @property
    def w(self):
        return self.value.real


def _frame(r_vec, k_vec):
    r = np.linalg.norm(r_vec)
    if r > 0:
        e3 = r_vec / r
    else:
        e3 = np.array([0.0, 0.0, 1.0])
    trial = np.array([1.0, 0.0, 0.0]) if abs(e3[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = trial - (trial @ e3) * e3
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(e3, e1)
    return e1, e2, e3


def _integrate(qn, r_vec, k_vec, a, q_cut, radial_order, angular_order):
    r_vec = np.asarray(r_vec, dtype=float)
    k_vec = np.asarray(k_vec, dtype=float)
    e1, e2, e3 = _frame(r_vec, k_vec)
    c = 2.0 * np.linalg.norm(r_vec)
    k = np.linalg.norm(k_vec)
    k_perp = math.hypot(k_vec @ e1, k_vec @ e2)
    decay = qn.n * a

    # panels in x: at most pi/2 of phase and 2 decay lengths each
    length = min(2.0 * decay, 0.5 * math.pi / k if k > 0 else math.inf)
    n_panels = max(1, math.ceil((q_cut - c) / length))
    edges = np.linspace(c, q_cut, n_panels + 1)
    gx, gw = np.polynomial.legendre.leggauss(radial_order)

    total = 0.0 + 0.0j
    for lo, hi in zip(edges[:-1], edges[1:]):
        x = 0.5 * (lo + hi) + 0.5 * (hi - lo) * gx
        wx = 0.5 * (hi - lo) * gw
        n_eta = angular_order + int(math.ceil(0.75 * hi * k))
        n_phi = 2 * (angular_order // 2) + 2 * int(math.ceil(0.6 * hi * k_perp))
        eta, w_eta = np.polynomial.legendre.leggauss(n_eta)
        phi = 2 * math.pi * np.arange(n_phi) / n_phi
        w_phi = 2 * math.pi / n_phi

        X, H, P = np.meshgrid(x, eta, phi, indexing="ij")
        rho = np.sqrt(np.maximum(X * X - c * c, 0.0) * (1.0 - H * H))
        q = (X * H)[..., None] * e3 + (rho * np.cos(P))[..., None] * e1 \
            + (rho * np.sin(P))[..., None] * e2
        f = np.conj(psi_pos(qn, r_vec + 0.5 * q, a)) * psi_pos(qn, r_vec - 0.5 * q, a)
        f = f * np.exp(1j * (q @ k_vec)) * (X * X - c * c * H * H)
        weights = wx[:, None, None] * w_eta[None, :, None] * w_phi
        total += np.sum(f * weights)
    return total / (2 * math.pi) ** 3


def oracle_integral(qn, r_vec, k_vec, settings=None, a=1.0):
    """Complex Wigner integral with an error estimate from a refined rerun."""
    qn = QuantumNumbers.parse(qn)
    s = settings or OracleSettings()
    q_cut = s.q_cutoff if s.q_cutoff is not None else 40.0 * qn.n * a
    q_cut = max(q_cut, 2.0 * np.linalg.norm(r_vec) + 10 * qn.n * a)
    coarse = _integrate(qn, r_vec, k_vec, a, q_cut, s.radial_order, s.angular_order)
    fine = _integrate(qn, r_vec, k_vec, a, q_cut,
                      s.radial_order + s.radial_order // 2, s.angular_order + s.angular_order // 2)
    return OracleResult(complex(fine), float(abs(fine - coarse)))


def oracle_eval(qn, p, settings=None, a=1.0):
    """Real part of the brute-force Wigner transform at phase point ``p``.

    Raises
    ------
    ToleranceNotMet
        If the refined and base quadratures differ by more than ``settings.tol``.
    """
    s = settings or OracleSettings()
    res = oracle_integral(qn, p.r_vec, p.k_vec, s, a)
    if res.est_error > s.tol:
        raise ToleranceNotMet(f"oracle error estimate {res.est_error:.3g} exceeds {s.tol:g}",
                              res.est_error)
    return res.w
