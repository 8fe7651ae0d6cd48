"""Closed-form hydrogen eigenfunctions for n <= 2.

Momentum amplitudes follow ``psi_mom(k) = int d^3r exp(-i k.r) psi_pos(r)``,
so that ``int |psi_mom|^2 d^3k / (2 pi)^3 = 1``.  Spherical harmonics carry
the Condon-Shortley phase; the 2p states are written as ``(eps . r_vec)``
times a radial factor with polarisation vectors

    m = 0  : (0, 0, 1)
    m = +1 : -(1, +i, 0) / sqrt(2)
    m = -1 : +(1, -i, 0) / sqrt(2)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import QuantumNumbers

_SQRT2 = math.sqrt(2.0)


def polarization(qn):
    """Complex unit vector ``eps`` with ``psi_2p(r_vec) ∝ eps . r_vec``."""
    qn = QuantumNumbers.parse(qn)
    if qn.l != 1:
        raise ValueError("polarisation is only defined for p states")
    if qn.m == 0:
        return np.array([0.0, 0.0, 1.0], dtype=complex)
    return -qn.m * np.array([1.0, 1j * qn.m, 0.0]) / _SQRT2


def psi_pos(qn, r_vec, a=1.0):
    """Normalised position-space amplitude at ``r_vec`` (array of shape ``(..., 3)``)."""
    qn = QuantumNumbers.parse(qn)
    r_vec = np.asarray(r_vec, dtype=float)
    r = np.linalg.norm(r_vec, axis=-1)
    if qn.n == 1:
        out = np.exp(-r / a) / math.sqrt(math.pi * a ** 3)
    elif qn.l == 0:
        out = (2.0 - r / a) * np.exp(-r / (2 * a)) / math.sqrt(32 * math.pi * a ** 3)
    else:
        proj = r_vec @ polarization(qn)
        out = proj * np.exp(-r / (2 * a)) / math.sqrt(32 * math.pi * a ** 5)
    return np.asarray(out, dtype=complex)


def psi_mom_100(k_vec, a=1.0):
    """Ground-state momentum amplitude ``8 sqrt(pi a^3) / (1 + k^2 a^2)^2``."""
    k_vec = np.asarray(k_vec, dtype=float)
    k2 = np.sum(k_vec * k_vec, axis=-1)
    return 8.0 * math.sqrt(math.pi * a ** 3) / (1.0 + k2 * a * a) ** 2


def psi_mom(qn, k_vec, a=1.0):
    """Normalised momentum-space amplitude at wavevector ``k_vec``."""
    qn = QuantumNumbers.parse(qn)
    if qn.n == 1:
        return np.asarray(psi_mom_100(k_vec, a), dtype=complex)
    k_vec = np.asarray(k_vec, dtype=float)
    k2 = np.sum(k_vec * k_vec, axis=-1)
    beta = 1.0 / (4 * a * a)
    if qn.l == 0:
        out = 2 * math.sqrt(2 * math.pi) * a ** -2.5 * (k2 - beta) / (k2 + beta) ** 3
        return np.asarray(out, dtype=complex)
    proj = k_vec @ polarization(qn)
    return -2j * math.sqrt(2 * math.pi) * a ** -3.5 * proj / (k2 + beta) ** 3


def position_density(qn, r_vec, a=1.0):
    return np.abs(psi_pos(qn, r_vec, a)) ** 2


def momentum_density(qn, k_vec, a=1.0):
    """Wavevector density ``|psi_mom|^2 / (2 pi)^3``; integrates to one over ``d^3k``."""
    return np.abs(psi_mom(qn, k_vec, a)) ** 2 / (2 * math.pi) ** 3


@dataclass(frozen=True)
class WavefunctionPair:
    """Position and momentum amplitudes of one eigenstate."""

    qn: QuantumNumbers
    a: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "qn", QuantumNumbers.parse(self.qn))

    def psi_pos(self, r_vec):
        return psi_pos(self.qn, r_vec, self.a)

    def psi_mom(self, k_vec):
        return psi_mom(self.qn, k_vec, self.a)
