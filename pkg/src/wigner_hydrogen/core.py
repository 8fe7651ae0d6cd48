"""Shared value types and configuration.

All quantities are in atomic units scaled by the Bohr radius ``a``:
positions in units of ``a`` and wavevectors in units of ``1/a``.  The
wavevector convention is the plain Fourier one, ``exp(i q.k)``, with no
factors of hbar.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np


class WignerHydrogenError(Exception):
    """Base class for errors raised by this package."""


class UnsupportedState(WignerHydrogenError, ValueError):
    """Raised for quantum numbers outside the implemented set."""


class ConvergenceFailure(WignerHydrogenError, ArithmeticError):
    """Quadrature did not reach the requested tolerance.

    ``achieved`` carries the best error estimate obtained.
    """

    def __init__(self, message, achieved=math.inf):
        super().__init__(message)
        self.achieved = achieved


SUPPORTED_STATES = ((1, 0, 0), (2, 0, 0), (2, 1, 0), (2, 1, 1), (2, 1, -1))

_STATE_LABELS = {
    "1s": (1, 0, 0),
    "2s": (2, 0, 0),
    "2p0": (2, 1, 0),
    "2p1": (2, 1, 1),
    "2p+1": (2, 1, 1),
    "2p-1": (2, 1, -1),
}


@dataclass(frozen=True)
class QuantumNumbers:
    """Bound-state label ``(n, l, m)``; only ``n <= 2`` is available."""

    n: int
    l: int
    m: int

    def __post_init__(self):
        n, l, m = self.n, self.l, self.m
        if not (0 <= l < n and -l <= m <= l):
            raise UnsupportedState(f"invalid quantum numbers (n={n}, l={l}, m={m})")
        if (n, l, m) not in SUPPORTED_STATES:
            raise UnsupportedState(f"state (n={n}, l={l}, m={m}) is not implemented")

    @classmethod
    def parse(cls, label):
        """Build from a label such as ``"1s"``, ``"2p-1"`` or ``"2,1,0"``."""
        if isinstance(label, QuantumNumbers):
            return label
        if isinstance(label, (tuple, list)):
            return cls(*(int(v) for v in label))
        text = str(label).strip().lower().replace(" ", "")
        if text in _STATE_LABELS:
            return cls(*_STATE_LABELS[text])
        parts = text.strip("()").split(",")
        if len(parts) == 3:
            try:
                return cls(*(int(p) for p in parts))
            except ValueError:
                pass
        raise UnsupportedState(f"unrecognised state label {label!r}")

    @property
    def label(self):
        if self.l == 0:
            return f"{self.n}s"
        return f"{self.n}p{self.m:d}" if self.m <= 0 else f"{self.n}p+{self.m:d}"

    @property
    def parity(self):
        return -1 if self.l % 2 else 1

    def __iter__(self):
        return iter((self.n, self.l, self.m))


@dataclass(frozen=True)
class PhasePoint:
    """Position ``r_vec`` (units of a) and wavevector ``k_vec`` (units of 1/a)."""

    r_vec: tuple
    k_vec: tuple

    def __post_init__(self):
        r = tuple(float(v) for v in self.r_vec)
        k = tuple(float(v) for v in self.k_vec)
        if len(r) != 3 or len(k) != 3:
            raise ValueError("r_vec and k_vec must be 3-vectors")
        if not all(map(math.isfinite, r + k)):
            raise ValueError("phase point components must be finite")
        object.__setattr__(self, "r_vec", r)
        object.__setattr__(self, "k_vec", k)

    @classmethod
    def from_spherical(cls, r, k, theta_r=0.0, phi_r=0.0, theta_k=0.0, phi_k=0.0):
        return cls(spherical_to_cartesian(r, theta_r, phi_r),
                   spherical_to_cartesian(k, theta_k, phi_k))

    @classmethod
    def from_scalars(cls, r, k, theta):
        """Place ``r_vec`` on the z axis and ``k_vec`` at angle ``theta`` in the xz plane."""
        return cls((0.0, 0.0, r), (k * math.sin(theta), 0.0, k * math.cos(theta)))

    @property
    def scalars(self):
        return phase_point_scalars(self)


@dataclass(frozen=True)
class FeynmanParams:
    """Running inverse-length parameters ``b1, b2`` of the generating integral."""

    b1: float
    b2: float

    def __post_init__(self):
        if not (self.b1 > 0 and self.b2 > 0):
            raise ValueError(f"b1 and b2 must be positive, got {self.b1}, {self.b2}")

    @property
    def beta1(self):
        return self.b1 * self.b1

    @property
    def beta2(self):
        return self.b2 * self.b2


@dataclass(frozen=True)
class Config:
    """Numerical settings shared by every evaluation path.

    Attributes
    ----------
    bohr_radius : float
        Length scale ``a`` of the eigenfunctions.
    quad_tol : float
        Absolute tolerance of each generating-integral quadrature.
    panel_fraction : float
        Largest phase advance allowed across a single quadrature panel.
    """

    bohr_radius: float = 1.0
    quad_tol: float = 1e-10
    panel_fraction: float = math.pi / 2

    def __post_init__(self):
        if not self.bohr_radius > 0:
            raise ValueError("bohr_radius must be positive")
        if not self.quad_tol > 0:
            raise ValueError("quad_tol must be positive")
        if not 0 < self.panel_fraction <= math.pi:
            raise ValueError("panel_fraction must lie in (0, pi]")

    @property
    def a(self):
        return self.bohr_radius

    def updated(self, **overrides):
        """Return a copy with the non-``None`` overrides applied."""
        changes = {key: value for key, value in overrides.items() if value is not None}
        return replace(self, **changes) if changes else self


_CONFIG_ALIASES = {"a": "bohr_radius", "bohr_radius": "bohr_radius",
                   "quad_tol": "quad_tol", "panel_fraction": "panel_fraction"}

CONFIG_ENV_VAR = "WIGNER_HYDROGEN_CONFIG"


def parse_config_text(text):
    """Parse ``key = value`` lines into a dict of config overrides.

    Blank lines and ``#`` comments are ignored.  Unknown keys are kept so
    that callers (the CLI) can pick up their own settings from the same file.
    """
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.lower().replace("-", "_")
        values[_CONFIG_ALIASES.get(key, key)] = value
    return values


def load_config(path=None, **overrides):
    """Load a :class:`Config` from a key=value file.

    ``path`` falls back to the ``WIGNER_HYDROGEN_CONFIG`` environment
    variable; with neither set the defaults are used.  Keyword overrides
    that are not ``None`` win over file values.
    """
    if path is None:
        path = os.environ.get(CONFIG_ENV_VAR) or None
    settings = {}
    if path is not None:
        parsed = parse_config_text(Path(path).read_text())
        known = {f.name for f in fields(Config)}
        settings = {key: float(value) for key, value in parsed.items() if key in known}
    settings.update({key: value for key, value in overrides.items() if value is not None})
    return Config(**settings)


def spherical_to_cartesian(radius, theta, phi):
    st = math.sin(theta)
    return (radius * st * math.cos(phi), radius * st * math.sin(phi), radius * math.cos(theta))


def phase_point_scalars(p):
    """Return ``(|r_vec|, |k_vec|, r_vec . k_vec)`` for a phase point."""
    r_vec = np.asarray(p.r_vec, dtype=float)
    k_vec = np.asarray(p.k_vec, dtype=float)
    return float(np.linalg.norm(r_vec)), float(np.linalg.norm(k_vec)), float(r_vec @ k_vec)


def as_vectors(r_vec, k_vec):
    """Broadcast position and wavevector arrays to a common ``(..., 3)`` shape."""
    r_vec = np.asarray(r_vec, dtype=float)
    k_vec = np.asarray(k_vec, dtype=float)
    if r_vec.shape[-1:] != (3,) or k_vec.shape[-1:] != (3,):
        raise ValueError("last axis of r_vec and k_vec must have length 3")
    return np.broadcast_arrays(r_vec, k_vec)
