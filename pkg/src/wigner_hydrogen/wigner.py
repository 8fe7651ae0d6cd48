"""Wigner functions of hydrogen eigenstates from the generating integral.

Every supported state is a flat sum of terms

    W = Re sum_t  c_t(r_vec, k_vec) exp(i s_t r.k) d_t I  |  b1 = b2 = 1/(n a)

where ``d_t`` is a derivative multi-index of the generating integral ``I``
(see :mod:`wigner_hydrogen.hai`) in ``beta1 = b1^2``, ``beta2 = b2^2`` and
the components of ``k_vec``.

The term lists come from writing each momentum amplitude as a differential
operator acting on ``f(beta) = 1 / (p^2 + beta)``:

* 1s:  ``psi ∝ d_beta f``
* 2s:  ``psi ∝ (d_beta + beta d_beta^2) f``
* 2p:  ``psi ∝ (eps . p) d_beta^2 f``; the momentum polynomial is traded for
  derivatives in ``k_vec`` acting on ``exp(-4 i r.k) I``.

Overall constants were fixed against the brute-force transform in
:mod:`wigner_hydrogen.oracle` and are frozen by regression tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import Config, ConvergenceFailure, PhasePoint, QuantumNumbers, as_vectors
from .hai import DerivOrder, hai_eval_many
from .states import momentum_density, polarization, position_density

BOUND = 1.0 / math.pi ** 3
_AXES = np.eye(3, dtype=int)


@dataclass(frozen=True)
class Term:
    """``coefficient(r_vec, k_vec) * exp(i * phase * r.k) * d^order I``."""

    coefficient: object
    order: DerivOrder
    phase: float = -2.0


@dataclass(frozen=True)
class OperatorSpec:
    qn: QuantumNumbers
    terms: tuple
    b_fix: float
    derived: bool = False
    orders: tuple = field(init=False)

    def __post_init__(self):
        unique = []
        for term in self.terms:
            if term.order not in unique:
                unique.append(term.order)
        object.__setattr__(self, "orders", tuple(unique))


@dataclass(frozen=True)
class WignerValue:
    w: float
    im_residual: float
    est_error: float = 0.0


def _const(value):
    def coefficient(r_vec, k_vec):
        return np.full(r_vec.shape[:-1], value, dtype=complex)
    return coefficient


def _s_terms(qn, a):
    if qn.n == 1:
        return (Term(_const(8.0 / (math.pi ** 3 * a ** 5)), DerivOrder(1, 1)),)
    pref = 1.0 / (math.pi ** 3 * a ** 5)
    beta = 1.0 / (4 * a * a)
    return (
        Term(_const(pref), DerivOrder(1, 1)),
        Term(_const(pref * beta), DerivOrder(1, 2)),
        Term(_const(pref * beta), DerivOrder(2, 1)),
        Term(_const(pref * beta * beta), DerivOrder(2, 2)),
    )


def _p_terms(qn, a):
    # W = P e^{-2i r.k} d_b1^2 { d_b2/2 + (eps*.k)/2 d_b2 (eps.grad - 4i eps.r)
    #     - [(eps*.grad - 4i eps*.r)(eps.grad - 4i eps.r)] / 16 } I,  grad = d/dk_vec
    eps = polarization(qn)
    ceps = eps.conj()
    pref = 1.0 / (4 * math.pi ** 3 * a ** 7)

    def proj(vec, e):
        return vec @ e

    terms = [Term(_const(pref / 2), DerivOrder(2, 1))]
    terms.append(Term(lambda r, k: pref / 2 * proj(k, ceps) * (-4j) * proj(r, eps),
                      DerivOrder(2, 1)))
    for axis in range(3):
        if eps[axis] != 0:
            terms.append(Term(lambda r, k, c=eps[axis]: pref / 2 * proj(k, ceps) * c,
                              DerivOrder(2, 1, _AXES[axis])))
    terms.append(Term(lambda r, k: pref * np.abs(proj(r, eps)) ** 2, DerivOrder(2, 0)))
    for axis in range(3):
        if eps[axis] != 0:
            terms.append(Term(lambda r, k, e=eps[axis]: pref * 0.25j * (
                proj(r, eps) * e.conjugate() + proj(r, ceps) * e), DerivOrder(2, 0, _AXES[axis])))
    for a_ax in range(3):
        for b_ax in range(a_ax, 3):
            weight = ceps[a_ax] * eps[b_ax]
            if a_ax != b_ax:
                weight = weight + ceps[b_ax] * eps[a_ax]
            if abs(weight) > 1e-15:
                terms.append(Term(_const(-pref / 16 * weight),
                                  DerivOrder(2, 0, _AXES[a_ax] + _AXES[b_ax])))
    return tuple(terms)


def operator_catalog(qn, a=1.0):
    """Expanded derivative-term list for state ``qn``.

    Raises
    ------
    UnsupportedState
        For labels outside the implemented set.
    """
    qn = QuantumNumbers.parse(qn)
    terms = _s_terms(qn, a) if qn.l == 0 else _p_terms(qn, a)
    return OperatorSpec(qn, terms, b_fix=1.0 / (qn.n * a), derived=(qn.l == 1 and qn.m != 0))


def wigner_many(qn, r_vec, k_vec, cfg=None):
    """Vectorised Wigner function.

    Returns
    -------
    w, im_residual, est_error : ndarray
        Real part, magnitude of the discarded imaginary part and the
        propagated quadrature error, shaped like the broadcast points.
    failed : ndarray of bool
        Points where the generating integral failed; ``w`` is NaN there.
    """
    cfg = cfg or Config()
    spec = operator_catalog(qn, cfg.bohr_radius)
    r_vec, k_vec = as_vectors(r_vec, k_vec)
    beta = spec.b_fix ** 2
    values, errors, failed = hai_eval_many(r_vec, k_vec, beta, beta, spec.orders, cfg)
    dot = np.einsum("...i,...i->...", r_vec, k_vec)
    total = np.zeros(r_vec.shape[:-1], dtype=complex)
    err = np.zeros(r_vec.shape[:-1])
    for term in spec.terms:
        col = spec.orders.index(term.order)
        coef = term.coefficient(r_vec, k_vec) * np.exp(1j * term.phase * dot)
        total += coef * values[..., col]
        err += np.abs(coef) * errors[..., col]
    return total.real, np.abs(total.imag), err, failed


def wigner_eval(qn, p, cfg=None):
    """Wigner function of state ``qn`` at the phase point ``p``.

    Raises
    ------
    ConvergenceFailure
        Propagated from the generating-integral quadrature.
    """
    w, im, err, failed = wigner_many(qn, p.r_vec, p.k_vec, cfg)
    if failed:
        raise ConvergenceFailure("generating integral did not converge", achieved=float(err))
    return WignerValue(float(w), float(im), float(err))


def wigner_scalar(qn, r, k, theta, cfg=None):
    """Wigner function on ``(r, k, theta)``, with ``r_vec`` along z and ``k_vec`` in the xz plane."""
    r, k, theta = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (r, k, theta)))
    zeros = np.zeros_like(r)
    r_vec = np.stack([zeros, zeros, r], axis=-1)
    k_vec = np.stack([k * np.sin(theta), zeros, k * np.cos(theta)], axis=-1)
    return wigner_many(qn, r_vec, k_vec, cfg)


def _axis_frame(axis):
    norm = np.linalg.norm(axis)
    e3 = axis / norm if norm > 0 else np.array([0.0, 0.0, 1.0])
    trial = np.array([1.0, 0.0, 0.0]) if abs(e3[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = trial - (trial @ e3) * e3
    e1 /= np.linalg.norm(e1)
    return e1, np.cross(e3, e1), e3


def _taper(x):
    """Smooth step: 1 for ``x <= 1/2``, 0 for ``x >= 1``, C-infinity in between."""
    t = np.clip(2.0 * x - 1.0, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        left = np.where(t < 1, np.exp(-1.0 / np.maximum(1.0 - t, 1e-300)), 0.0)
        right = np.where(t > 0, np.exp(-1.0 / np.maximum(t, 1e-300)), 0.0)
    return left / (left + right)


def _ball_grid(axis, cutoff, width, panel_order, n_phi, taper):
    """Nodes and weights on the ball ``|x| <= cutoff``, optionally with a smooth radial taper.

    The polar axis is ``axis``.  Radial panels are at most ``width`` wide
    and half a period of ``exp(2 i k.r)``; the polar node count follows
    the phase range ``4 |r| |k|``.
    """
    axis = np.asarray(axis, dtype=float)
    other_norm = float(np.linalg.norm(axis))
    e1, e2, e3 = _axis_frame(axis)
    if other_norm > 0:
        width = min(width, 0.5 * math.pi / other_norm)
    edges = np.linspace(0.0, cutoff, max(2, math.ceil(cutoff / width)) + 1)
    gx, gw = np.polynomial.legendre.leggauss(panel_order)
    phi = 2 * math.pi * np.arange(n_phi) / n_phi
    nodes, weights = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        rad = 0.5 * (lo + hi) + 0.5 * (hi - lo) * gx
        w_rad = 0.5 * (hi - lo) * gw * rad ** 2
        if taper:
            w_rad = w_rad * _taper(rad / cutoff)
        cx, cw = np.polynomial.legendre.leggauss(12 + math.ceil(1.6 * hi * other_norm))
        R, CX, P = np.meshgrid(rad, cx, phi, indexing="ij")
        SX = np.sqrt(1 - CX ** 2)
        pts = R[..., None] * ((SX * np.cos(P))[..., None] * e1
                              + (SX * np.sin(P))[..., None] * e2 + CX[..., None] * e3)
        wts = w_rad[:, None, None] * cw[None, :, None] * (2 * math.pi / n_phi)
        nodes.append(pts.reshape(-1, 3))
        weights.append(np.broadcast_to(wts, R.shape).reshape(-1))
    return np.concatenate(nodes), np.concatenate(weights)


@dataclass(frozen=True)
class MarginalValue:
    value: float
    est_error: float


# Below this value of |fixed| * cutoff the truncated tail has not started to
# oscillate and is removed by extrapolation in the cutoff instead.
_SMOOTH_TAIL = 0.5


def _marginal(qn, fixed, fixed_is_r, cutoff, scale, cfg, panel_order):
    # W has azimuthal harmonics of order <= 2 about the fixed vector, so
    # five trapezoid nodes are exact for p states and one suffices for s.
    n_phi = 1 if qn.l == 0 else 5

    def ball(radius):
        # only the wavevector tail oscillates; position tails decay exponentially
        nodes, weights = _ball_grid(fixed, radius, scale, panel_order, n_phi, fixed_is_r)
        r_vec, k_vec = (fixed, nodes) if fixed_is_r else (nodes, fixed)
        w, _, err, failed = wigner_many(qn, r_vec, k_vec, cfg)
        if failed.any():
            raise ConvergenceFailure(f"{int(failed.sum())} grid points failed in marginal")
        return float(np.sum(w * weights)), float(np.sum(err * np.abs(weights)))

    if np.linalg.norm(fixed) * cutoff > _SMOOTH_TAIL:
        return MarginalValue(*ball(cutoff))
    # Non-oscillating tail: M(K) = M - c1/K - c3/K^3 - ..., so eliminate the
    # two leading powers from cutoffs K, 2K, 4K.
    m1, e1 = ball(cutoff)
    m2, e2 = ball(2 * cutoff)
    m4, e4 = ball(4 * cutoff)
    two_level = 2 * m2 - m1
    three_level = (16 * m4 - 10 * m2 + m1) / 7
    quad = 3 * e1 + 3 * e2 + 3 * e4
    return MarginalValue(three_level, abs(three_level - two_level) + quad)


def marginal_position(qn, r_vec, cfg=None, k_cutoff=None, panel_order=6, full=False):
    """Integrate the Wigner function over wavevectors at fixed ``r_vec``.

    Approximates ``|psi(r_vec)|^2``.  The wavevector ball has radius
    ``k_cutoff`` (default ``20 / (n a)``) with a smooth taper over its outer
    half.  When ``|r_vec| * k_cutoff`` is small the tail does not oscillate
    and is removed by extrapolating over cutoffs ``K, 2K, 4K``.

    Returns
    -------
    float, or MarginalValue if ``full`` is set.

    Raises
    ------
    ConvergenceFailure
        If any generating-integral evaluation on the grid fails.
    """
    cfg = cfg or Config()
    qn = QuantumNumbers.parse(qn)
    scale = qn.n * cfg.bohr_radius
    cutoff = k_cutoff if k_cutoff is not None else 20.0 / scale
    res = _marginal(qn, np.asarray(r_vec, dtype=float), True, cutoff, 1.0 / scale, cfg,
                    panel_order)
    return res if full else res.value


def marginal_momentum(qn, k_vec, cfg=None, r_cutoff=None, panel_order=6, full=False):
    """Integrate the Wigner function over positions at fixed ``k_vec``.

    Approximates ``|psi_mom(k_vec)|^2 / (2 pi)^3``.  The position ball has
    radius ``r_cutoff`` (default ``30 n a``) and a hard edge, since ``W``
    decays exponentially in ``|r_vec|``.
    """
    cfg = cfg or Config()
    qn = QuantumNumbers.parse(qn)
    scale = qn.n * cfg.bohr_radius
    cutoff = r_cutoff if r_cutoff is not None else 30.0 * scale
    res = _marginal(qn, np.asarray(k_vec, dtype=float), False, cutoff, scale, cfg, panel_order)
    return res if full else res.value


def normalization(qn, cfg=None, k_cutoff=None, r_cutoff=None, panel_order=6, k_order=None,
                  n_theta=2):
    """Phase-space integral of the Wigner function; equals one for a normalised state.

    The innermost integral over ``r_vec`` at fixed ``k_vec`` is the grid of
    :func:`marginal_momentum` with cutoff ``r_cutoff`` (default ``12 n a``,
    where ``W`` has decayed like ``exp(-2 r / (n a))``).  The outer integral
    over ``|k|`` uses Gauss-Legendre panels ending at ``1, 2, 4, 8 / (n a)``
    (s states) or ``1, 2, 4 / (n a)`` (p states).  s states reduce to three
    dimensions ``(r, k, theta)``.  For p states ``W`` is unchanged by a joint
    rotation about z, so the azimuth of ``k_vec`` is dropped and ``n_theta``
    Gauss nodes in ``cos theta_k`` complete the five-dimensional integral;
    the default of two is exact for the quadratic dependence of a p-state
    momentum density on ``cos theta_k``.

    Returns
    -------
    MarginalValue
        Integral and the summed quadrature error estimate.
    """
    cfg = cfg or Config()
    qn = QuantumNumbers.parse(qn)
    scale = qn.n * cfg.bohr_radius
    r_cut = r_cutoff if r_cutoff is not None else 12.0 * scale
    top = k_cutoff if k_cutoff is not None else (8.0 if qn.l == 0 else 4.0) / scale
    edges = [0.0]
    while edges[-1] < top:
        edges.append(min(top, max(1.0 / scale, 2 * edges[-1])))
    if k_order is None:
        k_order = 8 if qn.l == 0 else 6
    gx, gw = np.polynomial.legendre.leggauss(k_order)
    if qn.l == 0:
        cos_t, w_t = np.array([1.0]), np.array([2.0])
    else:
        cos_t, w_t = np.polynomial.legendre.leggauss(n_theta)
    total = err = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        for x, wx in zip(gx, gw):
            k = 0.5 * (lo + hi) + 0.5 * (hi - lo) * x
            weight = 0.5 * (hi - lo) * wx * k * k * 2 * math.pi
            for c, wc in zip(cos_t, w_t):
                k_vec = k * np.array([math.sqrt(1 - c * c), 0.0, c])
                res = marginal_momentum(qn, k_vec, cfg, r_cutoff=r_cut,
                                        panel_order=panel_order, full=True)
                total += weight * wc * res.value
                err += weight * wc * res.est_error
    return MarginalValue(total, err)


def closed_form_density(qn, axis, vec, a=1.0):
    """Exact marginal approximated by :func:`marginal_position` (``axis="r"``) or
    :func:`marginal_momentum` (``axis="k"``)."""
    if axis == "r":
        return float(position_density(qn, vec, a))
    return float(momentum_density(qn, vec, a))
