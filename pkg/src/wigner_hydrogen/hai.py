"""The hydrogen-atom generating integral.

    I(r, k, r.k, b1, b2) = int_0^1 du exp(4 i u r.k) exp(-2 r C(u)) / C(u)
    C(u)^2 = u b1^2 + (1 - u) b2^2 + 4 u (1 - u) k^2

Derivatives with respect to ``beta1 = b1^2``, ``beta2 = b2^2`` and the
Cartesian components of ``k_vec`` are taken analytically under the integral
sign.  Writing ``X = C^2`` the integrand is ``phi(X) * exp(4 i u r.k)`` with
``phi(X) = exp(-2 r sqrt(X)) / sqrt(X)``; ``X`` is linear in the betas and
quadratic in ``k_vec``, so every derivative reduces to a finite sum of
``phi^(m)(X)`` times polynomials in ``u``, ``k_vec`` and ``r_vec``.

Quadrature is composite Gauss-Legendre: [0, 1] is first cut into panels
over which the phase advances by at most ``Config.panel_fraction``, with
geometric grading into the boundary layers that ``C`` develops at both
ends for large ``k``; panels are then bisected until the 16-point and
8-point results agree.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

from numba import njit

from .core import Config, ConvergenceFailure, FeynmanParams, PhasePoint, as_vectors

#: Requests whose total phase ``4 r k`` exceeds this are refused.
MAX_PHASE = 1e5
MAX_DEPTH = 40
#: Bisections allowed per point beyond the initial panels.
MAX_PANELS = 20_000
GL_ORDER = 16


@dataclass(frozen=True)
class DerivOrder:
    """Multi-index of a derivative: orders in beta1, beta2 and (kx, ky, kz)."""

    beta1: int = 0
    beta2: int = 0
    k: tuple = (0, 0, 0)

    def __post_init__(self):
        k = tuple(int(v) for v in self.k)
        object.__setattr__(self, "k", k)
        if len(k) != 3 or min(k) < 0 or max(k) > 2:
            raise ValueError(f"k derivative orders must be three integers in 0..2, got {k}")
        if self.beta1 < 0 or self.beta2 < 0 or self.beta1 + self.beta2 > 4:
            raise ValueError("beta derivative orders must be nonnegative with sum <= 4")

    @classmethod
    def coerce(cls, value):
        if isinstance(value, DerivOrder):
            return value
        if len(value) == 2:
            return cls(value[0], value[1])
        i, j, alpha = value
        if isinstance(alpha, (int, np.integer)):
            alpha = (0, 0, alpha)
        return cls(i, j, alpha)

    @property
    def x_order(self):
        """Highest derivative of ``phi`` with respect to ``X = C^2`` that appears."""
        return self.beta1 + self.beta2 + sum(self.k)

    def __iter__(self):
        return iter((self.beta1, self.beta2, self.k))


@dataclass(frozen=True)
class HaiRequest:
    point: PhasePoint
    params: FeynmanParams
    deriv_order: DerivOrder = DerivOrder()

    def __post_init__(self):
        object.__setattr__(self, "deriv_order", DerivOrder.coerce(self.deriv_order))

    @property
    def scalars(self):
        return self.point.scalars


@dataclass(frozen=True)
class HaiValue:
    """Complex integral value and its absolute quadrature error estimate."""

    value: complex
    est_error: float


def c_of_u(u, params, k):
    """Evaluate ``C(u)``; ``u`` may be an array but must lie in [0, 1]."""
    u = np.asarray(u, dtype=float)
    if np.any((u < 0) | (u > 1)):
        raise ValueError("u must lie in [0, 1]")
    c = np.sqrt(u * params.beta1 + (1 - u) * params.beta2 + 4 * u * (1 - u) * k * k)
    return float(c) if c.ndim == 0 else c


@lru_cache(maxsize=None)
def _gauss_legendre(n):
    return np.polynomial.legendre.leggauss(n)


@lru_cache(maxsize=None)
def _phi_coefficients(max_order):
    """Table ``t[m, p]`` with ``phi^(m)(X) = exp(-2rC) sum_p t[m, p] r^(2m+1-p) C^-p``."""
    table = np.zeros((max_order + 1, 2 * max_order + 2))
    table[0, 1] = 1.0
    for m in range(max_order):
        for p in range(1, 2 * m + 2):
            c = table[m, p]
            if c:
                table[m + 1, p + 1] -= c
                table[m + 1, p + 2] -= 0.5 * p * c
    return table


def _k_derivative_terms(alpha):
    """Expand ``d^alpha [phi(X) E]`` into ``(phase_powers, k_powers, w_power, x_shift, coef)``.

    ``E = exp(4 i u r.k)`` contributes ``(4 i u r_a)`` per derivative and
    ``X = X0 + w |k|^2`` contributes ``2 w k_a`` per first-order hit and ``w``
    per paired hit, with ``w = 4 u (1 - u)``.
    """
    terms = []
    for gamma in itertools.product(*(range(a + 1) for a in alpha)):
        phase_pows = tuple(a - g for a, g in zip(alpha, gamma))
        c_phase = math.prod(math.comb(a, g) for a, g in zip(alpha, gamma))
        for pairs in itertools.product(*(range(g // 2 + 1) for g in gamma)):
            k_pows = tuple(g - 2 * j for g, j in zip(gamma, pairs))
            c_h = math.prod(math.factorial(g) // (math.factorial(j) * math.factorial(g - 2 * j))
                            for g, j in zip(gamma, pairs))
            w_pow = sum(k_pows) + sum(pairs)
            coef = c_phase * c_h * 2 ** sum(k_pows)
            terms.append((phase_pows, k_pows, w_pow, sum(gamma) - sum(pairs), coef))
    return terms


def _term_tables(orders):
    """Flatten derivative orders into arrays consumed by the compiled kernel."""
    orders = [DerivOrder.coerce(o) for o in orders]
    rows = []
    for col, order in enumerate(orders):
        base = order.beta1 + order.beta2
        for phase_pows, k_pows, w_pow, x_shift, coef in _k_derivative_terms(order.k):
            rows.append((col, base + x_shift, coef, w_pow, phase_pows, k_pows))
    max_m = max(o.x_order for o in orders)
    return (
        _phi_coefficients(max_m),
        np.array([row[0] for row in rows], dtype=np.int64),
        np.array([row[1] for row in rows], dtype=np.int64),
        np.array([row[2] for row in rows], dtype=float),
        np.array([row[3] for row in rows], dtype=np.int64),
        np.array([row[4] for row in rows], dtype=np.int64).reshape(-1, 3),
        np.array([row[5] for row in rows], dtype=np.int64).reshape(-1, 3),
        np.array([o.beta1 for o in orders], dtype=np.int64),
        np.array([o.beta2 for o in orders], dtype=np.int64),
    )


@njit(cache=True)
def _eval_nodes(u, r, k2, dot, beta1, beta2, coef_r, t_const, t_col, t_m, t_upow, t_ompow,
                t_wpow, ncol, out):
    # coef_r[m, p] = table[m, p] r^(2m+1-p); t_const folds coef, (4 i r_a)^pp and k_a^kp
    max_m = coef_r.shape[0] - 1
    npow = 2 * max_m + 2
    phis = np.empty(max_m + 1, dtype=np.complex128)
    icp = np.empty(npow)
    up = np.empty(npow)
    omp = np.empty(npow)
    wp = np.empty(npow)
    for n in range(u.shape[0]):
        x = u[n]
        om = 1.0 - x
        w = 4.0 * x * om
        c = math.sqrt(x * beta1 + om * beta2 + w * k2)
        ic = 1.0 / c
        ph = 4.0 * x * dot
        env = math.exp(-2.0 * r * c) * complex(math.cos(ph), math.sin(ph))
        icp[0] = up[0] = omp[0] = wp[0] = 1.0
        for j in range(1, npow):
            icp[j] = icp[j - 1] * ic
            up[j] = up[j - 1] * x
            omp[j] = omp[j - 1] * om
            wp[j] = wp[j - 1] * w
        for m in range(max_m + 1):
            acc = 0.0
            for p in range(m + 1, 2 * m + 2):
                acc += coef_r[m, p] * icp[p]
            phis[m] = env * acc
        for col in range(ncol):
            out[n, col] = 0.0
        for t in range(t_col.shape[0]):
            out[n, t_col[t]] += (t_const[t] * (up[t_upow[t]] * omp[t_ompow[t]] * wp[t_wpow[t]])
                                 * phis[t_m[t]])


@njit(cache=True)
def _panel_bound(c_min, r, k, rpow, table, t_col, t_m, t_coef, t_ppow, t_kpow, ncol):
    # every polynomial factor is bounded through |u|, w <= 1, |r_a| <= r, |k_a| <= k
    max_m = table.shape[0] - 1
    env = math.exp(-2.0 * r * c_min)
    phib = np.empty(max_m + 1)
    for m in range(max_m + 1):
        acc = 0.0
        for p in range(m + 1, 2 * m + 2):
            acc += abs(table[m, p]) * rpow[2 * m + 1 - p] * c_min ** (-p)
        phib[m] = env * acc
    totals = np.zeros(ncol)
    for t in range(t_col.shape[0]):
        pp = t_ppow[t, 0] + t_ppow[t, 1] + t_ppow[t, 2]
        kp = t_kpow[t, 0] + t_kpow[t, 1] + t_kpow[t, 2]
        totals[t_col[t]] += abs(t_coef[t]) * (4.0 * r) ** pp * k ** kp * phib[t_m[t]]
    return totals.max()


@njit(cache=True)
def _hai_kernel(rv_all, kv_all, beta1_all, beta2_all, active, tol, panel_fraction, max_depth,
                max_panels,
                x_hi, w_hi, x_lo, w_lo, table, t_col, t_m, t_coef, t_wpow, t_ppow, t_kpow,
                o_b1, o_b2, values, errors, failed, log_lo, log_hi, log_n):
    ncol = o_b1.shape[0]
    max_m = table.shape[0] - 1
    rpow = np.empty(2 * max_m + 2)
    nterm = t_col.shape[0]
    coef_r = np.zeros((max_m + 1, 2 * max_m + 2))
    t_const = np.empty(nterm, dtype=np.complex128)
    t_upow = np.empty(nterm, dtype=np.int64)
    t_ompow = np.empty(nterm, dtype=np.int64)
    for t in range(nterm):
        t_upow[t] = t_ppow[t, 0] + t_ppow[t, 1] + t_ppow[t, 2] + o_b1[t_col[t]]
        t_ompow[t] = o_b2[t_col[t]]
    buf_hi = np.empty((x_hi.shape[0], ncol), dtype=np.complex128)
    buf_lo = np.empty((x_lo.shape[0], ncol), dtype=np.complex128)
    q_hi = np.empty(ncol, dtype=np.complex128)
    q_lo = np.empty(ncol, dtype=np.complex128)
    for i in range(rv_all.shape[0]):
        if not active[i]:
            continue
        rv = rv_all[i]
        kv = kv_all[i]
        b1 = beta1_all[i]
        b2 = beta2_all[i]
        r = math.sqrt(rv[0] ** 2 + rv[1] ** 2 + rv[2] ** 2)
        k2 = kv[0] ** 2 + kv[1] ** 2 + kv[2] ** 2
        k = math.sqrt(k2)
        dot = rv[0] * kv[0] + rv[1] * kv[1] + rv[2] * kv[2]
        rpow[0] = 1.0
        for j in range(1, rpow.shape[0]):
            rpow[j] = rpow[j - 1] * r
        for m in range(max_m + 1):
            for p in range(coef_r.shape[1]):
                coef_r[m, p] = table[m, p] * rpow[2 * m + 1 - p] if p <= 2 * m + 1 else 0.0
        for t in range(nterm):
            f = complex(t_coef[t], 0.0)
            for a in range(3):
                if t_ppow[t, a]:
                    f *= complex(0.0, 4.0 * rv[a]) ** t_ppow[t, a]
                if t_kpow[t, a]:
                    f *= kv[a] ** t_kpow[t, a]
            t_const[t] = f
        n0 = max(1, int(math.ceil(4.0 * abs(dot) / panel_fraction)))
        # C^2 rises from beta2 (u = 0) and beta1 (u = 1) on the scales s0, s1;
        # large k makes these boundary layers thin, so grade panels into them.
        h0 = 1.0 / n0
        e = h0 if n0 > 1 else 0.5
        s0 = b2 / max(b1 - b2 + 4 * k2, 1e-300)
        s1 = b1 / max(b2 - b1 + 4 * k2, 1e-300)
        g0 = 0
        while s0 * 4.0 ** g0 < 0.25 * e and g0 < 60:
            g0 += 1
        g1 = 0
        while s1 * 4.0 ** g1 < 0.25 * e and g1 < 60:
            g1 += 1
        cap = n0 + g0 + g1 + max_depth + 4
        st_a = np.empty(cap)
        st_b = np.empty(cap)
        st_d = np.empty(cap, dtype=np.int64)
        sp = 0
        for j in range(g1, -1, -1):
            st_a[sp] = 1.0 - (e if j == g1 else s1 * 4.0 ** j)
            st_b[sp] = 1.0 - (0.0 if j == 0 else s1 * 4.0 ** (j - 1))
            st_d[sp] = 0
            sp += 1
        for j in range(n0 - 2, 0, -1):
            st_a[sp] = j * h0
            st_b[sp] = (j + 1) * h0
            st_d[sp] = 0
            sp += 1
        for j in range(0, g0 + 1):
            st_a[sp] = 0.0 if j == 0 else s0 * 4.0 ** (j - 1)
            st_b[sp] = e if j == g0 else s0 * 4.0 ** j
            st_d[sp] = 0
            sp += 1
        budget = sp + 2 * max_panels
        while sp > 0:
            if budget == 0:
                failed[i] = True
                break
            budget -= 1
            sp -= 1
            a = st_a[sp]
            b = st_b[sp]
            d = st_d[sp]
            xa = a * b1 + (1 - a) * b2 + 4 * a * (1 - a) * k2
            xb = b * b1 + (1 - b) * b2 + 4 * b * (1 - b) * k2
            bnd = _panel_bound(math.sqrt(min(xa, xb)), r, k, rpow, table,
                               t_col, t_m, t_coef, t_ppow, t_kpow, ncol)
            if bnd <= 0.01 * tol:
                for col in range(ncol):
                    errors[i, col] += bnd * (b - a)
                continue
            mid = 0.5 * (a + b)
            half = 0.5 * (b - a)
            _eval_nodes(mid + half * x_hi, r, k2, dot, b1, b2, coef_r, t_const, t_col, t_m,
                        t_upow, t_ompow, t_wpow, ncol, buf_hi)
            _eval_nodes(mid + half * x_lo, r, k2, dot, b1, b2, coef_r, t_const, t_col, t_m,
                        t_upow, t_ompow, t_wpow, ncol, buf_lo)
            err = 0.0
            for col in range(ncol):
                acc = 0j
                for n in range(x_hi.shape[0]):
                    acc += w_hi[n] * buf_hi[n, col]
                q_hi[col] = half * acc
                acc = 0j
                for n in range(x_lo.shape[0]):
                    acc += w_lo[n] * buf_lo[n, col]
                q_lo[col] = half * acc
                err = max(err, abs(q_hi[col] - q_lo[col]))
            # skipped panels may add up to 0.01 tol per unit width, so accepted
            # panels get the remaining 0.99 and the total stays within tol
            if err <= 0.99 * tol * (b - a) or d >= max_depth:
                if err > 0.99 * tol * (b - a):
                    failed[i] = True
                for col in range(ncol):
                    values[i, col] += q_hi[col]
                    errors[i, col] += abs(q_hi[col] - q_lo[col])
                if log_n[0] < log_lo.shape[0]:
                    log_lo[log_n[0]] = a
                    log_hi[log_n[0]] = b
                    log_n[0] += 1
            else:
                st_a[sp] = mid
                st_b[sp] = b
                st_d[sp] = d + 1
                st_a[sp + 1] = a
                st_b[sp + 1] = mid
                st_d[sp + 1] = d + 1
                sp += 2


def adaptive_gauss_legendre(func, lo, hi, tol, n_high=16, max_depth=MAX_DEPTH):
    """Scalar composite Gauss-Legendre on ``[lo, hi]`` with bisection.

    ``func`` maps an array of nodes to values.  A panel of width ``h`` is
    accepted once the ``n_high`` and ``n_high/2`` point rules differ by at
    most ``tol * h / (hi - lo)``.  Returns ``(value, error_estimate)``.
    """
    x_hi, w_hi = _gauss_legendre(n_high)
    x_lo, w_lo = _gauss_legendre(n_high // 2)
    total = err_total = 0.0
    stack = [(lo, hi, 0)]
    budget = 2 * MAX_PANELS
    while stack:
        budget -= 1
        if budget < 0:
            raise ConvergenceFailure("adaptive quadrature exhausted its panel budget",
                                     achieved=err_total)
        a, b, depth = stack.pop()
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        q_hi = half * np.dot(w_hi, func(mid + half * x_hi))
        q_lo = half * np.dot(w_lo, func(mid + half * x_lo))
        err = abs(q_hi - q_lo)
        if err <= tol * (b - a) / (hi - lo) or depth >= max_depth:
            if err > tol * (b - a) / (hi - lo):
                raise ConvergenceFailure("adaptive quadrature hit maximum depth", achieved=err)
            total += q_hi
            err_total += err
        else:
            stack += [(mid, b, depth + 1), (a, mid, depth + 1)]
    return total, err_total


def _run_kernel(rv, kv, beta1, beta2, active, orders, cfg, log_capacity=0):
    tables = _term_tables(orders)
    ncol = len(tables[-1])
    npts = len(rv)
    values = np.zeros((npts, ncol), dtype=complex)
    errors = np.zeros((npts, ncol))
    failed = np.zeros(npts, dtype=bool)
    log_lo = np.empty(log_capacity)
    log_hi = np.empty(log_capacity)
    log_n = np.zeros(1, dtype=np.int64)
    x_hi, w_hi = _gauss_legendre(GL_ORDER)
    x_lo, w_lo = _gauss_legendre(GL_ORDER // 2)
    _hai_kernel(rv, kv, beta1, beta2, active, cfg.quad_tol, cfg.panel_fraction, MAX_DEPTH,
                MAX_PANELS,
                x_hi, w_hi, x_lo, w_lo, *tables, values, errors, failed, log_lo, log_hi, log_n)
    return values, errors, failed, log_lo[: log_n[0]], log_hi[: log_n[0]]


def hai_eval_many(r_vec, k_vec, beta1, beta2, orders, cfg=None):
    """Evaluate the generating integral and derivatives for many phase points.

    Parameters
    ----------
    r_vec, k_vec : array_like, shape (..., 3)
    beta1, beta2 : float or array_like
        Squared running parameters, broadcast against the points.
    orders : sequence of DerivOrder or tuples
        Derivative multi-indices; all are computed on the same panels.
    cfg : Config, optional

    Returns
    -------
    values : ndarray, complex, shape (..., len(orders))
    errors : ndarray, shape (..., len(orders))
    failed : ndarray of bool, shape (...)
        Points refused by the phase cutoff or not converged; their values are NaN.
    """
    cfg = cfg or Config()
    r_vec, k_vec = as_vectors(r_vec, k_vec)
    shape = r_vec.shape[:-1]
    rv = np.ascontiguousarray(r_vec.reshape(-1, 3))
    kv = np.ascontiguousarray(k_vec.reshape(-1, 3))
    beta1 = np.ascontiguousarray(np.broadcast_to(np.asarray(beta1, dtype=float), shape).reshape(-1))
    beta2 = np.ascontiguousarray(np.broadcast_to(np.asarray(beta2, dtype=float), shape).reshape(-1))
    if np.any(beta1 <= 0) or np.any(beta2 <= 0):
        raise ValueError("beta1 and beta2 must be positive")

    refused = 4.0 * np.linalg.norm(rv, axis=1) * np.linalg.norm(kv, axis=1) > MAX_PHASE
    values, errors, failed, _, _ = _run_kernel(rv, kv, beta1, beta2, ~refused, orders, cfg)
    failed |= refused
    values[failed] = np.nan
    errors[refused] = np.inf
    nord = values.shape[1]
    return (values.reshape(shape + (nord,)), errors.reshape(shape + (nord,)),
            failed.reshape(shape))


def hai_panels(req, cfg=None, capacity=1_000_000):
    """Accepted quadrature panels ``(lo, hi)`` for a request, in order of acceptance.

    Panels dropped by the envelope bound are not listed.
    """
    cfg = cfg or Config()
    rv = np.array([req.point.r_vec])
    kv = np.array([req.point.k_vec])
    _, _, _, lo, hi = _run_kernel(rv, kv, np.array([req.params.beta1]),
                                  np.array([req.params.beta2]), np.array([True]),
                                  [req.deriv_order], cfg, log_capacity=capacity)
    order = np.argsort(lo)
    return lo[order], hi[order]


def hai_eval(req, cfg=None):
    """Evaluate one derivative of the generating integral at one phase point.

    Raises
    ------
    ConvergenceFailure
        If ``4 r k`` exceeds :data:`MAX_PHASE` or the panels cannot be refined
        to ``cfg.quad_tol``.
    """
    cfg = cfg or Config()
    r, k, _ = req.scalars
    if 4.0 * r * k > MAX_PHASE:
        raise ConvergenceFailure(f"phase 4*r*k = {4 * r * k:.3g} exceeds {MAX_PHASE:g}")
    values, errors, failed = hai_eval_many(req.point.r_vec, req.point.k_vec,
                                           req.params.beta1, req.params.beta2,
                                           [req.deriv_order], cfg)
    if failed:
        raise ConvergenceFailure("generating integral did not converge",
                                 achieved=float(errors[0]))
    return HaiValue(complex(values[0]), float(errors[0]))


def feynman_identity_check(A, B, n_points=16, tol=1e-14):
    """Numerically evaluate ``int_0^1 du [u A + (1 - u) B]^-2``, which equals ``1/(A B)``.

    ``n_points`` is the Gauss-Legendre order per panel.
    """
    if not (A > 0 and B > 0):
        raise ValueError("A and B must be positive")
    value, _ = adaptive_gauss_legendre(lambda u: 1.0 / (u * A + (1.0 - u) * B) ** 2, 0.0, 1.0,
                                       tol / min(A, B) ** 2, n_high=max(2, 2 * (n_points // 2)))
    return float(value)


def radial_fourier_kernel(r, C):
    """Closed form of ``int d^3s exp(-2 i s.r) / (s^2 + C^2)^2 = pi^2 exp(-2 r C) / C``."""
    r = np.asarray(r, dtype=float)
    C = np.asarray(C, dtype=float)
    if np.any(C <= 0):
        raise ValueError("C must be positive")
    if np.any(r < 0):
        raise ValueError("r must be nonnegative")
    out = np.pi ** 2 * np.exp(-2.0 * r * C) / C
    return float(out) if out.ndim == 0 else out


def radial_fourier_quadrature(r, C):
    """The same transform reduced to one radial integral and done by QUADPACK.

    ``4 pi / (2 r) int_0^inf s sin(2 s r) / (s^2 + C^2)^2 ds``; at ``r = 0`` the
    sine is replaced by its limit.
    """
    if r == 0:
        val, _ = integrate.quad(lambda s: s * s / (s * s + C * C) ** 2, 0, np.inf,
                                epsabs=1e-13, epsrel=1e-12)
        return 4 * np.pi * val
    # full_output keeps QUADPACK's per-cycle diagnostics out of stderr
    val = integrate.quad(lambda s: s / (s * s + C * C) ** 2, 0, np.inf, weight="sin",
                         wvar=2 * r, epsabs=1e-13, epsrel=1e-12, limlst=200, full_output=1)[0]
    return 4 * np.pi / (2 * r) * val
