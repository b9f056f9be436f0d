"""Oscillator-mode (n != 0) contributions for pointlike detectors.

Each cavity mode k_n = 2 pi n / L contributes a Gaussian integral that can be
done in closed form, so every element reduces to a single series in n.  With

    a = 2 pi T / L,   b = w T,   x = dx / L,

the per-mode results are

    L_ij   = lam_i lam_j T^2 sum cos(2 pi n x) exp(-(b + a n)^2) / n
    M      = -lam_A lam_B T^2 e^{-b^2} sum cos(2 pi n x) conj(w(a n)) / n
    L^A_ij = lam_i lam_j a^2 sum n cos(2 pi n x) exp(-(b + a n)^2)
    M^A    = -lam_A lam_B a^2 e^{-b^2} sum n cos(2 pi n x) conj(w(a n))

where w is the Faddeeva function; for real y,
conj(w(y)) = exp(-y^2) - 2i D(y)/sqrt(pi) = erfcx(i y), D = Dawson's integral.
The Gaussian factors make the L-type sums converge super-exponentially.
The Dawson part of the time-ordered sums decays only algebraically, so its
tail is summed analytically from the asymptotic expansion of D together with
closed forms of sum_n cos(2 pi n x) / n^{2m} (Bernoulli polynomials).
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import special

from . import kernels
from .config import SYMMETRY_RTOL, DetectorParams, FieldConfig
from .errors import AsymmetricDetectors, CutoffTooSmall, DivergentElement, UnsupportedDimension

EPS = np.finfo(float).eps
# smallest a*N at which the Dawson asymptotic remainder is below twice the
# first omitted term (checked for up to _J_MAX + 1 terms)
Y_MIN = 6.0
_J_MAX = 7
N_LIMIT = 20_000_000
DUAL_MAX_A = 1.0
DEFAULT_W_CUTOFF = 1000


@dataclass(frozen=True)
class SeriesResult:
    """Value of a mode series with a bound on the neglected part."""

    value: complex
    bound: float
    n_max: int

    def __complex__(self):
        return complex(self.value)

    def __float__(self):
        return float(np.real(self.value))


def _dawson_coeff(j):
    # D(y) ~ sum_j d_j y^{-(2j+1)},  d_j = (2j-1)!! / 2^{j+1}
    return math.prod(range(1, 2 * j, 2)) / 2.0 ** (j + 1)


def reduced_fraction(dx, length):
    """dx / L folded into [0, 1/2]; every oscillator element depends on it only."""
    x = math.fmod(dx / length, 1.0)
    if x < 0:
        x += 1.0
    return min(x, 1.0 - x)


def _sin_turns(phase):
    return float(kernels.cos_turns(np.asarray(phase - 0.25)))


@functools.lru_cache(maxsize=None)
def _bernoulli_poly_coeffs(n):
    """Exact coefficients C(n, k) B_k of the Bernoulli polynomial B_n(x).

    scipy.special.bernoulli is only good to ~1e-11, which is visible here.
    """
    b = [Fraction(1)]
    for j in range(1, n + 1):
        b.append(-sum(math.comb(j + 1, k) * b[k] for k in range(j)) / (j + 1))
    return tuple(float(math.comb(n, k) * b[k]) for k in range(n + 1))


def cos_power_closed(m, x):
    """sum_{n>=1} cos(2 pi n x) / n^{2m} for m >= 1 and 0 <= x <= 1.

    Returns ``(value, rounding_error)``.
    """
    coeffs = np.array(_bernoulli_poly_coeffs(2 * m))
    k = np.arange(2 * m + 1)
    terms = coeffs * x ** (2 * m - k)
    pref = (-1) ** (m + 1) * (2 * np.pi) ** (2 * m) / (2 * math.factorial(2 * m))
    val = pref * float(np.sum(terms))
    err = 4 * EPS * abs(pref) * float(np.sum(np.abs(terms)))
    return val, err


def cos_tail(m, x, n):
    """sum_{k>n} cos(2 pi k x) / k^{2m}, with the m = 0 series Abel-summed.

    Returns ``(value, rounding_error)``.
    """
    if m == 0:
        s = _sin_turns(0.5 * x)
        if s == 0.0:
            raise DivergentElement("constant-weight tail diverges at coincidence")
        val = -_sin_turns((2 * n + 1) * 0.5 * x) / (2 * s)
        return val, 4 * EPS / abs(s)
    closed, err = cos_power_closed(m, x)
    k = np.arange(1, n + 1, dtype=float)
    partial = kernels.weighted_cos_sum(k ** (-2.0 * m), x)
    zeta = float(special.zeta(2 * m))
    return closed - partial, err + 4 * EPS * zeta


def _check_field(field: FieldConfig):
    if field.n_dim != 1:
        raise UnsupportedDimension("oscillator modes are implemented for n_dim = 1 only")


def _pair_scales(det_a, det_b):
    wa, wb = det_a.frequency, det_b.frequency
    if not (math.isclose(wa, wb, rel_tol=SYMMETRY_RTOL)
            and math.isclose(det_a.width, det_b.width, rel_tol=SYMMETRY_RTOL)):
        raise AsymmetricDetectors(f"frequencies {wa}, {wb}; widths {det_a.width}, {det_b.width}")
    return wa, det_a.width


# --------------------------------------------------------------------------
# Gaussian-weighted series:  sum_n n^p cos(2 pi n x) exp(-(b + a n)^2)

def gaussian_tail_bound(a, b, power, n):
    """Bound on sum_{k>n} k^p exp(-(b + a k)^2) via a geometric majorant."""
    n1 = n + 1.0
    lead = n1**power * math.exp(-((b + a * n1) ** 2))
    if lead == 0.0:
        return 0.0
    ratio = math.exp(-a * a * (2 * n1 + 1) - 2 * a * b)
    if power > 0:
        ratio *= ((n1 + 1) / n1) ** power
    if ratio >= 1.0:
        return math.inf
    return lead / (1.0 - ratio)


def gaussian_series(a, b, x, power, tol, n_max=None):
    """Sum the Gaussian mode series to relative accuracy ``tol``.

    With ``n_max`` given, the sum is truncated there and CutoffTooSmall is
    raised if the tail bound exceeds ``tol * |sum|``; otherwise the cutoff is
    doubled until the bound is met.
    """
    if n_max is not None:
        n = int(n_max)
        val = kernels.gaussian_mode_sum(a, b, x, power, n)
        bound = gaussian_tail_bound(a, b, power, n)
        if bound > tol * abs(val) and bound > 1e-300:
            raise CutoffTooSmall(f"n_max = {n}: tail bound {bound:.3g} vs value {val:.3g}")
        return SeriesResult(val, bound, n)
    n = max(4, math.ceil(4.0 / a))
    while True:
        val = kernels.gaussian_mode_sum(a, b, x, power, n)
        bound = gaussian_tail_bound(a, b, power, n)
        if bound <= tol * abs(val) or bound < 1e-300:
            return SeriesResult(val, bound, n)
        if n > N_LIMIT:
            raise CutoffTooSmall(f"Gaussian series not converged at n = {n}")
        n *= 2


# --------------------------------------------------------------------------
# Dawson series:  sum_n n^q cos(2 pi n x) D(a n) exp(-beta n),  q = -1 or +1

def _tail_powers(q):
    # exponent of n in the j-th asymptotic term is q - 2j - 1 = -2m
    return [j + (1 - q) // 2 for j in range(_J_MAX + 2)]


def _dawson_weights(a, q, n, beta=0.0):
    k = np.arange(1, n + 1, dtype=float)
    w = k**q * special.dawsn(a * k)
    if beta:
        w *= np.exp(-beta * k)
    return w


def _dawson_head(a, q, x, n, beta=0.0):
    return kernels.weighted_cos_sum(_dawson_weights(a, q, n, beta), x)


def _rounding_floor(a, q, beta=0.0):
    """Accuracy floor of the per-mode representation: a few ulps of sum |term|.

    Series whose value cancels far below this level (for instance the
    derivative coupling at large separations) cannot be resolved any better
    by a larger cutoff.
    """
    n0 = min(max(1, math.ceil(16.0 / a)), N_LIMIT)
    return 8 * EPS * float(np.sum(np.abs(_dawson_weights(a, q, n0, beta))))


def _asymptotic_tail(a, q, x, n, n_terms):
    ms = _tail_powers(q)
    val, err = 0.0, 0.0
    for j in range(n_terms):
        c = _dawson_coeff(j) * a ** (-(2 * j + 1))
        t, e = cos_tail(ms[j], x, n)
        val += c * t
        err += c * e
    return val, err


def _truncation_bound(a, q, n, n_terms):
    """Bound on the asymptotic terms beyond ``n_terms`` summed over k > n."""
    m = _tail_powers(q)[n_terms]
    c = _dawson_coeff(n_terms) * a ** (-(2 * n_terms + 1))
    return 2.0 * c * n ** (1 - 2 * m) / (2 * m - 1)


def _cancellation_bound(a, q, x, n_terms):
    ms = _tail_powers(q)
    err = 0.0
    for j in range(n_terms):
        c = _dawson_coeff(j) * a ** (-(2 * j + 1))
        if ms[j] == 0:
            s = abs(_sin_turns(0.5 * x))
            err += c * 4 * EPS / s if s else math.inf
        else:
            err += c * (cos_power_closed(ms[j], x)[1] + 4 * EPS * float(special.zeta(2 * ms[j])))
    return err


def _plan(a, q, x, tol_abs, n_max=None):
    """Choose (cutoff, number of asymptotic terms) meeting ``tol_abs``.

    Returns ``(n, n_terms, bound)``.  The bound is the asymptotic truncation
    bound plus the rounding error of the closed-form tails.
    """
    n_low = max(1, math.ceil(Y_MIN / a))
    best = None
    j_min = 1 if q == 1 else 0  # the q = +1 series needs at least the constant tail
    for n_terms in range(j_min, _J_MAX + 1):
        cancel = _cancellation_bound(a, q, x, n_terms)
        if cancel > 0.5 * tol_abs:
            break
        if n_max is not None:
            n = int(n_max)
            if n < n_low:
                break
            bound = _truncation_bound(a, q, n, n_terms) + cancel
            if best is None or bound < best[2]:
                best = (n, n_terms, bound)
            continue
        m = _tail_powers(q)[n_terms]
        c = _dawson_coeff(n_terms) * a ** (-(2 * n_terms + 1))
        need = (2.0 * c / ((2 * m - 1) * 0.5 * tol_abs)) ** (1.0 / (2 * m - 1))
        n = max(n_low, math.ceil(need))
        if best is None or n < best[0]:
            best = (n, n_terms, _truncation_bound(a, q, n, n_terms) + cancel)
    if best is None or best[2] > tol_abs:
        have = "none" if best is None else f"{best[2]:.3g}"
        raise CutoffTooSmall(f"Dawson series: bound {have} exceeds {tol_abs:.3g} "
                             f"(a = {a:.4g}, n_max = {n_max})")
    if best[0] > N_LIMIT:
        raise CutoffTooSmall(f"Dawson series needs {best[0]} terms (> {N_LIMIT})")
    return best


def _dual_roots(a, x, t_max=40.0):
    # positive t with a t = 2 pi (k -+ x) for integer k
    k_hi = int(t_max * a / (2 * math.pi)) + 2
    k = np.arange(0, k_hi + 1, dtype=float)
    t = np.concatenate([2 * math.pi * (k + x) / a, 2 * math.pi * (k[1:] - x) / a])
    return np.sort(t[(t > 0) & (t <= t_max)])


def dawson_series_dual(a, x, q):
    """Exact resummation of the Dawson series, efficient for a <~ 1.

    Writing D(y) = (1/2) int_0^inf e^{-t^2/4} sin(y t) dt, the sum over n
    becomes a sawtooth (q = -1) or a Dirac comb (q = +1) in t, leaving only
    terms at the points t_r where a t_r = 2 pi (k -+ x):

        q = -1:  -a/2 + (pi^1.5 / 4) [sum_r erfc(t_r / 2) + (x == 0)]
        q = +1:  -(pi / 8a^2) sum_r t_r exp(-t_r^2 / 4)        (x != 0)

    The constant-weight part is Abel summed, as in the mode series.
    Returns ``(value, rounding_error)``.
    """
    t = _dual_roots(a, x)
    if q == -1:
        terms = special.erfc(0.5 * t)
        total = float(np.sum(terms)) + (1.0 if x == 0.0 else 0.0)
        val = -0.5 * a + 0.25 * math.pi**1.5 * total
        err = 8 * EPS * (0.5 * a + 0.25 * math.pi**1.5 * total)
        return val, err
    if x == 0.0:
        raise DivergentElement("derivative-coupling time-ordered element diverges at coincidence")
    val = -math.pi / (8 * a * a) * float(np.sum(t * np.exp(-0.25 * t * t)))
    return val, 8 * EPS * abs(val) + 1e-300


def dawson_series(a, x, q, tol, n_max=None, beta=0.0, scale=None, method="auto"):
    """sum_{n>=1} n^q cos(2 pi n x) D(a n) e^{-beta n} for q in {-1, +1}.

    ``tol`` is relative to ``scale`` (default: the magnitude of the sum).
    For q = +1 without regulator the series diverges when x is an integer.
    ``method`` is ``"modes"`` (explicit sum up to a cutoff plus asymptotic
    tail), ``"dual"`` (exact resummation, see :func:`dawson_series_dual`) or
    ``"auto"``: dual for a <= DUAL_MAX_A unless a cutoff is imposed.
    """
    if q not in (-1, 1):
        raise ValueError("q must be -1 or +1")
    if beta > 0:
        return _dawson_series_regulated(a, x, q, tol, n_max, beta, scale)
    if q == 1 and x == 0.0:
        raise DivergentElement("derivative-coupling time-ordered element diverges at coincidence")
    if method == "auto":
        method = "dual" if (n_max is None and a <= DUAL_MAX_A) else "modes"
    if method == "dual":
        val, err = dawson_series_dual(a, x, q)
        return SeriesResult(val, err, 0)
    floor = _rounding_floor(a, q)
    if scale is None:
        n0 = min(max(1, math.ceil(16.0 / a)), N_LIMIT)
        est = _dawson_head(a, q, x, n0) + _asymptotic_tail(a, q, x, n0, 3)[0]
        scale = abs(est)
    tol_abs = max(tol * scale, floor, 1e-300)
    n, n_terms, bound = _plan(a, q, x, tol_abs, n_max)
    w = _dawson_weights(a, q, n)
    head = kernels.weighted_cos_sum(w, x)
    # long heads (small a) accumulate rounding well above the n0-term floor
    head_err = 4 * EPS * float(np.sum(np.abs(w)))
    tail, _ = _asymptotic_tail(a, q, x, n, n_terms)
    return SeriesResult(head + tail, bound + max(floor, head_err), n)


def _regulated_const_tail(x, beta, n):
    # sum_{k>n} e^{-beta k} cos(2 pi k x), exact
    zn = math.exp(-beta * (n + 1))
    if x == 0.0:
        return zn / -math.expm1(-beta)
    c, s = float(kernels.cos_turns(np.asarray(x))), _sin_turns(x)
    cn, sn = float(kernels.cos_turns(np.asarray((n + 1) * x))), _sin_turns((n + 1) * x)
    r = math.exp(-beta)
    num = complex(cn, sn) * zn
    den = complex(1.0 - r * c, -r * s)
    return (num / den).real


def _dawson_series_regulated(a, x, q, tol, n_max, beta, scale):
    def evaluate(n):
        head = _dawson_head(a, q, x, n, beta)
        # constant asymptotic term exactly for q = +1, rest bounded
        if q == 1:
            tail = _dawson_coeff(0) / a * _regulated_const_tail(x, beta, n)
            m1, c1 = 1, _dawson_coeff(1) * a**-3
        else:
            tail = 0.0
            m1, c1 = 1, _dawson_coeff(0) / a
        bound = 2.0 * math.exp(-beta * (n + 1)) * c1 * n ** (1 - 2 * m1) / (2 * m1 - 1)
        return head + tail, bound

    floor = _rounding_floor(a, q, beta)
    if n_max is not None:
        n = int(n_max)
        val, bound = evaluate(n)
        ref = abs(val) if scale is None else scale
        if a * n < Y_MIN or bound > max(tol * ref, floor):
            raise CutoffTooSmall(f"regulated Dawson series: n_max = {n} too small")
        return SeriesResult(val, bound + floor, n)
    n = max(1, math.ceil(Y_MIN / a))
    while True:
        val, bound = evaluate(n)
        ref = abs(val) if scale is None else scale
        if bound <= max(tol * ref, floor):
            return SeriesResult(val, bound + floor, n)
        if n > N_LIMIT:
            raise CutoffTooSmall(f"regulated Dawson series not converged at n = {n}")
        n *= 2


# --------------------------------------------------------------------------
# matrix elements

def _geometry(det_a, det_b, field):
    _check_field(field)
    w, T = _pair_scales(det_a, det_b)
    a = 2 * math.pi * T / field.length
    x = reduced_fraction(det_b.position - det_a.position, field.length)
    lam2 = det_a.coupling_strength(1) * det_b.coupling_strength(1)
    return w, T, a, x, lam2


def _l_series(det_a, det_b, field, power):
    w, T, a, x, lam2 = _geometry(det_a, det_b, field)
    res = gaussian_series(a, w * T, x, power, field.quad_tol, field.n_max)
    pref = lam2 * (T**2 if power == -1 else a**2)
    return SeriesResult(pref * res.value, abs(pref) * res.bound, res.n_max)


def l_osc(det: DetectorParams, field: FieldConfig) -> SeriesResult:
    """Oscillator part of the excitation probability L_jj (amplitude coupling)."""
    return _l_series(det, det, field, -1)


def l_osc_cross(det_a: DetectorParams, det_b: DetectorParams, field: FieldConfig) -> SeriesResult:
    """Oscillator part of L_AB.  Real, hence equal to L_BA."""
    return _l_series(det_a, det_b, field, -1)


def l_osc_derivative(det: DetectorParams, field: FieldConfig) -> SeriesResult:
    return _l_series(det, det, field, 1)


def l_osc_cross_derivative(det_a, det_b, field) -> SeriesResult:
    return _l_series(det_a, det_b, field, 1)


def _m_series(det_a, det_b, field, q, beta=0.0, x=None):
    w, T, a, x0, lam2 = _geometry(det_a, det_b, field)
    x = x0 if x is None else x
    tol = field.quad_tol
    if beta:
        # exp(-(a n)^2 - beta n) = exp(s^2) exp(-(s + a n)^2) with s = beta / (2a)
        s = beta / (2 * a)
        g = gaussian_series(a, s, x, q, tol, field.n_max)
        g = SeriesResult(g.value * math.exp(s * s), g.bound * math.exp(s * s), g.n_max)
    else:
        g = gaussian_series(a, 0.0, x, q, tol, field.n_max)
    # Dawson part tolerance relative to the magnitude of the complex bracket
    k = 2.0 / math.sqrt(math.pi)
    d0 = dawson_series(a, x, q, 1e-3, None, beta) if field.n_max is None else None
    scale = max(abs(g.value), k * abs(d0.value) if d0 is not None else 0.0) / k
    d = dawson_series(a, x, q, tol, field.n_max, beta, scale=scale or None)
    bracket = g.value - 1j * k * d.value
    pref = -lam2 * math.exp(-((w * T) ** 2)) * (T**2 if q == -1 else a**2)
    bound = abs(pref) * (g.bound + k * d.bound)
    return SeriesResult(pref * bracket, bound, max(g.n_max, d.n_max))


def m_osc(det_a: DetectorParams, det_b: DetectorParams, field: FieldConfig) -> SeriesResult:
    """Oscillator part of the time-ordered element M (amplitude coupling)."""
    return _m_series(det_a, det_b, field, -1)


def m_osc_derivative(det_a, det_b, field) -> SeriesResult:
    """Oscillator part of M for derivative coupling; diverges for coincident detectors."""
    return _m_series(det_a, det_b, field, 1)


def k_osc(det: DetectorParams, field: FieldConfig) -> SeriesResult:
    """Oscillator part of K: half of M for the detector paired with itself."""
    r = _m_series(det, det, field, -1, x=0.0)
    return SeriesResult(0.5 * r.value, 0.5 * r.bound, r.n_max)


def k_osc_derivative(det: DetectorParams, field: FieldConfig) -> SeriesResult:
    """Derivative-coupling K, regulated by exp(-k_n epsilon) with epsilon = field.epsilon.

    The unregulated element is UV divergent (the derivative kernel behaves
    like 1/dt^2 at coincidence); the result grows like L/epsilon.
    """
    beta = 2 * math.pi * field.epsilon / field.length
    r = _m_series(det, det, field, 1, beta=beta, x=0.0)
    return SeriesResult(0.5 * r.value, 0.5 * r.bound, r.n_max)


# --------------------------------------------------------------------------
# Wightman function

def wightman_osc(dt, dx, field: FieldConfig, n_max=None, strict=False) -> SeriesResult:
    """Truncated mode sum sum_{0<|n|<=N} e^{-i|k_n| dt + i k_n dx} / (4 pi |n|).

    The sum converges only like 1/N.  ``bound`` is the summation-by-parts
    estimate (1/4pi) sum_{u, v} 1/((N+1) |sin(pi s/L)|) over the two null
    separations s = dt -+ dx; it is infinite on the light cone, where the
    partial sum is returned as is.  ``strict=True`` raises CutoffTooSmall when
    the bound exceeds ``field.quad_tol * |W|``.
    """
    _check_field(field)
    n = int(n_max or field.n_max or DEFAULT_W_CUTOFF)
    val = kernels.wightman_mode_sum(dt, dx, field.length, n)
    dt_a, dx_a = np.broadcast_arrays(np.asarray(dt, dtype=float), np.asarray(dx, dtype=float))
    bound = np.zeros(dt_a.shape)
    for s in (dt_a - dx_a, dt_a + dx_a):
        frac = np.mod(s / field.length, 1.0)
        sn = np.abs(np.sin(np.pi * frac))
        with np.errstate(divide="ignore"):
            bound = bound + np.where(sn > 0, 1.0 / ((n + 1) * sn), np.inf)
    bound = bound / (4 * np.pi)
    finite = np.isfinite(bound)
    if strict and np.any(finite & (bound > field.quad_tol * np.abs(val))):
        raise CutoffTooSmall(f"W mode sum at n_max = {n}: tail bound {np.max(bound[finite]):.3g}")
    if np.ndim(val) == 0:
        return SeriesResult(complex(val), float(bound), n)
    return SeriesResult(val, bound, n)


def wightman_osc_log(dt, dx, field: FieldConfig, epsilon):
    """Closed form -(1/4pi) sum log(1 - exp(-2 pi i (dt - i eps -+ dx)/L))."""
    dx = np.asarray(dx, dtype=float)
    dt = np.asarray(dt, dtype=complex) - 1j * epsilon
    if dx.ndim == 0:
        out = kernels.log_kernel(dt, float(dx), field.length)
    else:
        out = np.array([kernels.log_kernel(t, float(xi), field.length)
                        for t, xi in zip(*np.broadcast_arrays(dt, dx))]).reshape(np.broadcast(dt, dx).shape)
    return complex(out) if np.ndim(out) == 0 else out


def wightman_osc_extrapolated(dt, dx, field: FieldConfig, eps_factors=(1e-3, 1e-4, 1e-5)):
    """Regulated closed form extrapolated to epsilon -> 0 (epsilon taken relative to L)."""
    from .quadrature import richardson_epsilon

    samples = [(f * field.length, wightman_osc_log(dt, dx, field, f * field.length))
               for f in eps_factors]
    return richardson_epsilon(samples)
