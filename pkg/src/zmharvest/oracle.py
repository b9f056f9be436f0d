"""Brute-force quadrature references for every density-matrix element.

These never touch the mode-series code.  Zero-mode elements integrate the
Wightman kernel over the switching box, split into the two time orderings
with triangular domains.  Oscillator elements integrate the summed log
kernel -(1/4pi) sum log(1 - exp(-2 pi i (d -+ dx)/L)); in the coordinates
s = t + t', d = t - t' the integrands are entire in s and analytic in the
lower half d-plane, so the contours are deformed (exactly, by Cauchy) to
where the integrand stops oscillating:

* L-type: d -> v - i eta centres the Gaussian saddle of the dominant
  mode, which avoids cancelling exp(-T^2 (w + k)^2)-small results.
* M-type: s -> u + 2 i w T^2 removes the e^{i w s} oscillation, and the
  half-line d > 0 is rotated to the ray d = r e^{-i phi}, away from the
  light-cone singularities.
"""
from __future__ import annotations

import math

import numpy as np

from . import kernels, zeromode
from .config import DetectorParams, FieldConfig, ZeroModeState
from .errors import DivergentElement
from .quadrature import LowerTriangle, QuadResult, Rect, UpperTriangle, integrate2d

REL_TOL = 1e-10
GAUSS_WIDTHS = 12.0  # exp(-GAUSS_WIDTHS^2 / 4) relative truncation in s and d
RAY_ANGLE = math.pi / 8


def _chi(t, T):
    return np.exp(-0.5 * (t / T) ** 2)


def _zm_kernel(state, field, part, derivative):
    if derivative:
        return lambda t, tp: zeromode.wightman_zm_derivative(t, tp, state, field)
    if part == "hadamard":
        return lambda t, tp: zeromode.hadamard_zm(t, tp, state, field)
    if part == "commutator":
        return lambda t, tp: zeromode.commutator_zm(t, tp, field)
    return lambda t, tp: zeromode.wightman_zm(t, tp, state, field)


def _lam2(det_a, det_b, field):
    n = field.n_dim
    return det_a.coupling_strength(n) * det_b.coupling_strength(n)


def zm_l(det: DetectorParams, state: ZeroModeState, field: FieldConfig, part="total",
         derivative=False, partner=None, rel_tol=REL_TOL) -> QuadResult:
    """Quadrature of lam_i lam_j int dt dt' e^{-iW(t-t')} chi chi' K(t, t')."""
    partner = det if partner is None else partner
    w, T = det.frequency, det.width
    kern = _zm_kernel(state, field, part, derivative)

    def f(t, tp):
        return np.exp(-1j * w * (t - tp)) * _chi(t, T) * _chi(tp, T) * kern(t, tp)

    box = 8.0 * T
    res = integrate2d(f, Rect(-box, box, -box, box), rel_tol=rel_tol)
    lam2 = _lam2(det, partner, field)
    return QuadResult(lam2 * res.value, abs(lam2) * res.error, res.n_evals)


def _time_ordered(kern, w, T, rel_tol, both=True):
    box = 8.0 * T

    def lower(t, tp):
        return _chi(t, T) * _chi(tp, T) * np.exp(1j * w * (t + tp)) * kern(t, tp)

    def upper(t, tp):
        return _chi(t, T) * _chi(tp, T) * np.exp(1j * w * (t + tp)) * kern(tp, t)

    lo = integrate2d(lower, LowerTriangle(-box, box), rel_tol=rel_tol)
    if not both:
        return lo
    up = integrate2d(upper, UpperTriangle(-box, box), rel_tol=rel_tol)
    return QuadResult(lo.value + up.value, lo.error + up.error, lo.n_evals + up.n_evals)


def zm_m(det_a: DetectorParams, det_b: DetectorParams, state: ZeroModeState,
         field: FieldConfig, part="total", derivative=False, rel_tol=REL_TOL) -> QuadResult:
    """Quadrature of the time-ordered zero-mode element M (Theta split into triangles)."""
    kern = _zm_kernel(state, field, part, derivative)
    res = _time_ordered(kern, det_a.frequency, det_a.width, rel_tol)
    lam2 = _lam2(det_a, det_b, field)
    return QuadResult(-lam2 * res.value, abs(lam2) * res.error, res.n_evals)


def zm_k(det: DetectorParams, state: ZeroModeState, field: FieldConfig, part="total",
         derivative=False, rel_tol=REL_TOL) -> QuadResult:
    """Quadrature of K = -lam^2 int_{t' < t} chi chi' e^{iw(t+t')} W(t, t')."""
    kern = _zm_kernel(state, field, part, derivative)
    res = _time_ordered(kern, det.frequency, det.width, rel_tol, both=False)
    lam2 = _lam2(det, det, field)
    return QuadResult(-lam2 * res.value, abs(lam2) * res.error, res.n_evals)


# --------------------------------------------------------------------------
# oscillator modes

def _osc_kernel(field, dx, derivative):
    fn = kernels.derivative_kernel if derivative else kernels.log_kernel
    return lambda d: fn(d, dx, field.length)


def dominant_mode(a, b, x, derivative=False, n_search=None):
    """Index of the largest term |cos(2 pi n x)| n^{+-1} exp(-(b + a n)^2).

    Only used to place the saddle of the L-type contour; any choice gives
    the same integral.
    """
    n_search = n_search or max(8, math.ceil(10.0 / a) + 4)
    n = np.arange(1, n_search + 1, dtype=float)
    cos = np.abs(kernels.cos_turns(n * x))
    with np.errstate(divide="ignore"):
        logw = np.log(cos) + (1 if derivative else -1) * np.log(n) - (b + a * n) ** 2
    return int(n[np.argmax(logw)])


def osc_l(det_a: DetectorParams, det_b: DetectorParams, field: FieldConfig,
          derivative=False, rel_tol=REL_TOL) -> QuadResult:
    """Quadrature of the oscillator part of L_AB from the closed-form kernel."""
    w, T, L = det_a.frequency, det_a.width, field.length
    dx = det_b.position - det_a.position
    x = abs(math.fmod(dx / L, 1.0))
    x = min(x, 1 - x)
    a = 2 * math.pi * T / L
    n_star = dominant_mode(a, w * T, x, derivative)
    eta = 2 * T * T * (w + 2 * math.pi * n_star / L)
    kern = _osc_kernel(field, dx, derivative)

    def f(s, v):
        d = v - 1j * eta
        expo = -(s * s) / (4 * T * T) - d * d / (4 * T * T) - 1j * w * d
        k = kern(d)
        return 0.5 * np.exp(expo + np.log(k))

    h = GAUSS_WIDTHS * T
    res = integrate2d(f, Rect(-h, h, -h, h), rel_tol=rel_tol)
    lam2 = _lam2(det_a, det_b, field)
    return QuadResult(lam2 * res.value, abs(lam2) * res.error, res.n_evals)


def _ray_integral(det_a, det_b, field, derivative, epsilon, rel_tol, one_sided):
    w, T, L = det_a.frequency, det_a.width, field.length
    dx = det_b.position - det_a.position
    kern = _osc_kernel(field, dx, derivative)
    x = abs(math.fmod(dx / L, 1.0))
    if derivative and epsilon == 0 and min(x, 1 - x) == 0.0:
        raise DivergentElement("derivative kernel is not integrable at coincidence")
    phi = RAY_ANGLE
    rot = np.exp(-1j * phi)
    r_max = GAUSS_WIDTHS * T / math.sqrt(math.cos(2 * phi))
    h = GAUSS_WIDTHS * T
    sides = 1.0 if one_sided else 2.0

    def f(u, rho):
        # r = r_max rho^2 softens the log singularity at the ray origin
        r = r_max * rho * rho
        d = r * rot
        s_part = np.exp(-(u * u) / (4 * T * T) - (w * T) ** 2)
        d_part = np.exp(-(d * d) / (4 * T * T)) * kern(d - 1j * epsilon)
        return 0.5 * sides * s_part * d_part * rot * 2 * r_max * rho

    return integrate2d(f, Rect(-h, h, 0.0, 1.0), rel_tol=rel_tol)


def osc_m(det_a: DetectorParams, det_b: DetectorParams, field: FieldConfig,
          derivative=False, epsilon=0.0, rel_tol=REL_TOL) -> QuadResult:
    """Quadrature of the time-ordered oscillator element M."""
    res = _ray_integral(det_a, det_b, field, derivative, epsilon, rel_tol, one_sided=False)
    lam2 = _lam2(det_a, det_b, field)
    return QuadResult(-lam2 * res.value, abs(lam2) * res.error, res.n_evals)


def osc_k(det: DetectorParams, field: FieldConfig, derivative=False, epsilon=None,
          rel_tol=REL_TOL) -> QuadResult:
    """Quadrature of K over t' < t only.  Derivative coupling uses the regulator epsilon."""
    if epsilon is None:
        epsilon = field.epsilon if derivative else 0.0
    res = _ray_integral(det, det, field, derivative, epsilon, rel_tol, one_sided=True)
    lam2 = _lam2(det, det, field)
    return QuadResult(-lam2 * res.value, abs(lam2) * res.error, res.n_evals)


# --------------------------------------------------------------------------
# report used by the CLI

def zm_term_scale(det: DetectorParams, state: ZeroModeState, field: FieldConfig) -> float:
    """Size of the uncancelled zero-mode terms.

    lam^2 2 pi T^2 e^{-W^2T^2} (2<Q^2> + 2<P^2> T^2 (1 + W^2 T^2) / M^2).

    Some zero-mode elements vanish identically (e.g. at L = gamma W T^2);
    deviations are then measured against this scale instead of the value.
    """
    w, T, m = det.frequency, det.width, field.effective_mass
    lam2 = _lam2(det, det, field)
    moments = 2 * state.q2 + 2 * state.p2 * T * T * (1 + (w * T) ** 2) / m**2
    return abs(lam2) * 2 * math.pi * T * T * math.exp(-(w * T) ** 2) * moments


def _deviation(value, reference, scale=0.0):
    den = max(abs(reference), scale)
    return abs(value - reference) / den if den else abs(value - reference)


def cross_check(config) -> list:
    """Compare every production element of ``config`` with its quadrature oracle.

    Returns ``(name, production, oracle, deviation)`` tuples; zero-mode
    elements are checked part by part when amplitude coupled.
    """
    from . import oscillator
    from .config import Coupling, DetectorKind, validate

    cfg = validate(config)
    a, b, fld, st = cfg.detector_a, cfg.detector_b, cfg.field, cfg.zero_mode
    deriv = fld.coupling is Coupling.DERIVATIVE
    ho = a.kind is DetectorKind.OSCILLATOR
    scale = zm_term_scale(a, st, fld)
    tol = fld.quad_tol
    out = []

    def add(name, prod, ref, sc=0.0):
        out.append((name, complex(prod), complex(ref), _deviation(complex(prod), complex(ref), sc)))

    if fld.include_zero_mode:
        if deriv:
            add("L_AA_zm", zeromode.l_zm_derivative(a, st, fld),
                zm_l(a, st, fld, derivative=True, rel_tol=tol).value)
            add("M_zm", zeromode.m_zm_derivative(a, b, st, fld),
                zm_m(a, b, st, fld, derivative=True, rel_tol=tol).value)
            if ho:
                add("K_A_zm", zeromode.k_zm(a, st, fld, derivative=True),
                    zm_k(a, st, fld, derivative=True, rel_tol=tol).value)
        else:
            for part in ("hadamard", "commutator"):
                add(f"L_AA_zm[{part}]", zeromode.l_zm(a, st, fld, part=part),
                    zm_l(a, st, fld, part=part, rel_tol=tol).value, scale)
                add(f"M_zm[{part}]", zeromode.m_zm(a, b, st, fld, part=part),
                    zm_m(a, b, st, fld, part=part, rel_tol=tol).value, scale)
                if ho:
                    add(f"K_A_zm[{part}]", zeromode.k_zm(a, st, fld, part=part),
                        zm_k(a, st, fld, part=part, rel_tol=tol).value, scale)

    if deriv:
        add("L_AA_osc", oscillator.l_osc_derivative(a, fld).value,
            osc_l(a, a, fld, derivative=True, rel_tol=tol).value)
        add("L_AB_osc", oscillator.l_osc_cross_derivative(a, b, fld).value,
            osc_l(a, b, fld, derivative=True, rel_tol=tol).value)
        add("M_osc", oscillator.m_osc_derivative(a, b, fld).value,
            osc_m(a, b, fld, derivative=True, rel_tol=tol).value)
        if ho:
            add("K_A_osc", oscillator.k_osc_derivative(a, fld).value,
                osc_k(a, fld, derivative=True, rel_tol=tol).value)
    else:
        add("L_AA_osc", oscillator.l_osc(a, fld).value, osc_l(a, a, fld, rel_tol=tol).value)
        add("L_AB_osc", oscillator.l_osc_cross(a, b, fld).value,
            osc_l(a, b, fld, rel_tol=tol).value)
        add("M_osc", oscillator.m_osc(a, b, fld).value, osc_m(a, b, fld, rel_tol=tol).value)
        if ho:
            add("K_A_osc", oscillator.k_osc(a, fld).value, osc_k(a, fld, rel_tol=tol).value)
    return out
