"""Zero-mode contributions in closed form (Gaussian switching, pointlike detectors).

The zero mode evolves as a free particle of mass ``M = L**n``:
phi_zm(t) = Q + P t / M.  Its Wightman function splits into a symmetric
(Hadamard) part that depends on the state and an antisymmetric commutator
part that does not.  Every density-matrix element below is obtained from the
two Gaussian transforms

    F0 = int chi(t) exp(-i w t) dt   = sqrt(2 pi) T exp(-w^2 T^2 / 2)
    F1 = int t chi(t) exp(-i w t) dt = -i w T^2 F0

so closed forms are exact; quadrature lives in :mod:`zmharvest.oracle`.
"""
import math

import numpy as np

from .config import SYMMETRY_RTOL, DetectorParams, FieldConfig, ZeroModeState
from .errors import AsymmetricDetectors, NonSaturatedState

_PARTS = ("total", "hadamard", "commutator")


def _require_saturated(state: ZeroModeState):
    if not state.is_saturated():
        raise NonSaturatedState(
            "closed forms need <Q^2> = 1/(2 gamma), <P^2> = gamma/2 and vanishing "
            "first moments; integrate wightman_zm numerically instead")


def _shared_scales(det_a, det_b):
    wa, wb = det_a.frequency, det_b.frequency
    if not (math.isclose(wa, wb, rel_tol=SYMMETRY_RTOL)
            and math.isclose(det_a.width, det_b.width, rel_tol=SYMMETRY_RTOL)):
        raise AsymmetricDetectors(f"frequencies {wa}, {wb}; widths {det_a.width}, {det_b.width}")
    return wa, det_a.width


def _check_part(part):
    if part not in _PARTS:
        raise ValueError(f"part must be one of {_PARTS}, got {part!r}")


def hadamard_zm(t, tp, state: ZeroModeState, field: FieldConfig):
    """C+(t, t') = 2<Q^2> + 2<P^2> t t'/M^2 + <{Q,P}> (t + t')/M."""
    m = field.effective_mass
    t, tp = np.asarray(t, dtype=float), np.asarray(tp, dtype=float)
    return 2.0 * state.q2 + 2.0 * state.p2 * t * tp / m**2 + state.qp_sym * (t + tp) / m


def commutator_zm(t, tp, field: FieldConfig):
    """C-(t, t') = -i (t - t') / M, independent of the state."""
    t, tp = np.asarray(t, dtype=float), np.asarray(tp, dtype=float)
    return -1j * (t - tp) / field.effective_mass


def wightman_zm(t, tp, state: ZeroModeState, field: FieldConfig):
    """Zero-mode Wightman function (C+ + C-)/2; broadcasts over array inputs."""
    out = 0.5 * hadamard_zm(t, tp, state, field) + 0.5 * commutator_zm(t, tp, field)
    return complex(out) if np.ndim(out) == 0 else out


def wightman_zm_derivative(t, tp, state: ZeroModeState, field: FieldConfig):
    """d/dt d/dt' of the zero-mode Wightman function: the constant <P^2>/M^2.

    Equals gamma / (2 L^(2n)) for the minimum-uncertainty family.
    """
    val = state.p2 / field.effective_mass**2
    shape = np.broadcast(np.asarray(t), np.asarray(tp)).shape
    return val if shape == () else np.full(shape, val)


def l_zm(det: DetectorParams, state: ZeroModeState, field: FieldConfig, part="total",
         partner: DetectorParams = None):
    """Zero-mode part of L_ij for detectors ``det`` and ``partner`` (default: itself).

    The zero mode is spatially constant, so L_AB = L_AA up to the coupling
    product.  ``part`` selects the Hadamard or commutator contribution; the
    total is their mean, written in the manifestly non-negative form
    pi e^{-W^2 T^2} (M T - gamma W T^3)^2 / (gamma M^2).
    """
    _check_part(part)
    _require_saturated(state)
    partner = det if partner is None else partner
    w, T = _shared_scales(det, partner)
    n = field.n_dim
    lam2 = det.coupling_strength(n) * partner.coupling_strength(n)
    g, m = state.gamma, field.effective_mass
    gauss = math.exp(-(w * T) ** 2)
    if part == "hadamard":
        return lam2 * 2 * math.pi * T**2 * gauss * (m**2 + (g * w * T**2) ** 2) / (g * m**2)
    if part == "commutator":
        return -lam2 * 4 * math.pi * w * T**4 * gauss / m
    return lam2 * math.pi * gauss * (m * T - g * w * T**3) ** 2 / (g * m**2)


def m_zm(det_a: DetectorParams, det_b: DetectorParams, state: ZeroModeState,
         field: FieldConfig, part="total"):
    """Zero-mode part of the time-ordered two-detector element M.

    The total is computed as the mean of the two parts, so the split is exact.
    """
    _check_part(part)
    _require_saturated(state)
    w, T = _shared_scales(det_a, det_b)
    n = field.n_dim
    lam2 = det_a.coupling_strength(n) * det_b.coupling_strength(n)
    g, m = state.gamma, field.effective_mass
    gauss = math.exp(-(w * T) ** 2)
    had = -lam2 * 2 * math.pi * T**2 * gauss * (m**2 - (g * w * T**2) ** 2) / (g * m**2)
    com = 1j * lam2 * 4 * math.sqrt(math.pi) * T**3 * gauss / m
    if part == "hadamard":
        return complex(had)
    if part == "commutator":
        return com
    return 0.5 * (had + com)


def l_zm_derivative(det: DetectorParams, state: ZeroModeState, field: FieldConfig,
                    partner: DetectorParams = None):
    """Derivative-coupling L_ij (zero mode): lambda^2 2 pi T^2 e^{-W^2T^2} <P^2>/M^2."""
    partner = det if partner is None else partner
    w, T = _shared_scales(det, partner)
    n = field.n_dim
    lam2 = det.coupling_strength(n) * partner.coupling_strength(n)
    a_zm = state.p2 / field.effective_mass**2
    return lam2 * 2 * math.pi * T**2 * math.exp(-(w * T) ** 2) * a_zm


def m_zm_derivative(det_a: DetectorParams, det_b: DetectorParams, state: ZeroModeState,
                    field: FieldConfig):
    """Derivative-coupling M (zero mode).  Exactly the negative of L_AB."""
    return complex(-l_zm_derivative(det_a, state, field, partner=det_b))


def k_zm(det: DetectorParams, state: ZeroModeState, field: FieldConfig, derivative=False,
         part="total"):
    """Zero-mode K for an oscillator detector.

    K integrates over t' < t only with the symmetric weight e^{iw(t+t')}, so it
    is half of M evaluated for the detector paired with itself.
    """
    if derivative:
        return 0.5 * m_zm_derivative(det, det, state, field)
    return 0.5 * m_zm(det, det, state, field, part=part)


def large_cavity_limit(det: DetectorParams, state: ZeroModeState):
    """L -> infinity value pi lambda^2 T^2 e^{-W^2 T^2}/gamma shared by L_zm and -M_zm."""
    lam = det.coupling_strength(1)
    w, T = det.frequency, det.width
    return lam**2 * math.pi * T**2 * math.exp(-(w * T) ** 2) / state.gamma
