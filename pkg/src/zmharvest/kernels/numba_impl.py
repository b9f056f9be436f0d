"""numba-compiled versions of the hot kernels (see ``numpy_impl``)."""
import math
import cmath

import numpy as np
from numba import njit

_TWO_PI = 2.0 * math.pi


@njit(cache=True, nogil=True)
def _cos_turn(phase):
    frac = phase - math.floor(phase)
    q = 4.0 * frac
    qr = math.floor(q + 0.5)
    if q == qr:
        k = int(qr) % 4
        if k == 0:
            return 1.0
        if k == 2:
            return -1.0
        return 0.0
    return math.cos(_TWO_PI * frac)


@njit(cache=True, nogil=True)
def _cos_turns_1d(phase):
    out = np.empty(phase.size)
    for i in range(phase.size):
        out[i] = _cos_turn(phase[i])
    return out


@njit(cache=True, nogil=True)
def _gaussian_mode_sum(a, b, x, power, n_max):
    # Neumaier-compensated, fixed order
    s = 0.0
    comp = 0.0
    for n in range(1, n_max + 1):
        fn = float(n)
        t = fn**power * math.exp(-((b + a * fn) ** 2)) * _cos_turn(fn * x)
        y = s + t
        if abs(s) >= abs(t):
            comp += (s - y) + t
        else:
            comp += (t - y) + s
        s = y
    return s + comp


@njit(cache=True, nogil=True)
def _weighted_cos_sum(weights, x):
    s = 0.0
    comp = 0.0
    for i in range(weights.size):
        t = weights[i] * _cos_turn(float(i + 1) * x)
        y = s + t
        if abs(s) >= abs(t):
            comp += (s - y) + t
        else:
            comp += (t - y) + s
        s = y
    return s + comp


@njit(cache=True, nogil=True)
def _wightman_mode_sum(u, v, n_max):
    out = np.zeros(u.size, dtype=np.complex128)
    for i in range(u.size):
        acc = 0.0 + 0.0j
        for n in range(1, n_max + 1):
            fn = float(n)
            pu = fn * u[i]
            pv = fn * v[i]
            pu -= math.floor(pu)
            pv -= math.floor(pv)
            acc += (cmath.exp(-2j * math.pi * pu) + cmath.exp(-2j * math.pi * pv)) / (4.0 * math.pi * fn)
        out[i] = acc
    return out


@njit(cache=True, nogil=True)
def _log1p_c(w):
    re = 0.5 * math.log1p(w.real * (2.0 + w.real) + w.imag * w.imag)
    im = math.atan2(w.imag, 1.0 + w.real)
    return complex(re, im)


@njit(cache=True, nogil=True)
def _expm1_c(q):
    half = math.sin(0.5 * q.imag)
    return complex(math.expm1(q.real) * math.cos(q.imag) - 2.0 * half * half,
                   math.exp(q.real) * math.sin(q.imag))


@njit(cache=True, nogil=True)
def _cone_phase(w, length):
    s = w / length
    re = s.real - math.floor(s.real + 0.5)
    return complex(2.0 * math.pi * s.imag, -2.0 * math.pi * re)


@njit(cache=True, nogil=True)
def _cone_log(w, length):
    q = _cone_phase(w, length)
    e = cmath.exp(q)
    if abs(e) < 0.5:
        return _log1p_c(-e)
    m = _expm1_c(q)
    if m == 0:
        return complex(-math.inf, 0.0)
    return cmath.log(-m)


@njit(cache=True, nogil=True)
def _cone_csc2(w, length):
    q = _cone_phase(w, length)
    m = _expm1_c(q)
    if m == 0:
        return complex(math.inf, 0.0)
    return cmath.exp(q) / (m * m)


@njit(cache=True, nogil=True)
def _merged_z(w, length):
    s = w / length
    re = s.real - math.floor(s.real + 0.5)
    return cmath.exp(complex(2.0 * math.pi * s.imag, -2.0 * math.pi * re))


@njit(cache=True, nogil=True)
def _log_kernel_1d(dt, dx, length, c):
    out = np.empty(dt.size, dtype=np.complex128)
    for i in range(dt.size):
        z = _merged_z(dt[i], length)
        if abs(z) < 0.5:
            out[i] = -_log1p_c(z * (z - 2.0 * c)) / (4.0 * math.pi)
        else:
            out[i] = -(_cone_log(dt[i] - dx, length)
                       + _cone_log(dt[i] + dx, length)) / (4.0 * math.pi)
    return out


@njit(cache=True, nogil=True)
def _derivative_kernel_1d(dt, dx, length, c):
    out = np.empty(dt.size, dtype=np.complex128)
    pref = math.pi / (length * length)
    for i in range(dt.size):
        z = _merged_z(dt[i], length)
        if abs(z) < 0.5:
            p = 1.0 + z * (z - 2.0 * c)
            out[i] = -2.0 * pref * z * (2.0 * z - c * (1.0 + z * z)) / (p * p)
        else:
            out[i] = pref * (_cone_csc2(dt[i] - dx, length) + _cone_csc2(dt[i] + dx, length))
    return out


def cos_turns(phase):
    phase = np.asarray(phase, dtype=float)
    return _cos_turns_1d(np.ascontiguousarray(phase.ravel())).reshape(phase.shape)


def gaussian_mode_sum(a, b, x, power, n_max):
    return float(_gaussian_mode_sum(float(a), float(b), float(x), float(power), int(n_max)))


def weighted_cos_sum(weights, x):
    w = np.ascontiguousarray(np.asarray(weights, dtype=float).ravel())
    return float(_weighted_cos_sum(w, float(x)))


def wightman_mode_sum(dt, dx, length, n_max):
    dt, dx = np.broadcast_arrays(np.asarray(dt, dtype=float), np.asarray(dx, dtype=float))
    u = np.ascontiguousarray(((dt - dx) / length).ravel())
    v = np.ascontiguousarray(((dt + dx) / length).ravel())
    return _wightman_mode_sum(u, v, int(n_max)).reshape(dt.shape)


def log_kernel(dt, dx, length):
    dt = np.asarray(dt, dtype=complex)
    flat = np.ascontiguousarray(dt.ravel())
    c = float(cos_turns(np.asarray(dx / length)))
    return _log_kernel_1d(flat, float(dx), float(length), c).reshape(dt.shape)


def derivative_kernel(dt, dx, length):
    dt = np.asarray(dt, dtype=complex)
    flat = np.ascontiguousarray(dt.ravel())
    c = float(cos_turns(np.asarray(dx / length)))
    return _derivative_kernel_1d(flat, float(dx), float(length), c).reshape(dt.shape)
