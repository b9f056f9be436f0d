"""Pure-numpy versions of the hot kernels.

Every function here has a numba twin in ``numba_impl`` with the same
signature; ``zmharvest.kernels`` picks one at import time.
"""
import numpy as np

_CHUNK = 1 << 18
_QUARTER_COS = np.array([1.0, 0.0, -1.0, 0.0])


def cos_turns(phase):
    """cos(2*pi*phase), exact at multiples of a quarter turn."""
    phase = np.asarray(phase, dtype=float)
    frac = phase - np.floor(phase)
    q = 4.0 * frac
    qr = np.round(q)
    out = np.cos(2.0 * np.pi * frac)
    exact = q == qr
    if np.any(exact):
        out = np.where(exact, _QUARTER_COS[qr.astype(np.int64) % 4], out)
    return out


def gaussian_mode_sum(a, b, x, power, n_max):
    """sum_{n=1}^{n_max} n**power cos(2 pi n x) exp(-(b + a n)**2)."""
    total = 0.0
    for start in range(1, n_max + 1, _CHUNK):
        n = np.arange(start, min(start + _CHUNK, n_max + 1), dtype=float)
        terms = n**power * np.exp(-((b + a * n) ** 2)) * cos_turns(n * x)
        total += np.sum(terms)
    return float(total)


def weighted_cos_sum(weights, x):
    """sum_{n=1}^{N} weights[n-1] cos(2 pi n x)."""
    weights = np.asarray(weights, dtype=float)
    total = 0.0
    for start in range(0, weights.size, _CHUNK):
        w = weights[start:start + _CHUNK]
        n = np.arange(start + 1, start + 1 + w.size, dtype=float)
        total += np.sum(w * cos_turns(n * x))
    return float(total)


def wightman_mode_sum(dt, dx, length, n_max):
    """Truncated oscillator-mode Wightman sum at real (dt, dx) points."""
    dt, dx = np.broadcast_arrays(np.asarray(dt, dtype=float), np.asarray(dx, dtype=float))
    u = (dt - dx).ravel() / length
    v = (dt + dx).ravel() / length
    out = np.zeros(u.shape, dtype=complex)
    step = max(1, _CHUNK // max(u.size, 1))
    for start in range(1, n_max + 1, step):
        n = np.arange(start, min(start + step, n_max + 1), dtype=float)[:, None]
        pu = n * u[None, :]
        pv = n * v[None, :]
        pu = pu - np.floor(pu)
        pv = pv - np.floor(pv)
        terms = (np.exp(-2j * np.pi * pu) + np.exp(-2j * np.pi * pv)) / (4.0 * np.pi * n)
        out += terms.sum(axis=0)
    return out.reshape(dt.shape)


def _log1p(w):
    re = 0.5 * np.log1p(w.real * (2.0 + w.real) + w.imag * w.imag)
    im = np.arctan2(w.imag, 1.0 + w.real)
    return re + 1j * im


def _expm1(q):
    # complex expm1 without cancellation in the real part
    half = np.sin(0.5 * q.imag)
    return (np.expm1(q.real) * np.cos(q.imag) - 2.0 * half * half
            + 1j * np.exp(q.real) * np.sin(q.imag))


def _cone_phase(w, length):
    """-2 pi i w / L with Re(w / L) reduced to [-1/2, 1/2)."""
    s = w / length
    re = s.real - np.floor(s.real + 0.5)
    return -2j * np.pi * (re + 1j * s.imag)


def _cone_log(w, length):
    # log(1 - exp(-2 pi i w / L)) for Im w <= 0
    q = _cone_phase(w, length)
    e = np.exp(q)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(np.abs(e) < 0.5, _log1p(-e), np.log(-_expm1(q)))


def _cone_csc2(w, length):
    # exp(q) / expm1(q)^2 = -csc^2(pi w / L) / 4
    q = _cone_phase(w, length)
    with np.errstate(divide="ignore", invalid="ignore"):
        m = _expm1(q)
        return np.exp(q) / (m * m)


def _merged_z(dt, length):
    # z = e^{-2 pi i dt / L} with the real phase reduced; |z| <= 1 for Im dt <= 0
    s = dt / length
    re = s.real - np.floor(s.real + 0.5)
    return np.exp(-2j * np.pi * (re + 1j * s.imag))


def log_kernel(dt, dx, length):
    """Closed-form oscillator Wightman function for Im(dt) <= 0.

    Sum of the two light-cone logarithms -(1/4pi) log(1 - e^{-2 pi i (dt -+ dx)/L}),
    each evaluated through expm1/log1p so that coincidence keeps full relative
    accuracy.  Deep in the lower half plane (|z| < 1/2, z = e^{-2 pi i dt/L})
    the first-order terms of the two cones can cancel exactly (dx = L/4), so
    there the merged form -(1/4pi) log1p(z (z - 2 cos(2 pi dx/L))) is used.
    """
    dt = np.asarray(dt, dtype=complex)
    z = _merged_z(dt, length)
    c = float(cos_turns(dx / length))
    with np.errstate(invalid="ignore", divide="ignore"):
        cones = _cone_log(dt - dx, length) + _cone_log(dt + dx, length)
        merged = _log1p(z * (z - 2.0 * c))
    return -np.where(np.abs(z) < 0.5, merged, cones) / (4.0 * np.pi)


def derivative_kernel(dt, dx, length):
    """d/dt d/dt' of ``log_kernel``: -(pi / 4L^2) sum csc^2(pi (dt -+ dx)/L).

    Uses -(2 pi / L^2) z (2z - c (1 + z^2)) / (1 - 2cz + z^2)^2 where |z| < 1/2.
    """
    dt = np.asarray(dt, dtype=complex)
    z = _merged_z(dt, length)
    c = float(cos_turns(dx / length))
    with np.errstate(invalid="ignore", divide="ignore"):
        cones = _cone_csc2(dt - dx, length) + _cone_csc2(dt + dx, length)
        p = 1.0 + z * (z - 2.0 * c)
        merged = -2.0 * z * (2.0 * z - c * (1.0 + z * z)) / (p * p)
    return (np.pi / length**2) * np.where(np.abs(z) < 0.5, merged, cones)
