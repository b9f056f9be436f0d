"""Two-dimensional quadrature, regulator extrapolation and the complex erfc.

``integrate2d`` wraps :func:`scipy.integrate.cubature` (deterministic
Genz-Malik/Gauss-Kronrod subdivision).  Complex integrands are integrated as
a real 2-vector because cubature keeps only the real part of its output.
Triangular domains are mapped onto the unit square with the Duffy
transformation.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, special

from .errors import AccuracyDomainExceeded, MaxSubdivisionsExceeded, NonConvergent

# Gaussian switching is truncated at |t| <= TAIL_WIDTHS * T everywhere;
# the neglected mass is below exp(-32), i.e. < 1e-13 of the peak.
TAIL_WIDTHS = 8.0
ERFC_STRIP = 50.0


@dataclass(frozen=True)
class Rect:
    x_lo: float
    x_hi: float
    y_lo: float
    y_hi: float


@dataclass(frozen=True)
class LowerTriangle:
    """{(x, y): lo <= y <= x <= hi}, i.e. t' <= t."""

    lo: float
    hi: float


@dataclass(frozen=True)
class UpperTriangle:
    """{(x, y): lo <= x <= y <= hi}, i.e. t <= t'."""

    lo: float
    hi: float


@dataclass(frozen=True)
class QuadResult:
    value: complex
    error: float
    n_evals: int = 0

    def __iter__(self):
        yield self.value
        yield self.error


def switching_box(width, widths=TAIL_WIDTHS):
    r = widths * width
    return Rect(-r, r, -r, r)


def _pullback(domain):
    """Return (g, lo, hi) with g mapping cube points to (x, y, jacobian)."""
    if isinstance(domain, Rect):
        def g(u, v):
            return u, v, np.ones_like(u)
        return g, [domain.x_lo, domain.y_lo], [domain.x_hi, domain.y_hi]
    if isinstance(domain, (LowerTriangle, UpperTriangle)):
        lo, h = domain.lo, domain.hi - domain.lo
        lower = isinstance(domain, LowerTriangle)

        def g(u, v):
            a = lo + h * u
            b = lo + h * u * v
            jac = h * h * u
            return (a, b, jac) if lower else (b, a, jac)
        return g, [0.0, 0.0], [1.0, 1.0]
    raise TypeError(f"unsupported domain {domain!r}")


def integrate2d(func: Callable, domain, rel_tol=1e-10, abs_tol=0.0, max_subdivisions=20000,
                rule="gk21") -> QuadResult:
    """Adaptive 2D quadrature of a complex, vectorised ``func(x, y)``.

    Two cheap passes fix the magnitude of |f| and of the answer; the refined
    pass then runs with absolute tolerance ``rel_tol * |coarse|`` (or
    ``abs_tol`` if larger), so the reported error is relative to the result
    rather than to each real component.  Results cancelling below
    1e-15 of the integral of |f| are resolved only to that floor.
    """
    g, lo, hi = _pullback(domain)
    count = [0]

    def vec(pts):
        x, y, jac = g(pts[:, 0], pts[:, 1])
        count[0] += pts.shape[0]
        val = np.asarray(func(x, y), dtype=complex) * jac
        val = np.broadcast_to(val, x.shape)
        return np.stack([val.real, val.imag, np.abs(val)], axis=-1)

    def vec2(pts):
        return vec(pts)[:, :2]

    # magnitude first: |f| has no cancellation, so a relative tolerance is safe on it
    # (it is not on a real or imaginary part that vanishes identically)
    scale = float(integrate.cubature(lambda p: vec(p)[:, 2:], lo, hi, rule=rule, rtol=1e-3,
                                     max_subdivisions=max_subdivisions).estimate[0])
    if scale == 0.0:
        return QuadResult(0j, 0.0, count[0])
    floor = 1e-15 * scale
    coarse = integrate.cubature(vec2, lo, hi, rule=rule, rtol=0.0,
                                atol=max(1e-4 * scale, abs_tol), max_subdivisions=max_subdivisions)
    est = complex(coarse.estimate[0], coarse.estimate[1])
    atol = max(0.5 * rel_tol * abs(est), abs_tol, floor)

    res = integrate.cubature(vec2, lo, hi, rule=rule, rtol=0.0, atol=atol,
                             max_subdivisions=max_subdivisions)
    if res.status != "converged":
        raise MaxSubdivisionsExceeded(
            f"no convergence after {res.subdivisions} subdivisions (error {np.max(res.error):.3g})")
    value = complex(res.estimate[0], res.estimate[1])
    return QuadResult(value, float(np.hypot(*res.error)), count[0])


@dataclass(frozen=True)
class RichardsonResult:
    value: complex
    error: float
    diagonal: tuple


def richardson_epsilon(samples: Sequence, rtol=1e-12) -> RichardsonResult:
    """Extrapolate f(eps) to eps -> 0 by polynomial (Neville) extrapolation.

    ``samples`` is a sequence of ``(eps, value)`` pairs, at least three, with
    geometrically decreasing eps.  The error estimate is the last change along
    the tableau diagonal.  With geometric spacing the tableau contracts even
    for a divergent f (1/eps extrapolates to a finite number), so the raw
    samples must contract as well; otherwise :class:`NonConvergent` is raised.
    """
    samples = sorted(((float(e), complex(v)) for e, v in samples), key=lambda s: -s[0])
    if len(samples) < 3:
        raise ValueError("need at least three (eps, value) samples")
    x = np.array([s[0] for s in samples])
    if np.any(x <= 0) or len(set(x)) != len(x):
        raise ValueError("eps values must be positive and distinct")
    row = [s[1] for s in samples]
    tab = [row]
    for j in range(1, len(x)):
        prev = tab[-1]
        cur = []
        for i in range(j, len(x)):
            pi = prev[i - j + 1]
            pm = prev[i - j]
            cur.append((x[i - j] * pi - x[i] * pm) / (x[i - j] - x[i]))
        tab.append(cur)
    diag = tuple(col[-1] for col in tab)
    scale = max(abs(v) for v in row)
    tiny = max(64 * np.finfo(float).eps * scale, rtol * scale)
    for seq, factor in ((row, 0.5), (diag, 2.0)):
        steps = [abs(seq[k] - seq[k - 1]) for k in range(1, len(seq))]
        if steps[-1] > factor * steps[-2] + tiny:
            raise NonConvergent(f"sequence does not contract: steps {steps}")
    return RichardsonResult(diag[-1], abs(diag[-1] - diag[-2]), diag)


def erfc_complex(z, scaled=False):
    """Complementary error function of complex argument.

    ``scaled=True`` returns exp(z^2) erfc(z), which stays finite for Re z > 0.
    Inputs outside the strip |Im z| <= 50 raise AccuracyDomainExceeded.
    """
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z.imag) > ERFC_STRIP) or not np.all(np.isfinite(z)):
        raise AccuracyDomainExceeded(f"erfc evaluated outside |Im z| <= {ERFC_STRIP}")
    out = special.erfcx(z) if scaled else special.erfc(z)
    return complex(out) if out.ndim == 0 else out
