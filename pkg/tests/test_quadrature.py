import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zmharvest import config as C, oracle, zeromode
from zmharvest.errors import AccuracyDomainExceeded, MaxSubdivisionsExceeded, NonConvergent
from zmharvest.quadrature import (LowerTriangle, Rect, UpperTriangle, erfc_complex, integrate2d,
                                  richardson_epsilon, switching_box)

# 50-digit mpmath evaluations, rounded to double
ERFC_REF = {
    1 + 1j: (-0.31615128169794765 - 0.19045346923783468j, 0.3047442052569126 - 0.20821893820283163j),
    0.5 - 2j: (-12.839985667741278 - 1.0429925008314203j, 0.10335882374136666 + 0.28478588475009375j),
    3 + 4j: (121.18699139507945 + 27.750337293623904j, 0.0697909616496483 - 0.08934000024036491j),
    -2 + 0.5j: (2.0035022433130365 - 0.004740903031294336j, -35.63530351200189 - 77.38014237534543j),
}


def gauss(x, y):
    return np.exp(-0.5 * x * x - 0.5 * y * y)


def test_gaussian_product():
    res = integrate2d(gauss, switching_box(1.0))
    assert abs(res.value - 2 * math.pi) < 1e-10
    assert res.error < 1e-9


def test_lower_triangle_half():
    assert abs(integrate2d(gauss, LowerTriangle(-8, 8)).value - math.pi) < 1e-10


def test_triangle_split_consistency():
    f = lambda x, y: np.exp(-x * x / 2 - y * y / 3 + 1j * (x + 2 * y)) * (1 + x * y)
    rect = integrate2d(f, Rect(-8, 8, -8, 8)).value
    lo = integrate2d(f, LowerTriangle(-8, 8)).value
    up = integrate2d(f, UpperTriangle(-8, 8)).value
    assert abs(rect - (lo + up)) <= 1e-9 * abs(rect)


def test_time_ordered_zero_mode_integrand():
    cfg = C.validate(C.symmetric_config())
    a, b, s, f = cfg.detector_a, cfg.detector_b, cfg.zero_mode, cfg.field
    res = oracle.zm_m(a, b, s, f)
    assert abs(res.value - zeromode.m_zm(a, b, s, f)) < 1e-8 * abs(res.value)


def test_nonconvergence_is_raised_not_swallowed():
    wild = lambda x, y: np.sin(1e4 * x * y) / np.sqrt(np.abs(x - y) + 1e-300)
    with pytest.raises(MaxSubdivisionsExceeded):
        integrate2d(wild, Rect(-1, 1, -1, 1), max_subdivisions=30)


def test_error_estimates_are_honest():
    """Closed-form integrands with random parameters; true error <= estimate in >= 99% of cases."""
    rng = np.random.default_rng(11)
    honest, total = 0, 0
    for _ in range(100):
        sx, sy = rng.uniform(0.3, 2.0, 2)
        wx, wy = rng.uniform(-3, 3, 2)
        kind = rng.integers(3)
        if kind == 0:   # Gaussian product
            f = lambda x, y: np.exp(-x * x / (2 * sx * sx) - y * y / (2 * sy * sy))
            exact = 2 * math.pi * sx * sy
        elif kind == 1:  # Gaussian x polynomial
            f = lambda x, y: (x * x) * np.exp(-x * x / (2 * sx * sx) - y * y / (2 * sy * sy))
            exact = 2 * math.pi * sx**3 * sy
        else:            # Gaussian x plane wave
            f = lambda x, y: np.exp(-x * x / (2 * sx * sx) - y * y / (2 * sy * sy) + 1j * (wx * x + wy * y))
            exact = 2 * math.pi * sx * sy * math.exp(-(sx * wx) ** 2 / 2 - (sy * wy) ** 2 / 2)
        box = 8 * max(sx, sy)
        res = integrate2d(f, Rect(-box, box, -box, box), rel_tol=1e-8)
        # the fixed window truncates the Gaussian at 8 widths (< 1e-13 relative)
        err = abs(res.value - exact)
        total += 1
        honest += err <= res.error + 1e-13 * 2 * math.pi * sx * sy
    assert honest >= 0.99 * total


def test_richardson_linear_model_exact():
    samples = [(e, 2.5 - 1j + (3.0 + 2j) * e) for e in (1e-3, 1e-4, 1e-5)]
    assert abs(richardson_epsilon(samples).value - (2.5 - 1j)) < 1e-9


def test_richardson_smooth_function():
    f = lambda e: math.cos(e) + 1j * math.exp(-e)
    r = richardson_epsilon([(e, f(e)) for e in (1e-2, 1e-3, 1e-4, 1e-5)])
    assert abs(r.value - (1 + 1j)) < 1e-12 and r.error < 1e-10


def test_richardson_constant():
    r = richardson_epsilon([(e, 0.7) for e in (1e-2, 1e-3, 1e-4)])
    assert r.value == pytest.approx(0.7, rel=1e-15)


def test_richardson_rejects_divergent_sequences():
    eps = (1e-1, 1e-2, 1e-3, 1e-4)
    for f in (lambda e, i: 1.0 / e, lambda e, i: math.log(e), lambda e, i: (-1.0) ** i):
        with pytest.raises(NonConvergent):
            richardson_epsilon([(e, f(e, i)) for i, e in enumerate(eps)])
    with pytest.raises(ValueError):
        richardson_epsilon([(1e-3, 1.0), (1e-4, 1.0)])


def test_erfc_origin_and_reflection():
    assert erfc_complex(0) == 1.0
    z = np.array([0.3 + 0.2j, -1.5 + 2j, 4 - 3j])
    np.testing.assert_allclose(erfc_complex(-z), 2 - erfc_complex(z), rtol=1e-13)


@pytest.mark.parametrize("z", list(ERFC_REF))
def test_erfc_reference_values(z):
    plain, scaled = ERFC_REF[z]
    assert abs(erfc_complex(z) - plain) <= 1e-12 * abs(plain)
    assert abs(erfc_complex(z, scaled=True) - scaled) <= 1e-12 * abs(scaled)


def test_erfc_against_live_mpmath():
    mp = pytest.importorskip("mpmath")
    mp.mp.dps = 40
    rng = np.random.default_rng(5)
    for z in rng.uniform(-6, 6, 20) + 1j * rng.uniform(-6, 6, 20):
        ref = complex(mp.erfc(mp.mpc(z.real, z.imag)))
        assert abs(erfc_complex(z) - ref) <= 1e-12 * abs(ref)


def test_scaled_erfc_has_no_overflow():
    z = np.array([30 + 40j, 200 + 1j, 1e3 + 10j])
    out = erfc_complex(z, scaled=True)
    assert np.all(np.isfinite(out))
    np.testing.assert_allclose(out, 1 / (np.sqrt(np.pi) * z), rtol=1e-3)
    with pytest.raises(AccuracyDomainExceeded):
        erfc_complex(1 + 60j)


@settings(max_examples=100, deadline=None)
@given(x=st.floats(-20, 20), y=st.floats(-20, 20))
def test_erfc_conjugate_symmetry(x, y):
    z = complex(x, y)
    assert erfc_complex(z.conjugate()) == pytest.approx(np.conj(erfc_complex(z)), rel=1e-14, abs=1e-300)
