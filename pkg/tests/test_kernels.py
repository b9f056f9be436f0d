import math
import os
import subprocess
import sys

import numpy as np
import pytest

from zmharvest import kernels
from zmharvest.kernels import implementation

BACKENDS = ["numpy", "numba"]


@pytest.fixture(params=BACKENDS)
def impl(request):
    return implementation(request.param)


def test_cos_turns_exact_at_quarters(impl):
    x = np.array([0.0, 0.25, 0.5, 0.75, 1.0, -0.25, 2.5])
    np.testing.assert_array_equal(impl.cos_turns(x), [1, 0, -1, 0, 1, 0, -1])


def test_gaussian_mode_sum_direct(impl):
    a, b, x = 0.3, 1.1, 0.2
    n = np.arange(1, 201)
    ref = np.sum(np.cos(2 * np.pi * n * x) * np.exp(-(b + a * n) ** 2) / n)
    assert impl.gaussian_mode_sum(a, b, x, -1.0, 200) == pytest.approx(ref, rel=1e-14)


def test_weighted_cos_sum_direct(impl):
    w = 1.0 / np.arange(1, 1001) ** 2
    n = np.arange(1, 1001)
    ref = np.sum(w * np.cos(2 * np.pi * n * 0.1))
    assert impl.weighted_cos_sum(w, 0.1) == pytest.approx(ref, rel=1e-13)


def test_backends_agree():
    nb, npy = implementation("numba"), implementation("numpy")
    rng = np.random.default_rng(3)
    d = rng.normal(size=300) * 4 - 1j * np.abs(rng.normal(size=300))
    for dx in (0.0, 1.7, 5.0):
        np.testing.assert_allclose(nb.log_kernel(d, dx, 10.0), npy.log_kernel(d, dx, 10.0),
                                   rtol=1e-13, atol=1e-15)
        np.testing.assert_allclose(nb.derivative_kernel(d, dx, 10.0),
                                   npy.derivative_kernel(d, dx, 10.0), rtol=1e-12)
    t = rng.normal(size=20)
    np.testing.assert_allclose(nb.wightman_mode_sum(t, 2.0, 10.0, 500),
                               npy.wightman_mode_sum(t, 2.0, 10.0, 500), rtol=1e-12)
    assert nb.gaussian_mode_sum(0.1, 1, 0.3, 1.0, 5000) == pytest.approx(
        npy.gaussian_mode_sum(0.1, 1, 0.3, 1.0, 5000), rel=1e-13)


def test_env_flag_selects_numpy_backend():
    code = "from zmharvest import kernels; print(kernels.BACKEND)"
    env = dict(os.environ, ZMHARVEST_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True,
                         check=True).stdout.strip()
    assert out == "numpy"
    env["ZMHARVEST_DISABLE_NUMBA"] = "0"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True,
                         check=True).stdout.strip()
    assert out == "numba"


def test_log_kernel_matches_mode_sum_off_axis(impl):
    # below the real axis the mode sum converges geometrically
    L, dx = 10.0, 2.0
    d = np.array([0.7 - 0.5j, -3.0 - 1.0j, 4.0 - 0.2j])
    n = np.arange(1, 4000)[:, None]
    k = 2 * np.pi * n / L
    modes = np.sum((np.exp(-1j * k * (d - dx)) + np.exp(-1j * k * (d + dx))) / (4 * np.pi * n), axis=0)
    np.testing.assert_allclose(impl.log_kernel(d, dx, L), modes, rtol=1e-12)


def test_derivative_kernel_is_mixed_second_derivative(impl):
    # d/dt d/dt' W(t - t') = -W''(d); fourth-order central difference of the log kernel
    L, dx, h = 10.0, 3.0, 1e-3
    d = np.array([1.2 - 0.3j, -4.0 - 0.8j])
    f = lambda z: impl.log_kernel(z, dx, L)
    w2 = (-f(d + 2 * h) + 16 * f(d + h) - 30 * f(d) + 16 * f(d - h) - f(d - 2 * h)) / (12 * h * h)
    np.testing.assert_allclose(impl.derivative_kernel(d, dx, L), -w2, rtol=1e-7)


def test_log_kernel_coincidence_asymptote(impl):
    # log(1 - e^{-iu}) = log(iu) - iu/2 + O(u^2), u = 2 pi d / L, doubled at dx = 0
    L = 2.0
    d = np.array([1e-8, 1e-6]) * np.exp(-1j * math.pi / 8)
    u = 2 * np.pi * d / L
    ref = -2 * (np.log(1j * u) - 0.5j * u) / (4 * np.pi)
    np.testing.assert_allclose(impl.log_kernel(d, 0.0, L), ref, rtol=1e-10)


def mp_fraction(dx, length):
    import mpmath as mp
    return mp.mpf(dx) / length


def _power_series(d, x, length, derivative):
    # W = (1/2pi) sum z^n cos(2 pi n x)/n and A = (2pi/L^2) sum n z^n cos(2 pi n x), z = e^{-2 pi i d/L}
    import mpmath as mp
    with mp.workdps(30):
        z = mp.exp(-2j * mp.pi * mp.mpc(d) / length)
        x = mp.mpf(x)
        if derivative:
            val = 2 * mp.pi / length**2 * mp.nsum(lambda n: n * z**n * mp.cos(2 * mp.pi * n * x), [1, mp.inf])
        else:
            val = mp.nsum(lambda n: z**n * mp.cos(2 * mp.pi * n * x) / n, [1, mp.inf]) / (2 * mp.pi)
        return complex(val)


@pytest.mark.parametrize("derivative", [False, True])
def test_kernels_deep_in_lower_half_plane(impl, derivative):
    # at dx = L/4 the n = 1 terms of the two light cones cancel; the value is second order in z
    fn = impl.derivative_kernel if derivative else impl.log_kernel
    for d in (0.3 - 3.0j, 1.7 - 9.0j, -0.4 - 0.5j):
        val = fn(np.array([d]), 0.5, 2.0)[0]
        ref = _power_series(d, 0.25, 2.0, derivative)
        assert abs(val - ref) <= 1e-13 * abs(ref), (d, val, ref)


@pytest.mark.parametrize("derivative", [False, True])
def test_kernel_branches_agree_at_switch(impl, derivative):
    fn = impl.derivative_kernel if derivative else impl.log_kernel
    length, dx = 3.0, 0.4
    # |z| = 1/2 at Im d = -L log 2 / (2 pi)
    im = -length * math.log(2.0) / (2 * math.pi)
    d = np.array([0.2 + (im + 1e-9) * 1j, 0.2 + (im - 1e-9) * 1j])
    for val, point in zip(fn(d, dx, length), d):
        ref = _power_series(point, mp_fraction(dx, length), length, derivative)
        assert abs(val - ref) < 1e-13 * abs(ref)
