import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from qhdlab.grid import (antiderivative, dealias, derivative, divergence, fft, fourier_shift,
                         gradient, ifft, integrate, l2_norm, laplacian, make_grid, max_gradient,
                         norms, spectral_l2)


@pytest.mark.parametrize("n,L", [(7, 1.0), (4, 1.0), (12, 1.0), (16, 0.0), (16, -2.0)])
def test_make_grid_rejects_bad_input(n, L):
    with pytest.raises(ValueError):
        make_grid(1, n, L)


def test_make_grid_rejects_dim():
    with pytest.raises(ValueError):
        make_grid(3, 16, 1.0)


def test_wavenumber_table_and_mask():
    g = make_grid(1, 32, 4 * np.pi)
    assert sorted(g.modes.tolist()) == list(range(-16, 16))
    np.testing.assert_allclose(g.wavenumbers, 2 * np.pi * g.modes / g.length)
    # closed under negation except the Nyquist mode
    body = set(g.modes.tolist()) - {-16}
    assert all(-m in body for m in body)
    assert np.all(g.dealias_mask[np.abs(g.modes) > 32 / 3] == 0)
    assert np.all(g.dealias_mask[np.abs(g.modes) <= 32 / 3] == 1)


def test_2d_mask_is_tensor():
    g = make_grid(2, 16, 1.0)
    assert g.dealias_mask.shape == (16, 16)
    m = np.abs(g.modes)
    expect = (m[:, None] <= 16 / 3) & (m[None, :] <= 16 / 3)
    assert np.array_equal(g.dealias_mask.astype(bool), expect)


@given(st.integers(0, 2**31 - 1), st.sampled_from([1, 2]))
def test_fft_roundtrip(seed, dim):
    g = make_grid(dim, 16, 3.0)
    rng = np.random.default_rng(seed)
    f = rng.normal(size=g.shape) + 1j * rng.normal(size=g.shape)
    back = ifft(fft(f, g), g)
    assert np.max(np.abs(back - f)) <= 1e-12 * np.max(np.abs(f))


@given(st.integers(0, 2**31 - 1))
def test_real_field_stays_real(seed):
    g = make_grid(1, 32, 2.0)
    f = np.random.default_rng(seed).normal(size=g.shape)
    out = derivative(f, g)
    assert np.isrealobj(out)
    assert np.max(np.abs(ifft(fft(f, g), g).imag)) < 1e-12


def test_derivatives_against_analytic():
    g = make_grid(1, 64, 2 * np.pi)
    x = g.x[0]
    f = np.exp(np.sin(x))
    np.testing.assert_allclose(derivative(f, g), np.cos(x) * f, atol=1e-12)
    d2 = (np.cos(x) ** 2 - np.sin(x)) * f
    np.testing.assert_allclose(derivative(f, g, order=2), d2, atol=1e-11)
    np.testing.assert_allclose(laplacian(f, g), d2, atol=1e-11)


def test_gradient_divergence_2d():
    g = make_grid(2, 32, 2 * np.pi)
    x, y = g.x
    f = np.sin(x) * np.cos(2 * y)
    gr = gradient(f, g)
    np.testing.assert_allclose(gr[0], np.cos(x) * np.cos(2 * y), atol=1e-12)
    np.testing.assert_allclose(gr[1], -2 * np.sin(x) * np.sin(2 * y), atol=1e-12)
    np.testing.assert_allclose(divergence(gr, g), laplacian(f, g), atol=1e-11)


def test_integrate_matches_quadrature():
    g = make_grid(1, 256, 30.0)
    x = g.x[0]
    f = lambda s: np.exp(-(s - 0.3) ** 2) * (1 + 0.2 * s) ** 2  # noqa: E731
    ref, _ = quad(f, -15, 15, epsabs=1e-14)
    assert abs(integrate(f(x), g) - ref) < 1e-12


def test_norms_oracle():
    g = make_grid(1, 256, 30.0)
    x = g.x[0]
    f = np.exp(-x**2)
    n = norms(f, g)
    l2ref = np.sqrt(quad(lambda s: np.exp(-2 * s * s), -15, 15)[0])
    h1ref = np.sqrt(quad(lambda s: 4 * s * s * np.exp(-2 * s * s), -15, 15)[0])
    assert abs(n["L2"] - l2ref) < 1e-12
    assert abs(n["H1_seminorm"] - h1ref) < 1e-12
    assert abs(l2_norm(f, g) - l2ref) < 1e-12
    assert abs(spectral_l2(f, g) - l2ref) < 1e-12
    assert abs(n["Linf"] - 1.0) < 1e-12


def test_dealias_removes_top_modes():
    g = make_grid(1, 32, 2 * np.pi)
    x = g.x[0]
    f = np.cos(3 * x) + np.cos(14 * x)
    np.testing.assert_allclose(dealias(f, g), np.cos(3 * x), atol=1e-13)


@given(st.floats(-5, 5))
def test_fourier_shift_band_limited(s):
    g = make_grid(1, 64, 10.0)
    x = g.x[0]
    k = 2 * np.pi / 10.0
    f = np.sin(3 * k * x) + 0.5 * np.cos(k * x)
    exact = np.sin(3 * k * (x + s)) + 0.5 * np.cos(k * (x + s))
    np.testing.assert_allclose(fourier_shift(f, g, s), exact, atol=1e-12)


def test_antiderivative():
    g = make_grid(1, 128, 2 * np.pi)
    x = g.x[0]
    f = np.cos(x) + 0.25
    F = antiderivative(f, g)
    np.testing.assert_allclose(derivative(F - 0.25 * x, g), np.cos(x), atol=1e-12)
    np.testing.assert_allclose(np.gradient(F, g.dx)[5:-5], f[5:-5], atol=2e-3)


def test_max_gradient():
    g = make_grid(1, 64, 2 * np.pi)
    assert abs(max_gradient(np.sin(2 * g.x[0]), g) - 2.0) < 1e-3
