import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qhdlab.errors import VacuumError
from qhdlab.grid import gradient, make_grid
from qhdlab.laws import constant_capillarity, qhd_capillarity
from qhdlab.madelung import (curl_identity_residual, extended_vars_korteweg, extended_vars_qhd,
                             from_hydro, mod_identity_residual, to_hydro, unit_phase,
                             vacuum_fraction, weak_vars)
from qhdlab.weakqhd import vortex_dipole


def _random_smooth(g, rng, modes=4):
    x = g.x[0]
    out = np.zeros(g.shape)
    for m in range(1, modes + 1):
        kk = 2 * np.pi * m / g.length
        out += rng.normal() / m**2 * np.cos(kk * x + rng.uniform(0, 2 * np.pi))
    return out


@given(st.integers(0, 2**31 - 1), st.floats(0.1, 2.0))
def test_hydro_roundtrip(seed, eps):
    g = make_grid(1, 128, 2 * np.pi)
    rng = np.random.default_rng(seed)
    rho = 1.5 + 0.5 * np.tanh(_random_smooth(g, rng))
    phi = _random_smooth(g, rng)
    h = to_hydro(from_hydro(rho, phi, eps), g, eps)
    np.testing.assert_allclose(h.rho, rho, atol=1e-12)
    np.testing.assert_allclose(h.v[0], gradient(phi, g)[0], atol=1e-9)
    assert not h.vacuum_mask.any()


def test_vacuum_is_masked():
    g = make_grid(1, 64, 10.0)
    psi = np.tanh(g.x[0]) + 0j
    h = to_hydro(psi, g, 1.0, vacuum_threshold=1e-3)
    assert h.vacuum_mask.sum() == 1 and h.v[0][h.vacuum_mask].item() == 0.0
    assert vacuum_fraction(psi, 1e-3) == pytest.approx(1 / 64)
    with pytest.raises(ValueError):
        to_hydro(psi, g, 1.0, vacuum_threshold=0.0)
    with pytest.raises(ValueError):
        from_hydro(-np.ones(3), np.zeros(3), 1.0)


def test_extended_vars():
    g = make_grid(1, 128, 2 * np.pi)
    x = g.x[0]
    rho = 1 + 0.3 * np.sin(x)
    v = (0.1 * np.cos(x))[None]
    st = extended_vars_qhd(rho, v, 0.5, g)
    np.testing.assert_allclose(st.w[0], -0.25 * 0.3 * np.cos(x) / rho, atol=1e-12)
    sk = extended_vars_korteweg(rho, v, qhd_capillarity(0.5), g)
    np.testing.assert_allclose(sk.z, st.z, atol=1e-13)
    sc = extended_vars_korteweg(rho, v, constant_capillarity(0.04), g)
    np.testing.assert_allclose(sc.w[0], -np.sqrt(0.04 / rho) * gradient(rho, g)[0], atol=1e-12)
    with pytest.raises(VacuumError):
        extended_vars_qhd(rho - 0.8, v, 0.5, g)


@given(st.integers(0, 2**31 - 1))
def test_mod_identity_on_random_fields(seed):
    g = make_grid(1, 64, 2 * np.pi)
    rng = np.random.default_rng(seed)
    psi = np.exp(_random_smooth(g, rng) + 1j * _random_smooth(g, rng))
    assert mod_identity_residual(psi, g) < 1e-10


def test_weak_vars_identities_at_vortex():
    g = make_grid(2, 128, 24.0)
    psi = vortex_dipole(g, offset=(0.5 * g.dx, 0.5 * g.dx))
    wv = weak_vars(psi, g)
    np.testing.assert_allclose(wv.J, np.sqrt(wv.rho) * wv.Lam)
    # J equals the current Im(conj(psi) grad psi) wherever psi != 0
    cur = np.imag(np.conj(psi) * gradient(psi, g))
    np.testing.assert_allclose(wv.J, cur, atol=1e-12)
    assert mod_identity_residual(psi, g) < 1e-10
    assert np.max(np.abs(unit_phase(psi))) <= 1 + 1e-15


def test_curl_identity_zero_in_1d():
    g = make_grid(1, 32, 5.0)
    assert curl_identity_residual(np.exp(1j * g.x[0]), g) == 0.0
