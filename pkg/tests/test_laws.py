import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qhdlab.laws import (CapillarityLaw, NonlinearityLaw, constant_capillarity, cubic,
                         embedding_ok, gross_pitaevskii, power, qhd_capillarity)

LAWS = [cubic(), gross_pitaevskii(), power(0.5), power(2.0), power(3.0)]


@pytest.mark.parametrize("law", LAWS, ids=lambda l: f"{l.name}-{l.sigma}")
@given(r=st.floats(0.05, 4.0))
def test_F_is_antiderivative_of_f(law, r):
    h = 1e-5
    fd = (law.F(r + h) - law.F(r - h)) / (2 * h)
    assert abs(fd - law.f(r)) < 1e-6 * max(1.0, abs(law.f(r)))
    assert law.F(0.0) == 0.0


@pytest.mark.parametrize("law", LAWS, ids=lambda l: f"{l.name}-{l.sigma}")
@given(r=st.floats(0.05, 4.0))
def test_pressure_and_df(law, r):
    assert law.P(r) == pytest.approx(r * law.f(r) - law.F(r), rel=1e-12, abs=1e-14)
    h = 1e-5
    assert law.df(r) == pytest.approx((law.f(r + h) - law.f(r - h)) / (2 * h), rel=1e-6)


def test_relative_energy_vanishes_quadratically():
    law = gross_pitaevskii()
    for d in (1e-2, 1e-3):
        assert law.relative_F(1 + d, 1.0) == pytest.approx(0.5 * d * d, rel=1e-9)
    assert law.relative_P(1.0, 1.0) == 0.0


def test_sound_speed():
    assert gross_pitaevskii().sound_speed(1.0) == pytest.approx(1.0)
    assert cubic().sound_speed(4.0) == pytest.approx(2.0)


def test_unknown_law():
    with pytest.raises(ValueError):
        NonlinearityLaw("quartic")
    with pytest.raises(ValueError):
        power(-1.0)


def test_embedding_gate():
    assert embedding_ok(3.0, 1)
    assert embedding_ok(1.0, 2)
    assert not embedding_ok(2.0, 2)


def test_capillarity():
    c = constant_capillarity(0.01)
    rho = np.array([0.5, 1.0, 2.0])
    np.testing.assert_allclose(c.kappa(rho), 0.01)
    q = qhd_capillarity(0.5)
    np.testing.assert_allclose(q.kappa(rho), 0.25 / (4 * rho))
    # (rho kappa)' vanishes for the QHD law
    np.testing.assert_allclose(q.rho_kappa_prime(rho), 0.0, atol=1e-15)
    np.testing.assert_allclose(c.rho_kappa_prime(rho), 0.01)
    with pytest.raises(ValueError):
        CapillarityLaw("weird", 1.0)
    with pytest.raises(ValueError):
        constant_capillarity(-1.0)
