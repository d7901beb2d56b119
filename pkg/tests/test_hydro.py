import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qhdlab.data import compact_bump
from qhdlab.errors import VacuumError
from qhdlab.grid import gradient, integrate, l2_norm, make_grid
from qhdlab.hydro import (BreakdownThresholds, EulerState, QHDExtendedStepper, detect_breakdown,
                          euler_energy, euler_max_dt, euler_rhs, euler_step, exponential_filter,
                          korteweg_extended_step, linear_frequency, qhd_extended_step, run_euler,
                          solve_linearized, spectral_tail, w1inf)
from qhdlab.laws import constant_capillarity, cubic, gross_pitaevskii, qhd_capillarity
from qhdlab.madelung import extended_vars_korteweg, extended_vars_qhd


def test_uniform_state_is_steady():
    g = make_grid(1, 32, 10.0)
    s = EulerState(v=np.full((1, 32), 0.3), a=np.ones(32))
    s2 = euler_step(s, 0.01, gross_pitaevskii(), g)
    np.testing.assert_allclose(s2.v, s.v, atol=1e-15)
    np.testing.assert_allclose(s2.a, s.a, atol=1e-15)


def test_euler_rhs_matches_finite_differences():
    # symmetric form: v_t = -v v_x - f'(a^2) 2 a a_x, a_t = -v a_x - a v_x / 2
    n = 256
    g = make_grid(1, n, 2 * np.pi)
    x = g.x[0]
    v, a = 0.2 * np.sin(x), 1 + 0.1 * np.cos(x)
    y = np.concatenate([v[None], a[None]])
    r = euler_rhs(y, cubic(), g)
    vx, ax = np.gradient(v, g.dx), np.gradient(a, g.dx)
    inner = slice(2, -2)
    np.testing.assert_allclose(r[0][inner], (-v * vx - 2 * a * ax)[inner], atol=2e-3)
    np.testing.assert_allclose(r[1][inner], (-v * ax - 0.5 * a * vx)[inner], atol=2e-3)


def test_euler_energy_conserved_smooth():
    g = make_grid(1, 256, 2 * np.pi)
    x = g.x[0]
    s = EulerState.from_density(1 + 0.1 * np.sin(x), (0.05 * np.cos(x))[None])
    e0 = euler_energy(s, gross_pitaevskii(), g)
    dt = 0.5 * euler_max_dt(s, gross_pitaevskii(), g)
    for _ in range(100):
        s = euler_step(s, dt, gross_pitaevskii(), g)
    assert abs(euler_energy(s, gross_pitaevskii(), g) - e0) < 1e-8 * abs(e0)


@given(st.floats(0.0, 2.0), st.sampled_from([1, 2, 3]))
def test_linear_dispersion_relation(eps, m):
    g = make_grid(1, 32, 2 * np.pi)
    x = g.x[0]
    b0 = np.cos(m * x)
    t = 0.7
    lin = solve_linearized(b0, np.zeros((1, 32)), t, eps, g)
    w = linear_frequency(m, eps)
    np.testing.assert_allclose(lin.b, np.cos(w * t) * np.cos(m * x), atol=1e-12)
    # b_t + div v = 0 checked by a centred difference in time
    h = 1e-5
    bp = solve_linearized(b0, np.zeros((1, 32)), t + h, eps, g).b
    bm = solve_linearized(b0, np.zeros((1, 32)), t - h, eps, g).b
    np.testing.assert_allclose((bp - bm) / (2 * h), -gradient(lin.v[0], g)[0], atol=1e-6)


def test_linear_transverse_velocity_stationary():
    g = make_grid(2, 16, 2 * np.pi)
    x, y = g.x
    v0 = np.stack([np.sin(y), np.zeros_like(x)])  # divergence free
    lin = solve_linearized(np.zeros(g.shape), v0, 3.0, 0.5, g)
    np.testing.assert_allclose(lin.v, v0, atol=1e-13)
    np.testing.assert_allclose(lin.b, 0.0, atol=1e-13)


def test_qhd_small_amplitude_matches_linearised():
    g = make_grid(1, 64, 2 * np.pi)
    x = g.x[0]
    delta, eps = 1e-6, 0.5
    st = extended_vars_qhd(1 + delta * np.cos(2 * x), np.zeros((1, 64)), eps, g)
    stepper = QHDExtendedStepper(g, eps, 1e-3, gross_pitaevskii())
    z, r = st.z, st.rho
    for _ in range(500):
        z, r = stepper(z, r)
    lin = solve_linearized(delta * np.cos(2 * x), np.zeros((1, 64)), 0.5, eps, g)
    assert l2_norm(r - 1 - lin.b, g) < 1e-4 * l2_norm(lin.b, g) + 1e-14


def test_korteweg_qhd_capillarity_equals_qhd():
    g = make_grid(1, 64, 2 * np.pi)
    x = g.x[0]
    rho0 = 1 + 0.3 * np.sin(x)
    v0 = gradient(0.2 * np.cos(x), g)
    s1 = extended_vars_korteweg(rho0, v0, qhd_capillarity(0.5), g)
    s2 = s1
    for _ in range(50):
        s1 = korteweg_extended_step(s1, 2e-4, cubic(), qhd_capillarity(0.5), g)
        s2 = qhd_extended_step(s2, 2e-4, cubic(), g)
    assert np.max(np.abs(s1.z - s2.z)) < 1e-10
    assert np.max(np.abs(s1.rho - s2.rho)) < 1e-10


def test_korteweg_mass_conserved():
    g = make_grid(1, 128, 20.0)
    x = g.x[0]
    cap = constant_capillarity(0.01)
    s = extended_vars_korteweg(1 + 0.2 * np.exp(-x**2), (0.1 * np.exp(-x**2))[None], cap, g)
    m0 = integrate(s.rho, g)
    for _ in range(50):
        s = korteweg_extended_step(s, 1e-3, gross_pitaevskii(), cap, g)
    assert abs(integrate(s.rho, g) - m0) < 1e-12 * m0


def test_vacuum_floor_raises():
    g = make_grid(1, 64, 2 * np.pi)
    x = g.x[0]
    st = extended_vars_qhd(1 + 0.3 * np.sin(x), np.zeros((1, 64)), 0.5, g)
    with pytest.raises(VacuumError):
        qhd_extended_step(st, 1e-3, cubic(), g, floor=0.8)


def test_compact_data_breaks_down_without_leaking():
    g = make_grid(1, 1024, 16.0)
    x = g.x[0]
    b = compact_bump(x / 2.0)
    s = EulerState(v=(-x * b)[None], a=b.copy())
    run = run_euler(s, 3.0, 4e-4, cubic(), g, snapshot_every=0.02,
                    thresholds=BreakdownThresholds(gradient_ratio=5.0))
    assert run.report.triggered and run.report.cause == "gradient_blowup"
    assert 0.8 < run.report.time < 1.3
    outside = np.abs(x) >= 2.0
    leak = max(integrate(np.where(outside, st.a**2, 0.0), g) for st in run.states)
    assert leak < 1e-8 * integrate(b**2, g)


def test_detect_breakdown_causes():
    g = make_grid(1, 32, 2 * np.pi)
    x = g.x[0]
    ok = EulerState(v=np.zeros((1, 32)), a=np.ones(32))
    thin = EulerState(v=np.zeros((1, 32)), a=np.full(32, 0.01))
    steep = EulerState(v=np.sin(8 * x)[None], a=np.ones(32))
    base = EulerState(v=np.sin(x)[None], a=np.ones(32))
    r = detect_breakdown([0, 1], [ok, thin], g, BreakdownThresholds(min_density=1e-3))
    assert r.triggered and r.cause == "vacuum_approach" and r.time == 1
    r = detect_breakdown([0, 1], [base, steep], g, BreakdownThresholds(gradient_ratio=5.0))
    assert r.cause == "gradient_blowup"
    nan = EulerState(v=np.full((1, 32), np.nan), a=np.ones(32))
    assert detect_breakdown([0, 1], [ok, nan], g, BreakdownThresholds()).cause == "nonfinite"
    assert not detect_breakdown([0], [ok], g, BreakdownThresholds(max_gradient=1.0)).triggered
    assert w1inf(steep.v, steep.a, g) == pytest.approx(8.0, rel=1e-3)


def test_spectral_tail_and_filter():
    g = make_grid(1, 128, 2 * np.pi)
    x = g.x[0]
    assert spectral_tail(np.cos(2 * x), g) < 1e-12
    assert spectral_tail(np.cos(30 * x), g) == pytest.approx(1.0)
    f = exponential_filter(g)
    assert f[0] == 1.0 and f.min() < 1e-10
