import numpy as np
import pytest

from qhdlab.asymptotics import right_moving_family, sech2_family
from qhdlab.errors import LiftingError
from qhdlab.grid import integrate, make_grid
from qhdlab.kdv import (gp_data, inverse_rescale, kdv_evolve, kdv_rescale, kdv_residual,
                        kdv_soliton, physical_fields, run_gp_transonic, transonic_setup)

G = make_grid(1, 256, 60.0)


@pytest.mark.parametrize("direction", ["left", "right"])
def test_soliton_is_travelling_solution(direction):
    x = G.x[0]
    u0 = kdv_soliton(x, 0.0, 1.0, direction)
    tr = kdv_evolve(u0, G, 2.0, 1e-3, direction)
    assert tr.final.tau == pytest.approx(2.0)
    assert np.max(np.abs(tr.final.u - kdv_soliton(x, 2.0, 1.0, direction))) < 1e-8


@pytest.mark.parametrize("direction", ["left", "right"])
def test_exact_soliton_has_small_midpoint_residual(direction):
    # oracle: analytic soliton at two nearby times satisfies the PDE to O(dtau^2)
    x = G.x[0]
    h = 1e-3
    r = kdv_residual(kdv_soliton(x, 0.0, 1.0, direction), kdv_soliton(x, h, 1.0, direction), h,
                     G, direction)
    assert np.max(np.abs(r)) < 1e-5


def test_mean_conserved_and_time_order():
    x = G.x[0]
    u0 = 1.5 / np.cosh(x / 3) ** 2 + 0.3 * np.cos(2 * np.pi * x / 60)
    ref = kdv_evolve(u0, G, 1.0, 2.5e-3).snapshots[-1]
    errs = []
    for dtau in (0.04, 0.02):
        u = kdv_evolve(u0, G, 1.0, dtau).snapshots[-1]
        errs.append(np.max(np.abs(u - ref)))
        assert integrate(u, G) == pytest.approx(integrate(u0, G), abs=1e-11)
    assert np.log2(errs[0] / errs[1]) > 3.5  # fourth order in dtau


def test_rescale_inverts_manufactured_fields():
    setup = transonic_setup(0.3, 256, 200.0)
    Ls = setup.slow_grid.length
    k = 2 * np.pi / Ls
    N = lambda tau, X: np.cos(k * X + tau) + 0.5  # noqa: E731
    dT = lambda tau, X: 0.7 * np.sin(2 * k * X - 3 * tau)  # noqa: E731
    times = np.linspace(0.0, 40.0, 5)
    b = kdv_rescale(times, inverse_rescale(times, N, dT, setup), setup)
    X = setup.slow_grid.x[0]
    for m, tau in enumerate(b.taus):
        assert np.max(np.abs(b.N_plus[m] - N(tau, X))) < 1e-8
        assert np.max(np.abs(b.dTheta_plus[m] - dT(tau, X))) < 1e-8


def test_slow_variables_at_initial_time():
    eps = 0.2
    setup = transonic_setup(eps, 1024, 400.0)
    X = setup.slow_grid.x[0]
    b = kdv_rescale([0.0], [gp_data(setup, *sech2_family())], setup)
    half = 0.5 / np.cosh(X / 2) ** 2
    assert np.max(np.abs(b.U_plus[0] - half)) < 1e-10
    assert np.max(np.abs(b.U_minus[0] - half)) < 1e-10
    b = kdv_rescale([0.0], [gp_data(setup, *right_moving_family())], setup)
    assert np.max(np.abs(b.U_minus[0])) < 1e-8
    assert np.max(np.abs(b.U_plus[0])) > 0.1


def test_vacuum_blocks_phase_lifting():
    setup = transonic_setup(0.3, 128, 100.0)
    psi = np.tanh(setup.gp_grid.x[0]) + 0j
    with pytest.raises(LiftingError):
        physical_fields(psi, setup)
    with pytest.raises(LiftingError):
        gp_data(setup, lambda X: 1e3 + 0 * X, lambda X: 0 * X)


def test_gp_run_checkpoints():
    setup = transonic_setup(0.3, 256, 300.0)
    psi0 = gp_data(setup, *sech2_family())
    times, snaps = run_gp_transonic(psi0, setup, 0.05, dt=0.05, checkpoints=2)
    assert len(times) == 3
    assert setup.tau_of_t(times[-1]) == pytest.approx(0.05)
