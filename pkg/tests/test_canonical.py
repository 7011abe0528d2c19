import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import REF
from ptcavity.canonical import CovarianceState, canonical_rhs, init_from_packet, integrate
from ptcavity.errors import NumericalError
from ptcavity.kernels import backends
from ptcavity.oscillator import HBAR, OscillatorParams, center_of_mass_closed_form


def _ground(p):
    # stored units are hbar/2, so ground-state Sqq = 1/(m Omega)*... scaled by 2/hbar
    return init_from_packet(p.rho, 0.0, 0.0, p)


def test_ground_state_is_fixed_point():
    p = OscillatorParams(1.3, 0.8, 0.7, HBAR)
    g = _ground(p)
    state = CovarianceState(0.0, p.mass * p.omega * p.delta, g.sqq, g.spp, 0.0)
    d = canonical_rhs(state, p)
    assert d.as_array() == pytest.approx(np.zeros(5), abs=1e-14)


def test_hermitian_reduction():
    p = OscillatorParams(1.3, 0.8, 0.0, HBAR)
    g = _ground(p)
    d = canonical_rhs(CovarianceState(0.4, 0.2, g.sqq, g.spp, 0.0), p)
    assert d.q == pytest.approx(0.2 / 1.3)
    assert d.p == pytest.approx(-1.3 * 0.64 * 0.4)


def test_covariance_balance():
    p = OscillatorParams(2.0, 0.5)
    d = canonical_rhs(CovarianceState(0, 0, 3.0, p.mass ** 2 * p.omega ** 2 * 3.0, 0.0), p)
    assert d.spq == pytest.approx(0.0, abs=1e-14)


def test_init_ground_state_covariance():
    p = OscillatorParams(1.7, 0.9)
    g = _ground(p)
    assert g.sqq == pytest.approx(1.0 / (p.mass * p.omega))
    assert g.spp == pytest.approx(p.mass * p.omega)


@settings(max_examples=30, deadline=None)
@given(sigma=st.floats(1e-4, 1e3))
def test_init_is_pure(sigma):
    assert init_from_packet(sigma, 0, 0, OscillatorParams(1.0, 1.0)).purity == pytest.approx(1.0)


def test_stored_fig2_variance(fig2_params):
    s = init_from_packet(1.0 / 40 ** 2, 0, 0, fig2_params)
    assert s.sqq == pytest.approx(REF["sqq_stored"], rel=1e-12)


def test_hermitian_oscillation():
    p = OscillatorParams(1.0, 1.0, 0.0, HBAR)
    g = _ground(p)
    state = CovarianceState(1.0, 0.0, g.sqq, g.spp, 0.0)
    traj = integrate(state, np.pi / p.omega, 1e-3 / p.omega, p)
    assert traj.t[-1] == pytest.approx(np.pi)
    assert traj.q[-1] == pytest.approx(-1.0, abs=1e-8)


def test_fig2_matches_closed_form(fig2_params):
    p = fig2_params
    sigma = 1.0 / 40 ** 2
    traj = integrate(init_from_packet(sigma, 0, 0, p), 3 * p.period, 1e-3 / p.omega, p, every=50)
    q_h, q_nh = center_of_mass_closed_form(traj.t, 0, 0, sigma, p)
    q = q_h + q_nh
    assert np.max(np.abs(traj.q - q)) / np.max(np.abs(q)) < 1e-6


def test_fourth_order_convergence():
    p = OscillatorParams(1.0, 1.0, 0.5, HBAR)
    s0 = init_from_packet(0.3, 1.0, 0.2, p)
    t_end = 5.0
    q_h, q_nh = center_of_mass_closed_form(t_end, 1.0, 0.2, 0.3, p)
    e1 = abs(integrate(s0, t_end, 0.05, p, purity_tol=1.0).q[-1] - (q_h + q_nh))
    e2 = abs(integrate(s0, t_end, 0.025, p, purity_tol=1.0).q[-1] - (q_h + q_nh))
    assert e1 / e2 >= 14.0


def test_partial_last_step_lands_on_end():
    p = OscillatorParams(1.0, 1.0)
    traj = integrate(init_from_packet(0.5, 1, 0, p), 1.0, 0.3, p, every=2, purity_tol=1.0)
    assert traj.t[-1] == pytest.approx(1.0)
    assert traj.q[-1] == pytest.approx(np.cos(1.0), abs=1e-3)


def test_purity_breach_raises():
    p = OscillatorParams(1.0, 1.0)
    with pytest.raises(NumericalError):
        integrate(init_from_packet(0.5, 1, 0, p), 50.0, 0.9, p)


def test_bad_arguments():
    p = OscillatorParams(1.0, 1.0)
    s = init_from_packet(0.5, 0, 0, p)
    with pytest.raises(ValueError):
        integrate(s, 1.0, 0.0, p)
    with pytest.raises(ValueError):
        integrate(s, -1.0, 0.1, p)
    with pytest.raises(ValueError):
        init_from_packet(0.0, 0, 0, p)


@pytest.mark.skipif(len(backends()) < 2, reason="numba not installed")
def test_backends_agree():
    y0 = np.array([1.0, 0.3, 2.0, 0.5, 0.1])
    a = backends()["numpy"][0](y0, 1000, 1e-2, 1.2, 0.8, 0.4, 10)
    b = backends()["numba"][0](y0, 1000, 1e-2, 1.2, 0.8, 0.4, 10)
    np.testing.assert_allclose(a, b, rtol=1e-11, atol=1e-12)
