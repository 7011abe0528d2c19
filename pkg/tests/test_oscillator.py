import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import REF
from ptcavity.errors import SingularTimeError
from ptcavity.oscillator import (
    HBAR,
    GaussianPacket,
    OscillatorParams,
    center_of_mass_closed_form,
    closed_form_coefficients,
    free_drift_velocity,
    fundamental_mode,
    mehler_kernel,
    propagate_packet,
)
from ptcavity.quadrature import mehler_quadrature, mehler_quadrature_packet


def _centroid(x, psi):
    w = np.abs(psi) ** 2
    return np.sum(x * w) / np.sum(w)


def test_params_validation():
    with pytest.raises(ValueError):
        OscillatorParams(mass=-1.0, omega=1.0)
    with pytest.raises(ValueError):
        OscillatorParams(mass=1.0, omega=0.0)
    with pytest.raises(ValueError):
        OscillatorParams(mass=1.0, omega=1.0, delta=np.nan)


def test_kernel_quarter_period_reduces_to_fourier_kernel():
    p = OscillatorParams(1.3, 0.7, 0.0, HBAR)
    t = np.pi / (2 * p.omega)
    x, xi = 0.3, -1.1
    expect = np.sqrt(p.mass * p.omega / (2j * np.pi * p.hbar)) * np.exp(
        -1j * p.mass * p.omega * x * xi / p.hbar
    )
    assert mehler_kernel(x, xi, t, p) == pytest.approx(expect, rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(
    x=st.floats(-5, 5), xi=st.floats(-5, 5), t=st.floats(0.1, 2.9),
    m=st.floats(0.5, 2), w=st.floats(0.5, 1.0),
)
def test_kernel_symmetric(x, xi, t, m, w):
    p = OscillatorParams(m, w)
    assert mehler_kernel(x, xi, t, p) == pytest.approx(mehler_kernel(xi, x, t, p), rel=1e-12)


def test_kernel_singular_time_raises():
    p = OscillatorParams(1.0, 1.0)
    with pytest.raises(SingularTimeError):
        mehler_kernel(0.0, 0.0, np.pi, p)


def test_kernel_evolves_ground_state_by_phase():
    p = OscillatorParams(1.0, 1.0, 0.0, HBAR)
    t = 1.0 / p.omega
    xi = np.linspace(-3, 3, 4001)
    x = np.linspace(-0.5, 0.5, 11)
    log_phi = -p.rho * xi ** 2
    out = mehler_quadrature(x, xi, log_phi, t, p)
    expect = np.exp(-0.5j * p.omega * t) * np.exp(-p.rho * x ** 2)
    np.testing.assert_allclose(out, expect, atol=1e-10)


def test_ground_state_unchanged_by_closed_form():
    p = OscillatorParams(1.0, 1.0, 0.0, HBAR)
    g = GaussianPacket.coherent(0.0, 0.0, p.rho, HBAR)
    for t in (0.3, 2.0, 7.5):
        out = propagate_packet(g, t, p)
        assert complex(out.a) == pytest.approx(p.rho, rel=1e-12)
        assert abs(complex(out.b)) < 1e-12


def test_full_period_returns_to_start():
    p = OscillatorParams(1.0, 1.3)
    q_h, q_nh = center_of_mass_closed_form(2 * np.pi / p.omega, 2.0, 0.0, 0.7, p)
    assert q_h == pytest.approx(2.0, abs=1e-12)
    assert q_nh == pytest.approx(0.0, abs=1e-12)


def test_hermitian_limit_has_no_anharmonic_part():
    p = OscillatorParams(1.0, 1.3)
    t = np.linspace(0, 10, 50)
    q_h, q_nh = center_of_mass_closed_form(t, 1.5, 0.4, 3.0, p)
    assert np.all(q_nh == 0)
    np.testing.assert_allclose(q_h, 1.5 * np.cos(1.3 * t) + 0.4 / 1.3 * np.sin(1.3 * t))


def test_closed_form_at_origin():
    p = OscillatorParams(1.0, 1.3, 0.4)
    q_h, q_nh = center_of_mass_closed_form(0.0, 0.8, 0.5, 2.0, p)
    assert (q_h, q_nh) == (0.8, 0.0)


def test_fig2_coefficients(fig2_params):
    c2, c1 = closed_form_coefficients(1.0 / 40 ** 2, fig2_params)
    assert c2 == pytest.approx(REF["c2"], rel=1e-12)
    assert c1 == pytest.approx(REF["c1"], rel=1e-12)
    assert abs(c2 / c1) == pytest.approx(0.4734, abs=1e-4)


def test_matched_waist_coefficients_vanish(fig2_params):
    c2, c1 = closed_form_coefficients(fig2_params.rho, fig2_params)
    # sin(2 Omega t) term vanishes for a matched packet
    assert abs(c2) < 1e-12


def test_fig2_one_round_trip_matches_quadrature(fig2_params):
    p = fig2_params
    sigma = 1.0 / 40 ** 2
    packet = GaussianPacket.coherent(0.0, 0.0, sigma, p.hbar)
    out = propagate_packet(packet, 1.0, p)
    eta = np.linspace(-600, 600, 2 ** 14)
    x = np.linspace(-500, 500, 1001)
    psi = mehler_quadrature_packet(x, eta, packet, 1.0, p)
    q_quad = _centroid(x, psi)
    assert out.center == pytest.approx(q_quad, rel=1e-6)
    q_h, q_nh = center_of_mass_closed_form(1.0, 0.0, 0.0, sigma, p)
    assert out.center == pytest.approx(q_h + q_nh, rel=1e-10)


def test_packet_matches_quadrature_across_half_periods():
    p = OscillatorParams(1.2, 0.8, 0.3, HBAR)
    packet = GaussianPacket.coherent(0.5, 0.2, 0.9, HBAR)
    eta = np.linspace(-12, 12, 2 ** 12)
    x = np.linspace(-3, 3, 61)
    for t in (0.7, 4.9, 9.1):
        psi = mehler_quadrature_packet(x, eta, packet, t, p)
        ref = propagate_packet(packet, t, p)(x)
        np.testing.assert_allclose(psi, ref, atol=1e-9 * np.abs(ref).max())


def test_fundamental_mode(fig2_params):
    p = fig2_params
    assert p.waist == pytest.approx(REF["w0"], rel=1e-12)
    mode = fundamental_mode(p)
    assert mode.momentum == pytest.approx(REF["p0"], rel=1e-12)
    x = np.linspace(-800, 800, 2 ** 14)
    psi = mode(x)
    dpsi = np.gradient(psi, x)
    p_quad = np.real(np.sum(np.conj(psi) * (-1j * p.hbar) * dpsi) / np.sum(np.abs(psi) ** 2))
    assert p_quad == pytest.approx(p.mass * p.omega * p.delta, rel=1e-5)


def test_fundamental_mode_hermitian():
    p = OscillatorParams(1.0, 1.0)
    mode = fundamental_mode(p)
    assert mode.momentum == 0.0
    assert mode.center == 0.0


def test_free_drift_velocity(fig2_params):
    assert free_drift_velocity(OscillatorParams(1.0, 1.0)) == 0.0
    v = free_drift_velocity(fig2_params)
    assert v == pytest.approx(REF["v0"], rel=1e-12)
    assert v == pytest.approx(fundamental_mode(fig2_params).momentum / fig2_params.mass, rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(
    a=st.floats(0.1, 5), bre=st.floats(-3, 3), bim=st.floats(-3, 3),
    sre=st.floats(-2, 2), sim=st.floats(-2, 2),
)
def test_complex_shift_inverts(a, bre, bim, sre, sim):
    g = GaussianPacket(a, complex(bre, bim), 0.0)
    s = complex(sre, sim)
    back = g.shifted(s).shifted(-s)
    assert complex(back.a) == pytest.approx(a)
    assert complex(back.b) == pytest.approx(complex(bre, bim), abs=1e-9)
    assert complex(back.c) == pytest.approx(0.0, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(
    q0=st.floats(-3, 3), p0=st.floats(-0.5, 0.5), sigma=st.floats(0.2, 5),
    delta=st.floats(-1, 1), t=st.floats(0.0, 30.0),
)
def test_closed_form_equals_packet_flow(q0, p0, sigma, delta, t):
    p = OscillatorParams(1.0, 0.9, delta, HBAR)
    packet = GaussianPacket.coherent(q0, p0, sigma, HBAR)
    q_h, q_nh = center_of_mass_closed_form(t, q0, p0, sigma, p)
    assert propagate_packet(packet, t, p).center == pytest.approx(q_h + q_nh, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(sigma=st.floats(0.1, 10), delta=st.floats(-2, 2), t=st.floats(0.0, 50.0))
def test_evolved_packet_stays_normalizable(sigma, delta, t):
    p = OscillatorParams(1.0, 0.6, delta, HBAR)
    out = propagate_packet(GaussianPacket.coherent(0.0, 0.0, sigma, HBAR), t, p)
    assert out.width > 0
