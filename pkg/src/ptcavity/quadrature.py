"""Brute-force kernel quadratures.

These are reference routes, independent of the closed-form packet algebra
and of the FFT propagator; they exist to validate both.  Each output sample
is a full Riemann sum over the input grid, O(N_out * N_in).

Inputs are passed as logarithms of the sampled fields so that the large
real exponents produced by the complex displacement cancel inside a single
exp() instead of overflowing separately.
"""
import numpy as np

from .kernels import exp_bilinear_sum
from .oscillator import mehler_prefactor


def _log(values):
    with np.errstate(divide="ignore"):
        return np.log(np.asarray(values, dtype=complex))


def mehler_quadrature(x_out, xi, log_psi_in, t, params, tol=1e-9):
    """psi(x, t) = int dxi U(x - i delta, xi - i delta, t) psi(xi, 0).

    Parameters
    ----------
    x_out : array
        Output positions.
    xi : array
        Uniform integration grid.
    log_psi_in : array
        log of the initial samples psi(xi, 0).
    """
    xi = np.asarray(xi, dtype=float)
    dxi = xi[1] - xi[0]
    wt = params.omega * t
    s, c = np.sin(wt), np.cos(wt)
    coef = 1j * params.mass * params.omega / (2.0 * params.hbar * s)
    z = np.asarray(x_out, dtype=float) - 1j * params.delta
    zeta = xi - 1j * params.delta
    logw = np.asarray(log_psi_in, dtype=complex) + coef * c * zeta * zeta
    alpha = coef * c * z * z
    inner = exp_bilinear_sum(alpha, z, logw, zeta, -2.0 * coef)
    return mehler_prefactor(t, params, tol) * inner * dxi


def collins_quadrature(x_out, xi, f_in, matrix, wavelength=1.0):
    """Direct Riemann sum of the Fresnel (Collins) integral for an ABCD system.

    K(x, xi) = sqrt(i/(lambda B)) exp[-i pi/(lambda B) (D x^2 + A xi^2 - 2 xi x)]
    """
    A, B, D = matrix.A, matrix.B, matrix.D
    if B == 0:
        raise ValueError("Collins kernel undefined for B = 0")
    xi = np.asarray(xi, dtype=float)
    dxi = xi[1] - xi[0]
    x_out = np.asarray(x_out, dtype=float)
    g = np.pi / (wavelength * B)
    logw = _log(f_in) - 1j * g * A * xi * xi
    alpha = -1j * g * D * x_out * x_out
    inner = exp_bilinear_sum(alpha, x_out.astype(complex), logw, xi.astype(complex), 2j * g)
    return np.sqrt(1j / (wavelength * B) + 0j) * inner * dxi


def mehler_quadrature_packet(x_out, eta, packet, t, params, tol=1e-9):
    """Same integral as :func:`mehler_quadrature` for a Gaussian initial state.

    For each output point the integration line is moved parallel to the real
    axis through the saddle point of the integrand, xi = eta + i tau(x).  The
    integrand is entire and decays in the strip, so the value is unchanged,
    but the terms no longer cancel against each other; on the real axis the
    far tails of the result are lost to round-off once the complex
    displacement is a sizeable fraction of the packet width.

    ``eta`` is the uniform real grid traversed along every line.
    """
    eta = np.asarray(eta, dtype=float)
    deta = eta[1] - eta[0]
    wt = params.omega * t
    s, c = np.sin(wt), np.cos(wt)
    coef = 1j * params.mass * params.omega / (2.0 * params.hbar * s)
    d = params.delta
    z = np.asarray(x_out, dtype=float) - 1j * d
    a, b, c0 = complex(packet.a), complex(packet.b), complex(packet.c)
    # exponent in xi: -aq xi^2 + bj xi + cj
    aq = a - coef * c
    bj = b - 2j * d * coef * c - 2.0 * coef * z
    cj = c0 - coef * c * d * d + coef * c * z * z + 2j * d * coef * z
    tau = (bj / (2.0 * aq)).imag
    z_line = bj - 2j * aq * tau
    alpha = aq * tau * tau + 1j * bj * tau + cj
    logw = -aq * eta * eta
    inner = exp_bilinear_sum(alpha, z_line, logw, eta.astype(complex), 1.0)
    return mehler_prefactor(t, params, tol) * inner * deta
