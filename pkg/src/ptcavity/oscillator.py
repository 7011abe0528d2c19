"""Exact dynamics of the PT-symmetric harmonic oscillator.

H = -hbar^2/(2m) d^2/dx^2 + m Omega^2 (x - i delta)^2 / 2

Units: lengths in wavelengths (lambda = 1), hbar = 1/k = 1/(2 pi), time in
round trips.  Gaussian packets are stored as exp(-a x^2 + b x + c) with
complex a, b, c, which is closed under every operation used here (complex
shifts and the harmonic-oscillator flow), so no quadrature is needed and
propagation stays finite at Omega t = n pi.
"""
from dataclasses import dataclass

import numpy as np

from .errors import SingularTimeError

HBAR = 1.0 / (2.0 * np.pi)

__all__ = [
    "HBAR",
    "OscillatorParams",
    "GaussianPacket",
    "mehler_kernel",
    "mehler_prefactor",
    "propagate_packet",
    "center_of_mass_closed_form",
    "closed_form_coefficients",
    "fundamental_mode",
    "free_drift_velocity",
]


@dataclass(frozen=True)
class OscillatorParams:
    """Mass, frequency, imaginary displacement and hbar-analog of the oscillator."""

    mass: float
    omega: float
    delta: float = 0.0
    hbar: float = HBAR

    def __post_init__(self):
        if not self.mass > 0:
            raise ValueError(f"mass must be positive, got {self.mass}")
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        if not self.hbar > 0:
            raise ValueError(f"hbar must be positive, got {self.hbar}")
        if not np.isfinite(self.delta):
            raise ValueError(f"delta must be finite, got {self.delta}")

    @property
    def rho(self):
        """Ground-state width parameter m Omega / (2 hbar)."""
        return self.mass * self.omega / (2.0 * self.hbar)

    @property
    def waist(self):
        """TEM00 waist 1/sqrt(rho)."""
        return 1.0 / np.sqrt(self.rho)

    @property
    def period(self):
        return 2.0 * np.pi / self.omega

    def hermitian(self):
        """Same oscillator with delta = 0."""
        return OscillatorParams(self.mass, self.omega, 0.0, self.hbar)


@dataclass(frozen=True)
class GaussianPacket:
    """psi(x) = exp(-a x^2 + b x + c), with Re(a) > 0.

    ``c`` carries normalization and global phase; neither is meaningful for
    the observables, which are computed from normalized quantities.
    """

    a: complex
    b: complex
    c: complex = 0.0
    hbar: float = HBAR

    def __post_init__(self):
        if not complex(self.a).real > 0:
            raise ValueError(f"packet not normalizable: Re(a) = {complex(self.a).real}")

    @classmethod
    def coherent(cls, q0, p0, sigma, hbar=HBAR):
        """Packet proportional to exp[-sigma (x - q0)^2 + i p0 x / hbar]."""
        if not sigma > 0:
            raise ValueError(f"sigma must be positive, got {sigma}")
        return cls(
            a=complex(sigma),
            b=complex(2.0 * sigma * q0, p0 / hbar),
            c=complex(-sigma * q0 * q0),
            hbar=hbar,
        )

    @property
    def width(self):
        """Re(a): |psi|^2 is proportional to exp(-2 Re(a) (x - q)^2)."""
        return complex(self.a).real

    @property
    def center(self):
        return complex(self.b).real / (2.0 * complex(self.a).real)

    @property
    def momentum(self):
        """<-i hbar d/dx> for the normalized packet."""
        a = complex(self.a)
        b = complex(self.b)
        return self.hbar * (b.imag - 2.0 * a.imag * self.center)

    @property
    def position_variance(self):
        return 1.0 / (4.0 * complex(self.a).real)

    def __call__(self, x):
        x = np.asarray(x)
        return np.exp(-self.a * x * x + self.b * x + self.c)

    def shifted(self, s):
        """The packet x -> psi(x + s) for complex ``s``."""
        a, b, c = complex(self.a), complex(self.b), complex(self.c)
        return GaussianPacket(a, b - 2.0 * a * s, c - a * s * s + b * s, self.hbar)


def _sin_guard(params, t, tol):
    s = np.sin(params.omega * np.asarray(t, dtype=float))
    if np.any(np.abs(s) < tol):
        raise SingularTimeError(
            f"Mehler kernel is singular at Omega*t = {params.omega * np.asarray(t)}"
        )
    return s


def mehler_prefactor(t, params, tol=1e-12):
    """sqrt(m Omega / (2 pi i hbar sin(Omega t))) on the branch continuous in t.

    The phase is exp(-i pi/4 - i n pi/2) on the n-th half period
    (n pi < Omega t < (n+1) pi), which makes the kernel evolve the ground
    state by exactly exp(-i Omega t / 2).
    """
    s = _sin_guard(params, t, tol)
    n = np.floor(params.omega * np.asarray(t, dtype=float) / np.pi)
    mag = np.sqrt(params.mass * params.omega / (2.0 * np.pi * params.hbar * np.abs(s)))
    return mag * np.exp(-1j * (np.pi / 4.0 + n * np.pi / 2.0))


def mehler_kernel(x, xi, t, params, tol=1e-12):
    """Harmonic-oscillator propagator U(x, xi, t).

    Accepts complex ``x`` and ``xi`` so the displaced kernel
    U(x - i delta, xi - i delta, t) can be evaluated directly.

    Raises
    ------
    SingularTimeError
        If |sin(Omega t)| < ``tol``.
    """
    pre = mehler_prefactor(t, params, tol)
    wt = params.omega * np.asarray(t, dtype=float)
    s, c = np.sin(wt), np.cos(wt)
    x = np.asarray(x)
    xi = np.asarray(xi)
    coef = 1j * params.mass * params.omega / (2.0 * params.hbar * s)
    return pre * np.exp(coef * ((x * x + xi * xi) * c - 2.0 * x * xi))


def _continuous_log(z, phase):
    """log(z) with the imaginary part continued along Omega t = ``phase``.

    Along the oscillator flow Im(z) has the sign of sin(phase), so z crosses
    the real axis only at phase = n pi; the branch is fixed by counting
    half periods.
    """
    k = np.floor(phase / (2.0 * np.pi))
    rem = phase - 2.0 * np.pi * k
    arg = np.angle(z) + 2.0 * np.pi * k
    if rem > np.pi and np.angle(z) < 0:
        arg += 2.0 * np.pi
    return np.log(abs(z)) + 1j * arg


def _hermitian_flow(packet, t, params):
    wt = params.omega * t
    mw = params.mass * params.omega
    A, B = np.cos(wt), np.sin(wt) / mw
    C, D = -mw * np.sin(wt), np.cos(wt)
    hbar = packet.hbar
    a, b, c = complex(packet.a), complex(packet.b), complex(packet.c)
    gamma = 2j * hbar * a
    den = A + B * gamma
    gamma_new = (C + D * gamma) / den
    a_new = gamma_new / (2j * hbar)
    b_new = b / den
    c_new = c + 1j * hbar * B * b * b / (2.0 * den) - 0.5 * _continuous_log(den, wt)
    return GaussianPacket(a_new, b_new, c_new, hbar)


def propagate_packet(packet, t, params):
    """Evolve a Gaussian packet exactly under the PT-symmetric oscillator.

    The displaced propagator U(x - i delta, xi - i delta, t) is handled by
    shifting the contour: continue the packet to xi + i delta, evolve it with
    the Hermitian oscillator flow, and continue back by -i delta.
    """
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t}")
    if packet.hbar != params.hbar:
        raise ValueError("packet and oscillator use different hbar")
    if t == 0:
        return packet
    shift = 1j * params.delta
    out = _hermitian_flow(packet.shifted(shift), float(t), params)
    return out.shifted(-shift)


def closed_form_coefficients(sigma, params):
    """Coefficients (c2, c1) of q_NH(t) = c2 sin(2 Omega t) + c1 sin(Omega t)."""
    r = sigma * params.hbar / (params.mass * params.omega)
    c2 = params.delta * (r - 1.0 / (4.0 * r))
    c1 = -2.0 * params.delta * r
    return c2, c1


def center_of_mass_closed_form(t, q0, p0, sigma, params):
    """Harmonic and non-Hermitian parts of the packet center.

    Returns
    -------
    (q_H, q_NH)
        Arrays (or scalars) of the same shape as ``t``; the trajectory is
        their sum.
    """
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    wt = params.omega * np.asarray(t, dtype=float)
    mw = params.mass * params.omega
    q_h = q0 * np.cos(wt) + p0 / mw * np.sin(wt)
    c2, c1 = closed_form_coefficients(sigma, params)
    q_nh = c2 * np.sin(2.0 * wt) + c1 * np.sin(wt)
    return q_h, q_nh


def fundamental_mode(params):
    """Lowest eigenmode exp[-rho (x - i delta)^2], rho = m Omega / (2 hbar)."""
    rho = params.rho
    d = params.delta
    return GaussianPacket(
        a=complex(rho), b=complex(0.0, 2.0 * rho * d), c=complex(rho * d * d), hbar=params.hbar
    )


def free_drift_velocity(params):
    """Speed Omega*delta of the ground state once the trap is switched off."""
    return params.omega * params.delta
