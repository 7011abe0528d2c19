"""Optical resonator: ABCD optics, Collins propagation and the round-trip map.

All lengths are in units of the optical wavelength unless a ``wavelength``
argument says otherwise.  The Fresnel kernel follows the convention

    K(x, xi) = sqrt(i/(lambda B)) exp[-i pi/(lambda B) (D x^2 + A xi^2 - 2 x xi)],

under which free propagation over B multiplies the angular spectrum by
exp(i kx^2 B / (2k)) and a thin element [1 0; c 1] multiplies the field by
exp(-i k c x^2 / 2).
"""
import warnings
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from .errors import AliasingWarning, UnstableCavityError
from .oscillator import OscillatorParams

__all__ = [
    "ABCDMatrix",
    "GainProfile",
    "Excitation",
    "Grid",
    "CavityConfig",
    "TransverseField",
    "round_trip_matrix_fig1b",
    "stability_angle",
    "gain_at",
    "linearize",
    "collins_propagate",
    "cold_cavity_q",
    "gaussian_beam",
    "round_trip_operator",
    "round_trip",
    "excitation_envelope",
    "injection_profile",
    "evolve",
    "derive_oscillator_params",
    "write_snapshot",
]


@dataclass(frozen=True)
class ABCDMatrix:
    A: float
    B: float
    C: float
    D: float

    def __post_init__(self):
        det = self.A * self.D - self.B * self.C
        scale = max(1.0, abs(self.A * self.D), abs(self.B * self.C))
        if abs(det - 1.0) > 1e-9 * scale:
            raise ValueError(f"ABCD matrix is not unimodular (AD - BC = {det!r})")

    @classmethod
    def free_space(cls, d):
        return cls(1.0, float(d), 0.0, 1.0)

    @classmethod
    def thin_lens(cls, f):
        return cls(1.0, 0.0, -1.0 / f, 1.0)

    @property
    def det(self):
        return self.A * self.D - self.B * self.C

    def as_array(self):
        return np.array([[self.A, self.B], [self.C, self.D]])

    def __matmul__(self, other):
        m = self.as_array() @ other.as_array()
        return ABCDMatrix(*(float(v) for v in m.ravel()))


def round_trip_matrix_fig1b(f, L):
    """Round-trip matrix of the two-mirror, focusing-lens resonator.

    A = D = 2L/f - 1, B = 2L(L/f - 1), C = 2/f; the second (Fourier) lens
    does not enter.
    """
    if not (f > 0 and L > 0):
        raise ValueError("f and L must be positive")
    A = 2.0 * L / f - 1.0
    B = 2.0 * L * (L / f - 1.0)
    C = 2.0 / f
    return ABCDMatrix(A, B, C, A)


def stability_angle(M):
    """theta = arccos(A) for a stable round trip (|A| < 1)."""
    if not abs(M.A) < 1.0:
        raise UnstableCavityError(f"round trip is not stable: |A| = {abs(M.A)}")
    return float(np.arccos(M.A))


@dataclass(frozen=True)
class GainProfile:
    """Round-trip gain g(x) = g_p exp[-2 (x - s)^2 / w_p^2] of an off-axis pump."""

    g_p: float
    w_p: float
    s: float = 0.0

    def __post_init__(self):
        if not self.w_p > 0:
            raise ValueError(f"w_p must be positive, got {self.w_p}")
        if not self.g_p >= 0:
            raise ValueError(f"g_p must be non-negative, got {self.g_p}")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.g_p * np.exp(-2.0 * (x - self.s) ** 2 / self.w_p ** 2)

    def linearize(self):
        """(g0, alpha): value and slope of g at x = 0."""
        g0 = float(self(0.0))
        alpha = g0 * 4.0 * self.s / self.w_p ** 2
        return g0, alpha


def gain_at(profile, x):
    return profile(x)


def linearize(profile):
    return profile.linearize()


@dataclass(frozen=True)
class Excitation:
    """Injected pulse A(t) F(x) with A(t) = a exp[-(t - t_p)^2/tau_p^2], F = exp[-(x - x0)^2/w_e^2]."""

    w_e: float = 40.0
    t_p: float = 5.0
    tau_p: float = 1.0
    amplitude: float = 1.0
    x0: float = 0.0

    @property
    def sigma(self):
        """Width parameter of F in the exp(-sigma x^2) convention."""
        return 1.0 / self.w_e ** 2


@dataclass(frozen=True)
class Grid:
    n: int = 4096
    width: float = 2048.0

    def __post_init__(self):
        if self.n < 2 or self.n & (self.n - 1):
            raise ValueError(f"grid size must be a power of two, got {self.n}")
        if not self.width > 0:
            raise ValueError("grid width must be positive")

    @property
    def dx(self):
        return self.width / self.n

    @property
    def x(self):
        return (np.arange(self.n) - self.n // 2) * self.dx


@dataclass(frozen=True)
class CavityConfig:
    """Resonator, pump, injection and grid settings (lengths in wavelengths).

    The defaults are the reference experiment run by the ``fig2`` scenario.
    ``f1`` is kept for completeness; it does not affect the dynamics.
    """

    f: float = 1.0e5
    L: float = 0.95e5
    f1: float = 1.0e5
    loss: float = 0.18
    transmittance: float = 0.01
    gain: GainProfile = field(default_factory=lambda: GainProfile(0.2, 483.0, 241.5))
    detuning: float = 0.0
    excitation: Excitation = field(default_factory=Excitation)
    grid: Grid = field(default_factory=Grid)
    linear_gain: bool = False
    edge_tol: float = 1e-6

    def __post_init__(self):
        if not self.L < self.f:
            raise UnstableCavityError(f"resonator needs L < f (L = {self.L}, f = {self.f})")
        if not 0.0 <= self.transmittance <= 1.0:
            raise ValueError("mirror transmittance must lie in [0, 1]")

    def matrix(self):
        return round_trip_matrix_fig1b(self.f, self.L)

    def oscillator_params(self):
        _, alpha = self.gain.linearize()
        return derive_oscillator_params(self.matrix(), alpha)

    def gain_profile(self, x):
        if self.linear_gain:
            g0, alpha = self.gain.linearize()
            return g0 + alpha * np.asarray(x, dtype=float)
        return self.gain(x)

    def with_(self, **changes):
        return replace(self, **changes)


@dataclass
class TransverseField:
    """Complex field samples on a uniform grid at the reference plane."""

    x: np.ndarray
    psi: np.ndarray
    n: int = 0

    @property
    def dx(self):
        return float(self.x[1] - self.x[0])

    def replaced(self, psi, n=None):
        return TransverseField(self.x, psi, self.n if n is None else n)

    @classmethod
    def zeros(cls, grid):
        return cls(grid.x, np.zeros(grid.n, dtype=complex), 0)


def _edge_ratio(psi, band=4):
    mag = np.abs(psi)
    peak = mag.max()
    if peak == 0:
        return 0.0
    return max(mag[:band].max(), mag[-band:].max()) / peak


def _check_edges(psi, tol, stacklevel=3):
    ratio = _edge_ratio(psi)
    if ratio > tol:
        warnings.warn(
            f"field at window edge is {ratio:.2e} of peak (limit {tol:.1e}); "
            "widen the window",
            AliasingWarning,
            stacklevel=stacklevel,
        )
    return ratio


@lru_cache(maxsize=64)
def _collins_plan(n, dx, A, B, D, wavelength):
    k = 2.0 * np.pi / wavelength
    x = (np.arange(n) - n // 2) * dx
    kx = 2.0 * np.pi * np.fft.fftfreq(n, dx)
    pre = np.exp(-0.5j * k * (A - 1.0) / B * x * x)
    transfer = np.exp(0.5j * kx * kx * B / k)
    post = np.exp(-0.5j * k * (D - 1.0) / B * x * x)
    return pre, transfer, post


def _plan_for(x, M, wavelength):
    x = np.asarray(x)
    n = x.shape[0]
    dx = float(x[1] - x[0])
    # masks are built on the centered grid; a shifted grid just needs x itself
    if abs(x[n // 2]) > 1e-9 * dx:
        k = 2.0 * np.pi / wavelength
        kx = 2.0 * np.pi * np.fft.fftfreq(n, dx)
        return (
            np.exp(-0.5j * k * (M.A - 1.0) / M.B * x * x),
            np.exp(0.5j * kx * kx * M.B / k),
            np.exp(-0.5j * k * (M.D - 1.0) / M.B * x * x),
        )
    return _collins_plan(n, dx, float(M.A), float(M.B), float(M.D), float(wavelength))


def _apply_collins(psi, plan, adjoint=False):
    pre, transfer, post = plan
    if adjoint:
        return np.conj(pre) * np.fft.ifft(np.conj(transfer) * np.fft.fft(np.conj(post) * psi))
    return post * np.fft.ifft(transfer * np.fft.fft(pre * psi))


def collins_propagate(field, M, wavelength=1.0, adjoint=False, edge_tol=1e-6):
    """Propagate ``field`` through the ABCD system ``M`` on the same grid.

    Uses M = [1 0; (D-1)/B 1] [1 B; 0 1] [1 0; (A-1)/B 1]: a chirp mask, a
    spectral free-space step over B and a second chirp mask.  With
    ``adjoint=True`` the Hermitian adjoint of the discrete operator is
    applied instead.

    Warns :class:`AliasingWarning` when the output touches the window edge.
    """
    if M.B == 0:
        raise ValueError("B = 0 (imaging condition) is not supported by the Collins propagator")
    out = _apply_collins(field.psi, _plan_for(field.x, M, wavelength), adjoint)
    _check_edges(out, edge_tol)
    return field.replaced(out)


def cold_cavity_q(M):
    """Self-consistent complex beam parameter, q = (A q + B)/(C q + D), Im q > 0."""
    roots = np.roots([M.C, M.D - M.A, -M.B]) if M.C != 0 else np.array([])
    roots = [complex(r) for r in roots if complex(r).imag > 0]
    if not roots:
        raise UnstableCavityError("no confined self-consistent Gaussian beam")
    return roots[0]


def gaussian_beam(x, q, wavelength=1.0):
    """exp(-i k x^2 / (2 q)), the beam whose parameter obeys q' = (Aq + B)/(Cq + D)."""
    k = 2.0 * np.pi / wavelength
    return np.exp(-0.5j * k * np.asarray(x, dtype=float) ** 2 / q)


class _RoundTripPlan:
    def __init__(self, config):
        x = config.grid.x
        self.x = x
        self.loss = np.exp(-config.loss)
        self.half_gain = np.exp(0.5 * config.gain_profile(x))
        self.collins = _plan_for(x, config.matrix(), 1.0)
        self.profile = injection_profile(x, config.excitation)
        self.sqrt_t = np.sqrt(config.transmittance)
        self.detuning = config.detuning

    def apply(self, psi, adjoint=False):
        g = self.half_gain
        return self.loss * g * _apply_collins(g * psi, self.collins, adjoint)


@lru_cache(maxsize=16)
def _round_trip_plan(config):
    return _RoundTripPlan(config)


def round_trip_operator(config, adjoint=False):
    """The passive map psi -> exp(-l) exp(g/2) K exp(g/2) psi as a callable on arrays."""
    plan = _round_trip_plan(config)
    return lambda psi: plan.apply(psi, adjoint)


def injection_profile(x, excitation):
    x = np.asarray(x, dtype=float)
    return np.exp(-((x - excitation.x0) ** 2) / excitation.w_e ** 2)


def excitation_envelope(n, config):
    """Pulse envelope A_n = A(n T_R), times in round trips.

    ``tau_p = 0`` gives a single-round-trip (impulsive) injection at n = t_p.
    """
    exc = config.excitation
    if exc.tau_p == 0:
        return exc.amplitude if n == exc.t_p else 0.0
    return exc.amplitude * float(np.exp(-((n - exc.t_p) ** 2) / exc.tau_p ** 2))


def round_trip(field, config, injected_amplitude=0.0):
    """One application of the round-trip map, returning the field at n + 1.

    psi_{n+1} = e^{-l} e^{g/2} K e^{g/2} psi_n + sqrt(T) A_n F(x) e^{i n Delta}
    """
    plan = _round_trip_plan(config)
    out = plan.apply(field.psi)
    if injected_amplitude != 0:
        phase = np.exp(1j * field.n * plan.detuning)
        out = out + plan.sqrt_t * injected_amplitude * phase * plan.profile
    _check_edges(out, config.edge_tol)
    return field.replaced(out, field.n + 1)


def evolve(config, n_round_trips, field=None):
    """Yield psi_1 ... psi_N starting from an empty cavity (or ``field``)."""
    if field is None:
        field = TransverseField.zeros(config.grid)
    for _ in range(n_round_trips):
        field = round_trip(field, config, excitation_envelope(field.n, config))
        yield field


def derive_oscillator_params(M, alpha, wavelength=1.0):
    """Oscillator emulated by the cavity round trip.

    Omega = theta = arccos(A), m = -sin(theta)/(theta B),
    delta = -alpha (1 + A)/(2 k C), hbar = 1/k.  The constant real energy
    shift that also appears in the mapping is dropped.
    """
    theta = stability_angle(M)
    if M.C == 0:
        raise UnstableCavityError("C = 0: no focusing, no confinement")
    k = 2.0 * np.pi / wavelength
    mass = -np.sin(theta) / (theta * M.B)
    delta = -alpha * (1.0 + M.A) / (2.0 * k * M.C)
    return OscillatorParams(mass=float(mass), omega=theta, delta=float(delta), hbar=1.0 / k)


def write_snapshot(field, path):
    """CSV snapshot with columns x, re, im, abs2 at 17 significant digits."""
    psi = field.psi
    data = np.column_stack([field.x, psi.real, psi.imag, np.abs(psi) ** 2])
    np.savetxt(path, data, delimiter=",", header="x,re,im,abs2", comments="", fmt="%.17g")
