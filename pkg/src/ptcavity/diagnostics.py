"""Observables of the cavity field and the non-Hermitian signatures.

Centroid, power, sinusoid fits of the centroid trajectory, the dominant
round-trip eigenpair, emission tilt, free-drift measurement and the
Petermann excess-noise factor.
"""
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .cavity import (
    ABCDMatrix,
    TransverseField,
    cold_cavity_q,
    collins_propagate,
    gaussian_beam,
    round_trip_operator,
)
from .errors import ConvergenceError, NumericalError

__all__ = [
    "ObservableSeries",
    "DriftMeasurement",
    "power",
    "center_of_mass",
    "momentum_expectation",
    "observe",
    "fit_decay_rate",
    "trajectory_fourier",
    "estimate_frequency",
    "round_trip_eigenpair",
    "threshold_pump",
    "mode_overlap",
    "tilt_angle",
    "tilt_ratio",
    "divergence_angle",
    "free_drift_check",
    "petermann",
    "petermann_numeric",
]


@dataclass
class ObservableSeries:
    """Per-round-trip observables; ``q`` is NaN where the power is below the floor."""

    n: np.ndarray
    P: np.ndarray
    q: np.ndarray
    p: np.ndarray = None

    def __post_init__(self):
        self.n = np.asarray(self.n, dtype=int)
        self.P = np.asarray(self.P, dtype=float)
        self.q = np.asarray(self.q, dtype=float)
        if self.p is not None:
            self.p = np.asarray(self.p, dtype=float)
        if np.any(np.diff(self.n) != 1):
            raise ValueError("series must be sampled at consecutive round trips")

    @property
    def defined(self):
        return np.isfinite(self.q)

    def window(self, start, stop=None):
        """Boolean mask of samples with start <= n < stop."""
        mask = self.n >= start
        if stop is not None:
            mask &= self.n < stop
        return mask

    def __len__(self):
        return len(self.n)


def power(field):
    """P = sum |psi|^2 dx."""
    return float(np.sum(np.abs(field.psi) ** 2) * field.dx)


def center_of_mass(field, floor=0.0):
    """<x> weighted by |psi|^2, or NaN when the power does not exceed ``floor``."""
    w = np.abs(field.psi) ** 2
    p = float(np.sum(w) * field.dx)
    if not p > floor:
        return float("nan")
    return float(np.sum(field.x * w) * field.dx / p)


def momentum_expectation(field, hbar):
    """<-i hbar d/dx> evaluated spectrally."""
    spec = np.abs(np.fft.fft(field.psi)) ** 2
    total = spec.sum()
    if total == 0:
        return float("nan")
    kx = 2.0 * np.pi * np.fft.fftfreq(len(field.psi), field.dx)
    return float(hbar * np.sum(kx * spec) / total)


def observe(fields, floor=1e-12, hbar=None):
    """Collect an ObservableSeries from an iterable of fields."""
    n, P, q, p = [], [], [], []
    for f in fields:
        n.append(f.n)
        pw = power(f)
        P.append(pw)
        q.append(center_of_mass(f, floor))
        if hbar is not None:
            p.append(momentum_expectation(f, hbar) if pw > floor else float("nan"))
    return ObservableSeries(np.array(n), np.array(P), np.array(q), np.array(p) if hbar else None)


def fit_decay_rate(series, window):
    """Least-squares slope of ln P(n) over ``window = (start, stop)``."""
    mask = series.window(*window)
    P = series.P[mask]
    if P.size < 2:
        raise ValueError("decay-rate window holds fewer than two samples")
    if np.any(P <= 0):
        raise NumericalError("non-positive power inside the decay-rate window")
    slope, _ = np.polyfit(series.n[mask].astype(float), np.log(P), 1)
    return float(slope)


def _harmonic_design(t, omega, harmonics):
    cols = [np.ones_like(t)]
    for h in range(1, harmonics + 1):
        cols += [np.cos(h * omega * t), np.sin(h * omega * t)]
    return np.column_stack(cols)


def _window_samples(series, window, omega, decay_rate):
    mask = series.defined.copy()
    if window is not None:
        mask &= series.window(*window)
    t = series.n[mask].astype(float)
    y = series.q[mask]
    if t.size == 0:
        raise ValueError("no defined samples in the fit window")
    span = t[-1] - t[0] + 1.0
    if span < 3.0 * 2.0 * np.pi / omega:
        raise ValueError(
            f"need at least three periods of data ({3 * 2 * np.pi / omega:.1f} samples), got {span:.0f}"
        )
    if decay_rate:
        y = y * np.exp(-decay_rate * (t - t[0]))
    return t, y


def trajectory_fourier(series, omega, window=None, decay_rate=0.0, harmonics=3):
    """Amplitudes of the Omega and 2 Omega components of q(n).

    Fits q(n) = c0 + sum_h [a_h cos(h Omega n) + b_h sin(h Omega n)] for
    h = 1..``harmonics`` by linear least squares and returns
    (hypot(a_1, b_1), hypot(a_2, b_2)).  Omega is generally incommensurate
    with the record length, so DFT bins would leak.

    ``decay_rate`` (per round trip) is divided out of the samples first.  The
    centroid is normalized by the instantaneous power and therefore does not
    decay with it; its compensating rate is 0.
    """
    if harmonics < 2:
        raise ValueError("need at least two harmonics")
    t, y = _window_samples(series, window, omega, decay_rate)
    coef, *_ = np.linalg.lstsq(_harmonic_design(t, omega, harmonics), y, rcond=None)
    return float(np.hypot(coef[1], coef[2])), float(np.hypot(coef[3], coef[4]))


def estimate_frequency(series, omega_guess, window=None, harmonics=3, rel_range=0.2):
    """Fundamental angular frequency of q(n), by minimizing the harmonic-fit residual."""
    t, y = _window_samples(series, window, omega_guess * (1 - rel_range), 0.0)

    def resid(w):
        X = _harmonic_design(t, w, harmonics)
        coef, *_ = np.linalg.lstsq(X, y, rcond=None)
        return float(np.sum((X @ coef - y) ** 2))

    lo, hi = omega_guess * (1 - rel_range), omega_guess * (1 + rel_range)
    grid = np.linspace(lo, hi, 401)
    best = grid[np.argmin([resid(w) for w in grid])]
    step = grid[1] - grid[0]
    res = minimize_scalar(resid, bounds=(best - step, best + step), method="bounded",
                          options={"xatol": 1e-10})
    return float(res.x)


def mode_overlap(a, b):
    """|<a, b>| / (|a| |b|) for sampled fields (arrays or TransverseField)."""
    a = getattr(a, "psi", a)
    b = getattr(b, "psi", b)
    return float(abs(np.vdot(a, b)) / (np.linalg.norm(a) * np.linalg.norm(b)))


def round_trip_eigenpair(config, max_iter=20000, tol=1e-10, adjoint=False):
    """Dominant eigenpair of the passive round-trip map.

    Power iteration with per-step normalization, started from the cold-cavity
    TEM00 beam.  In the unbroken PT phase all transverse modes share nearly
    the same modulus and differ mainly in phase, so the plain map does not
    separate them; each step therefore applies (L + mu_k) with mu_k the
    current Rayleigh estimate, which keeps the fundamental and damps mode n
    by |cos(n theta / 2)| per step.

    Returns
    -------
    (TransverseField, complex)
        Unit-norm mode (sum |psi|^2 dx = 1) and its eigenvalue.
    """
    op = round_trip_operator(config, adjoint=adjoint)
    x = config.grid.x
    dx = config.grid.dx
    v = gaussian_beam(x, cold_cavity_q(config.matrix()))
    v = v / np.linalg.norm(v)
    mu_prev = None
    for it in range(max_iter):
        w = op(v)
        mu = np.vdot(v, w)
        if mu_prev is not None and abs(mu - mu_prev) < tol:
            break
        mu_prev = mu
        v = w + mu * v
        v = v / np.linalg.norm(v)
    else:
        raise ConvergenceError(f"power iteration did not converge in {max_iter} steps")
    # fix the global phase so the mode is real and positive at its peak
    k = np.argmax(np.abs(v))
    v = v * (abs(v[k]) / v[k]) / np.sqrt(dx)
    return TransverseField(x, v, 0), complex(mu)


def threshold_pump(config, bracket=None, xtol=1e-10):
    """Peak gain g_p at which the dominant eigenvalue has unit modulus.

    Returns ``(g_p_th, g0_th)`` where ``g0_th`` is the on-axis gain there.
    """
    gain = config.gain
    # g0 = g_p * ratio for fixed geometry
    ratio = float(np.exp(-2.0 * gain.s ** 2 / gain.w_p ** 2))

    def f(gp):
        cfg = config.with_(gain=type(gain)(gp, gain.w_p, gain.s))
        return abs(round_trip_eigenpair(cfg)[1]) - 1.0

    if bracket is None:
        guess = config.loss / ratio
        bracket = (0.8 * guess, 1.2 * guess)
    gp = brentq(f, *bracket, xtol=xtol)
    return float(gp), float(gp * ratio)


def tilt_angle(delta, w0, wavelength=1.0):
    """theta_tilt = lambda delta / (pi w0^2)."""
    if not w0 > 0:
        raise ValueError("w0 must be positive")
    return wavelength * delta / (np.pi * w0 ** 2)


def divergence_angle(w0, wavelength=1.0):
    return wavelength / (np.pi * w0)


def tilt_ratio(delta, w0):
    """theta_tilt / theta_d = delta / w0."""
    if not w0 > 0:
        raise ValueError("w0 must be positive")
    return delta / w0


@dataclass(frozen=True)
class DriftMeasurement:
    """Centroid drift of a mode released into free space.

    ``slope`` is d<x>/dz along the optical axis; ``velocity`` is the same
    motion in oscillator time, using dt/dz = -m (free propagation over B
    corresponds to t = -m B).
    """

    slope: float
    velocity: float
    distances: np.ndarray
    centers: np.ndarray


def free_drift_check(mode, params, steps=10, dz=None, wavelength=1.0, pad=4):
    """Propagate ``mode`` through free space and fit its centroid drift.

    The default step is dz = -1/m, i.e. one unit of oscillator time per step.
    The field is zero-padded to ``pad`` times its window first so the
    diffracting beam stays clear of the edges.
    """
    if dz is None:
        dz = -1.0 / params.mass
    M = ABCDMatrix.free_space(dz)
    field = mode if isinstance(mode, TransverseField) else TransverseField(*mode)
    if pad > 1:
        n = len(field.x)
        extra = (pad - 1) * n // 2
        dx = field.dx
        x = field.x[0] + (np.arange(pad * n) - extra) * dx
        psi = np.zeros(pad * n, dtype=complex)
        psi[extra:extra + n] = field.psi
        field = TransverseField(x, psi, field.n)
    z = [0.0]
    q = [center_of_mass(field)]
    for i in range(steps):
        field = collins_propagate(field, M, wavelength)
        z.append((i + 1) * dz)
        q.append(center_of_mass(field))
    z = np.array(z)
    q = np.array(q)
    slope = float(np.polyfit(z, q, 1)[0])
    return DriftMeasurement(slope=slope, velocity=-slope / params.mass, distances=z, centers=q)


def petermann(delta, w0):
    """Closed-form excess-noise factor exp[(2 delta / w0)^2]."""
    if not w0 > 0:
        raise ValueError("w0 must be positive")
    return float(np.exp((2.0 * delta / w0) ** 2))


def petermann_numeric(mode, adjoint_mode, tol=1e-12):
    """K = <psi, psi> <psi+, psi+> / |<psi, psi+>|^2 by quadrature on a shared grid."""
    a = getattr(mode, "psi", mode)
    b = getattr(adjoint_mode, "psi", adjoint_mode)
    if a.shape != b.shape:
        raise ValueError("mode and adjoint mode must share a grid")
    aa = np.vdot(a, a).real
    bb = np.vdot(b, b).real
    ab = abs(np.vdot(a, b))
    if ab < tol * np.sqrt(aa * bb):
        raise NumericalError("mode and adjoint mode are (numerically) orthogonal")
    return float(aa * bb / ab ** 2)
