"""Generalized canonical equations for mean position, momentum and covariance.

    dq/dt   = p/m - m W^2 delta Sqq
    dp/dt   = -m W^2 q - m W^2 delta Spq
    dSqq/dt = 2 Spq / m
    dSpp/dt = -2 m W^2 Spq
    dSpq/dt = Spp/m - m W^2 Sqq

Covariances are stored in units of hbar/2 (S = (2/hbar) * physical
covariance).  In these units a pure Gaussian has Sqq Spp - Spq^2 = 1 and the
integrated centroid reproduces the closed-form trajectory exactly.
"""
from dataclasses import astuple, dataclass

import numpy as np

from .errors import NumericalError
from .kernels import rk4_canonical

__all__ = [
    "CovarianceState",
    "Trajectory",
    "canonical_rhs",
    "init_from_packet",
    "integrate",
]


@dataclass(frozen=True)
class CovarianceState:
    q: float
    p: float
    sqq: float
    spp: float
    spq: float

    def as_array(self):
        return np.array(astuple(self), dtype=float)

    @classmethod
    def from_array(cls, y):
        return cls(*(float(v) for v in y))

    @property
    def purity(self):
        """Sqq Spp - Spq^2; equals 1 for a pure Gaussian."""
        return self.sqq * self.spp - self.spq * self.spq


def canonical_rhs(state, params):
    """Time derivative of ``state``, returned as a CovarianceState."""
    m = params.mass
    w2m = m * params.omega ** 2
    d = params.delta
    return CovarianceState(
        q=state.p / m - w2m * d * state.sqq,
        p=-w2m * state.q - w2m * d * state.spq,
        sqq=2.0 * state.spq / m,
        spp=-2.0 * w2m * state.spq,
        spq=state.spp / m - w2m * state.sqq,
    )


def init_from_packet(sigma, q0, p0, params):
    """State of the packet exp[-sigma (x - q0)^2 + i p0 x / hbar].

    Physical variances are 1/(4 sigma) and hbar^2 sigma; stored values are
    scaled by 2/hbar.
    """
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    hbar = params.hbar
    return CovarianceState(
        q=float(q0), p=float(p0), sqq=1.0 / (2.0 * sigma * hbar), spp=2.0 * sigma * hbar, spq=0.0
    )


@dataclass
class Trajectory:
    """Samples of the canonical flow; ``states`` has columns q, p, Sqq, Spp, Spq."""

    t: np.ndarray
    states: np.ndarray

    @property
    def q(self):
        return self.states[:, 0]

    @property
    def p(self):
        return self.states[:, 1]

    @property
    def sqq(self):
        return self.states[:, 2]

    @property
    def spp(self):
        return self.states[:, 3]

    @property
    def spq(self):
        return self.states[:, 4]

    @property
    def purity(self):
        return self.sqq * self.spp - self.spq ** 2

    def final(self):
        return CovarianceState.from_array(self.states[-1])

    def __len__(self):
        return len(self.t)


def integrate(state0, t_end, dt, params, every=1, purity_tol=1e-6):
    """Fixed-step RK4 integration from t = 0 to ``t_end``.

    Samples are taken every ``every`` steps.  If ``t_end`` is not a multiple
    of ``dt`` a final shorter step lands exactly on ``t_end`` and is appended.

    Raises
    ------
    NumericalError
        If the relative drift of Sqq Spp - Spq^2 exceeds ``purity_tol``.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if t_end < 0:
        raise ValueError(f"t_end must be non-negative, got {t_end}")
    every = int(every)
    if every < 1:
        raise ValueError("every must be >= 1")

    n_steps = int(np.floor(t_end / dt + 1e-9))
    n_steps -= n_steps % every
    y0 = state0.as_array()
    args = (params.mass, params.omega, params.delta)
    states = rk4_canonical(y0, n_steps, dt, *args, every)
    t = np.arange(states.shape[0]) * (dt * every)

    rest = t_end - n_steps * dt
    if rest > 1e-12 * max(1.0, t_end):
        # finish with plain RK4 steps of size dt, then one partial step
        y = states[-1]
        k_full = int(np.floor(rest / dt + 1e-9))
        if k_full:
            y = rk4_canonical(y, k_full, dt, *args, k_full)[-1]
        tail = rest - k_full * dt
        if tail > 1e-12 * max(1.0, t_end):
            y = rk4_canonical(y, 1, tail, *args, 1)[-1]
        states = np.vstack([states, y])
        t = np.append(t, t_end)

    traj = Trajectory(t=t, states=states)
    p0 = state0.purity
    drift = np.max(np.abs(traj.purity - p0)) / abs(p0)
    if not np.isfinite(drift) or drift > purity_tol:
        raise NumericalError(f"covariance purity drifted by {drift:.3e} (tolerance {purity_tol:.1e})")
    return traj
