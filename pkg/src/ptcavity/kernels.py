"""Hot numeric kernels, each with a numba and a pure-numpy implementation.

The active implementation is picked once at import time (see ``_jit``);
both are always importable so they can be benchmarked against each other.

Kernels
-------
rk4_canonical
    Fixed-step classical RK4 for the five-component canonical system
    (q, p, Sqq, Spp, Spq).
exp_bilinear_sum
    out[j] = sum_k exp(alpha[j] + logw[k] + kappa * z[j] * zeta[k]) for
    complex inputs; the O(N*M) core of every direct kernel quadrature
    (Mehler, Collins).  Working with a single exponent avoids overflow when
    the factors are individually huge but their product is not.
"""
import numpy as np

from ._jit import HAS_NUMBA, USE_NUMBA, njit

__all__ = [
    "rk4_canonical",
    "exp_bilinear_sum",
    "backend",
    "backends",
]


# --------------------------------------------------------------------------
# RK4 for the canonical equations
# --------------------------------------------------------------------------

def _canonical_rhs_scalar(y, m, w2m, delta, out):
    # y = (q, p, Sqq, Spp, Spq); w2m = m * Omega**2
    out[0] = y[1] / m - w2m * delta * y[2]
    out[1] = -w2m * y[0] - w2m * delta * y[4]
    out[2] = 2.0 * y[4] / m
    out[3] = -2.0 * w2m * y[4]
    out[4] = y[3] / m - w2m * y[2]


def _rk4_canonical_loop(y0, n_steps, dt, m, omega, delta, every):
    w2m = m * omega * omega
    n_out = n_steps // every + 1
    out = np.empty((n_out, 5))
    y = y0.copy()
    k1 = np.empty(5)
    k2 = np.empty(5)
    k3 = np.empty(5)
    k4 = np.empty(5)
    tmp = np.empty(5)
    out[0, :] = y
    row = 1
    for step in range(1, n_steps + 1):
        _rhs(y, m, w2m, delta, k1)
        for i in range(5):
            tmp[i] = y[i] + 0.5 * dt * k1[i]
        _rhs(tmp, m, w2m, delta, k2)
        for i in range(5):
            tmp[i] = y[i] + 0.5 * dt * k2[i]
        _rhs(tmp, m, w2m, delta, k3)
        for i in range(5):
            tmp[i] = y[i] + dt * k3[i]
        _rhs(tmp, m, w2m, delta, k4)
        for i in range(5):
            y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
        if step % every == 0:
            out[row, :] = y
            row += 1
    return out


def rk4_canonical_numpy(y0, n_steps, dt, m, omega, delta, every=1):
    """RK4 written as its one-step propagation matrix.

    The canonical system is linear and autonomous, y' = J y, so one RK4 step
    is exactly y <- P y with P = I + hJ + (hJ)^2/2 + (hJ)^3/6 + (hJ)^4/24.
    """
    w2m = m * omega * omega
    jac = np.array(
        [
            [0.0, 1.0 / m, -w2m * delta, 0.0, 0.0],
            [-w2m, 0.0, 0.0, 0.0, -w2m * delta],
            [0.0, 0.0, 0.0, 0.0, 2.0 / m],
            [0.0, 0.0, 0.0, 0.0, -2.0 * w2m],
            [0.0, 0.0, -w2m, 1.0 / m, 0.0],
        ]
    )
    hj = dt * jac
    hj2 = hj @ hj
    hj3 = hj2 @ hj
    prop = np.eye(5) + hj + hj2 / 2.0 + hj3 / 6.0 + (hj3 @ hj) / 24.0
    out = np.empty((n_steps // every + 1, 5))
    y = np.array(y0, dtype=float)
    out[0] = y
    row = 1
    for step in range(1, n_steps + 1):
        y = prop @ y
        if step % every == 0:
            out[row] = y
            row += 1
    return out


# --------------------------------------------------------------------------
# Bilinear exponential sums
# --------------------------------------------------------------------------

def _exp_bilinear_sum_loop(alpha, z, logw, zeta, kappa):
    n = z.shape[0]
    out = np.empty(n, dtype=np.complex128)
    for j in range(n):
        a = kappa * z[j]
        acc = 0.0 + 0.0j
        for k in range(zeta.shape[0]):
            acc += np.exp(alpha[j] + logw[k] + a * zeta[k])
        out[j] = acc
    return out


def exp_bilinear_sum_numpy(alpha, z, logw, zeta, kappa, chunk=128):
    alpha = np.asarray(alpha, dtype=np.complex128)
    z = np.asarray(z, dtype=np.complex128)
    logw = np.asarray(logw, dtype=np.complex128)
    zeta = np.asarray(zeta, dtype=np.complex128)
    out = np.empty(z.shape[0], dtype=np.complex128)
    for start in range(0, z.shape[0], chunk):
        sl = slice(start, start + chunk)
        expo = alpha[sl, None] + logw[None, :] + kappa * np.outer(z[sl], zeta)
        out[sl] = np.exp(expo).sum(axis=1)
    return out


if HAS_NUMBA:
    _rhs = njit(_canonical_rhs_scalar)
    rk4_canonical_jit = njit(_rk4_canonical_loop)
    _exp_bilinear_sum_jit = njit(_exp_bilinear_sum_loop)

    def exp_bilinear_sum_jit(alpha, z, logw, zeta, kappa):
        return _exp_bilinear_sum_jit(
            np.ascontiguousarray(alpha, dtype=np.complex128),
            np.ascontiguousarray(z, dtype=np.complex128),
            np.ascontiguousarray(logw, dtype=np.complex128),
            np.ascontiguousarray(zeta, dtype=np.complex128),
            complex(kappa),
        )
else:  # pragma: no cover
    _rhs = _canonical_rhs_scalar
    rk4_canonical_jit = None
    exp_bilinear_sum_jit = None


def _rk4_jit_wrapper(y0, n_steps, dt, m, omega, delta, every=1):
    return rk4_canonical_jit(
        np.array(y0, dtype=float), int(n_steps), float(dt), float(m),
        float(omega), float(delta), int(every),
    )


_BACKENDS = {"numpy": (rk4_canonical_numpy, exp_bilinear_sum_numpy)}
if HAS_NUMBA:
    _BACKENDS["numba"] = (_rk4_jit_wrapper, exp_bilinear_sum_jit)


def backends():
    """Mapping ``name -> (rk4_canonical, exp_bilinear_sum)`` of available backends."""
    return dict(_BACKENDS)


def backend():
    """Name of the backend selected at import time."""
    return "numba" if USE_NUMBA else "numpy"


rk4_canonical, exp_bilinear_sum = _BACKENDS[backend()]
