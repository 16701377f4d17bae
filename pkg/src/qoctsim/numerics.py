"""Quadrature and Fourier helpers on uniform frequency grids.

All integrals over the baseband offset grid use the trapezoidal rule. A
Fourier sum ``F(tau) = sum_k w_k f_k exp(-i Omega_k tau)`` is evaluated either
directly (arbitrary delays) or with a chirp-z transform when the delays form
a uniform grid. Both paths sum over the frequency index in ascending order,
so results are deterministic for a given input.
"""

from __future__ import annotations

import numpy as np
from scipy.fft import irfft, next_fast_len, rfft
from scipy.signal import czt

from .errors import ConfigError

# Direct sums materialize a (delays x frequencies) block; cap its size.
_DIRECT_BLOCK = 1 << 22


def trapezoid_weights(n: int, step: float) -> np.ndarray:
    w = np.full(n, float(step))
    if n > 1:
        w[0] *= 0.5
        w[-1] *= 0.5
    return w


def uniform_step(x: np.ndarray, rtol: float = 1e-9) -> float | None:
    """Return the spacing of ``x`` if it is strictly increasing and uniform, else None."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < 2:
        return None
    d = np.diff(x)
    step = (x[-1] - x[0]) / (x.size - 1)
    if step <= 0 or np.max(np.abs(d - step)) > rtol * step * max(1.0, x.size):
        return None
    return float(step)


def check_uniform_grid(offsets: np.ndarray) -> float:
    """Validate a symmetric uniform offset grid and return its spacing."""
    offsets = np.asarray(offsets, dtype=float)
    step = uniform_step(offsets)
    if step is None:
        raise ConfigError("frequency grid must be strictly increasing and uniform")
    if abs(offsets[0] + offsets[-1]) > 1e-9 * step:
        raise ConfigError("frequency grid must be symmetric about zero")
    return step


def integrate(offsets: np.ndarray, samples: np.ndarray) -> complex | float:
    step = check_uniform_grid(offsets)
    return np.sum(trapezoid_weights(len(offsets), step) * samples)


def fourier_direct(offsets: np.ndarray, samples: np.ndarray, tau) -> np.ndarray:
    """Trapezoidal ``sum_k w_k f_k exp(-i Omega_k tau)`` for arbitrary delays."""
    offsets = np.asarray(offsets, dtype=float)
    step = check_uniform_grid(offsets)
    weighted = trapezoid_weights(len(offsets), step) * np.asarray(samples)
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    out = np.empty(tau.shape, dtype=complex)
    chunk = max(1, _DIRECT_BLOCK // len(offsets))
    for i in range(0, tau.size, chunk):
        t = tau[i:i + chunk]
        out[i:i + chunk] = np.exp(-1j * np.outer(t, offsets)) @ weighted
    return out


def fourier_uniform(offsets: np.ndarray, samples: np.ndarray, tau0: float,
                    dtau: float, m: int) -> np.ndarray:
    """Same sum as :func:`fourier_direct` on ``tau0 + j*dtau``, j < m, via chirp-z."""
    offsets = np.asarray(offsets, dtype=float)
    step = check_uniform_grid(offsets)
    weighted = trapezoid_weights(len(offsets), step) * np.asarray(samples, dtype=complex)
    om0 = offsets[0]
    # sum_n x_n exp(-i (om0 + n*step)(tau0 + j*dtau))
    a = np.exp(1j * step * tau0)
    w = np.exp(-1j * step * dtau)
    out = czt(weighted, m=m, w=w, a=a)
    return out * np.exp(-1j * om0 * (tau0 + dtau * np.arange(m)))


def fourier(offsets: np.ndarray, samples: np.ndarray, tau) -> np.ndarray:
    """Dispatch to the chirp-z path for uniform delay grids, else sum directly."""
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    dtau = uniform_step(tau)
    if dtau is None or tau.size < 16:
        return fourier_direct(offsets, samples, tau)
    return fourier_uniform(offsets, samples, tau[0], dtau, tau.size)


def fractional_shift(y: np.ndarray, shift: float, baseline: float | None = None) -> np.ndarray:
    """Delay a uniformly sampled real trace by ``shift`` samples.

    Returns ``y(x - shift)`` using band-limited (Fourier) interpolation. The
    trace is referenced to ``baseline`` (mean of the end points by default)
    and zero padded to at least twice its length so nothing wraps around.
    """
    y = np.asarray(y, dtype=float)
    n = y.size
    if abs(shift) >= n - 1:
        raise ConfigError(f"shift of {shift:.3f} samples exceeds the {n}-sample window")
    if shift == 0:
        return y.copy()
    if baseline is None:
        baseline = 0.5 * (y[0] + y[-1])
    m = next_fast_len(2 * n + int(np.ceil(abs(shift))), real=True)
    spec = rfft(y - baseline, m)
    k = np.arange(spec.size)
    spec *= np.exp(-2j * np.pi * k * shift / m)
    if m % 2 == 0:
        # Nyquist bin of a real signal must stay real.
        spec[-1] = spec[-1].real * np.cos(np.pi * shift)
    # Content pushed before x[0] lands in the padded tail and is dropped.
    return irfft(spec, m)[:n] + baseline
