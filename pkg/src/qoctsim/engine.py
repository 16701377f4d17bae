"""QOCT and OCT interferogram synthesis.

QOCT coincidences follow ``C(tq) = Lambda0 - Re Lambda(2 tq)`` with

    Lambda0     = int |H(w0+W)|^2 S(W) dW
    Lambda(tau) = int H(w0+W) H*(w0-W) S(W) exp(-i W tau) dW

and are reported normalized to ``Lambda0``. The OCT singles rate of a
Michelson interferometer with a unit reference mirror is

    I(tc) = int S(W) [1 + |H(w0+W)|^2 + 2 Re{H(w0+W) exp(-i (w0+W) tc)}] dW

normalized to its constant background ``1 + Lambda0``. The delay sign is
chosen so that a reflector sitting deeper in the sample shows up at a
positive delay in both modalities.

Whole scans use the chirp-z path of :mod:`qoctsim.numerics`; single delays
fall back to direct trapezoidal sums. Every quadrature sums over the
frequency grid in ascending order.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np
from scipy.constants import c

from . import numerics
from .errors import ConfigError, NumericalError
from .sample import OpticalStack, TransferFunction, round_trip_phase, transfer_function
from .spectrum import (DEFAULT_INTERVALS, SpectralDensity, coherence_length, default_grid,
                       evaluate_spectrum, fourier_envelope)

QOCT = "qoct_coincidence"
OCT = "oct_singles"
KINDS = (QOCT, OCT)

MAX_INTERVALS = 1 << 22
CAPTURE_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class Interferogram:
    """A normalized delay scan.

    ``delay`` is the swept temporal delay in seconds; ``position_um`` the
    matching delay-line displacement ``c*delay/2`` in micrometers, which is
    the axis all feature measurements use.
    """

    kind: str
    delay: np.ndarray
    position_um: np.ndarray
    values: np.ndarray
    normalization: str
    norm_value: float
    omega0: float
    source: str = ""
    stack: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown interferogram kind {self.kind!r}")
        for name in ("delay", "position_um", "values"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        n = self.values.size
        if self.delay.size != n or self.position_um.size != n or n == 0:
            raise ConfigError("interferogram axes and values must have the same nonzero length")
        if n > 1 and (np.any(np.diff(self.delay) <= 0) or np.any(np.diff(self.position_um) <= 0)):
            raise ConfigError("interferogram axes must be strictly increasing")

    @classmethod
    def from_positions(cls, kind, position_um, values, **kw) -> "Interferogram":
        position_um = np.asarray(position_um, dtype=float)
        return cls(kind, position_to_delay(position_um), position_um, values, **kw)


def position_to_delay(position_um):
    return 2.0 * np.asarray(position_um, dtype=float) * 1e-6 / c


def delay_to_position(delay):
    return np.asarray(delay, dtype=float) * c / 2.0 * 1e6


def scan_positions(start_um: float, stop_um: float, step_um: float) -> np.ndarray:
    """Delay-line positions (um) of a sweep, endpoints included."""
    if not step_um > 0 or not stop_um >= start_um:
        raise ConfigError("scan needs step > 0 and stop >= start")
    n = int(round((stop_um - start_um) / step_um)) + 1
    return start_um + step_um * np.arange(n)


def scan_delays(start_um: float, stop_um: float, step_um: float) -> np.ndarray:
    """Delays (s) for a delay-line sweep given in micrometers of displacement."""
    return position_to_delay(scan_positions(start_um, stop_um, step_um))


def _content_delays(stack: OpticalStack, omega0: float, offsets: np.ndarray) -> tuple[float, float]:
    """Range of round-trip group delays of the reflecting interfaces over the grid."""
    omega = omega0 + offsets
    lo, hi = math.inf, -math.inf
    for j, layer in enumerate(stack.layers):
        if layer.interface.r == 0:
            continue
        gd = np.gradient(round_trip_phase(stack, j, omega), offsets)
        lo, hi = min(lo, float(gd.min())), max(hi, float(gd.max()))
    return lo, hi


def frequency_grid(S: SpectralDensity, stack: OpticalStack, tau, mode: str,
                   n_intervals: int | None = None, span: float | None = None) -> np.ndarray:
    """Offset grid that captures ``S`` and keeps ``tau`` alias free.

    ``mode`` is ``'qoct'`` (integrand delays are sums of two round trips) or
    ``'oct'``. With ``n_intervals=None`` the default size is doubled until
    the requested delays and the sample's echoes fit in one Fourier period;
    an explicit size that is too small raises instead.
    """
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    n = DEFAULT_INTERVALS if n_intervals is None else int(n_intervals)
    margin = 8.0 * (2.0 * coherence_length(S) / c)
    while True:
        offsets = default_grid(S, n, span)
        captured = numerics.integrate(offsets, evaluate_spectrum(S, offsets))
        if abs(captured - 1.0) > CAPTURE_TOL:
            raise ConfigError(f"frequency grid captures only {captured:.8f} of the spectrum")
        lo, hi = _content_delays(stack, S.center_frequency, offsets)
        if mode == "qoct":
            lo, hi = 2.0 * lo, 2.0 * hi
        need = max(hi, tau.max()) - min(lo, tau.min()) + 2.0 * margin
        period = 2.0 * math.pi / (offsets[1] - offsets[0])
        if need <= period and np.max(np.abs(tau)) <= 0.5 * period:
            return offsets
        if n_intervals is not None or n >= MAX_INTERVALS:
            raise ConfigError(
                f"requested delays span {need:.3g} s, beyond the {period:.3g} s Nyquist window "
                f"of a {n}-interval frequency grid")
        n *= 2


def _check_shared(S: SpectralDensity, H: TransferFunction) -> None:
    if abs(S.center_frequency - H.omega0) > 1e-9 * H.omega0:
        raise ConfigError("spectrum and transfer function use different center frequencies")


def lambda0(S: SpectralDensity, H: TransferFunction) -> float:
    """Constant coincidence background ``int |H|^2 S dW``."""
    _check_shared(S, H)
    power = np.abs(H.values) ** 2
    lam0 = float(numerics.integrate(H.offsets, power * evaluate_spectrum(S, H.offsets)))
    if not lam0 > 1e-14 * float(power.max()):
        raise NumericalError("Lambda0 vanishes (dark sample); cannot normalize")
    return lam0


def lambda_tau(S: SpectralDensity, H: TransferFunction, tau) -> np.ndarray:
    """Delay-varying term ``Lambda(tau)`` (complex)."""
    _check_shared(S, H)
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    if np.max(np.abs(tau)) > math.pi / H.step:
        raise ConfigError("requested delay beyond the Nyquist window of the frequency grid")
    f = H.values * np.conj(H.mirrored()) * evaluate_spectrum(S, H.offsets)
    return numerics.fourier(H.offsets, f, tau)


def qoct_scan(S: SpectralDensity, stack: OpticalStack, tau_q, *, n_intervals: int | None = None,
              span: float | None = None) -> Interferogram:
    """Normalized coincidence trace ``1 - Re Lambda(2 tq) / Lambda0``."""
    tau_q = np.atleast_1d(np.asarray(tau_q, dtype=float))
    offsets = frequency_grid(S, stack, 2.0 * tau_q, "qoct", n_intervals, span)
    H = transfer_function(stack, S.center_frequency, offsets)
    lam0 = lambda0(S, H)
    lam = lambda_tau(S, H, 2.0 * tau_q)
    return Interferogram(QOCT, tau_q, delay_to_position(tau_q), 1.0 - lam.real / lam0,
                         "lambda0", lam0, S.center_frequency, S.label(), stack.name)


def oct_scan(S: SpectralDensity, stack: OpticalStack, tau_c, *, n_intervals: int | None = None,
             span: float | None = None) -> Interferogram:
    """Michelson singles trace normalized to the background ``1 + Lambda0``."""
    tau_c = np.atleast_1d(np.asarray(tau_c, dtype=float))
    omega0 = S.center_frequency
    if tau_c.size > 1 and np.max(np.diff(tau_c)) >= math.pi / (4.0 * omega0):
        raise ConfigError(
            f"OCT delay spacing must stay below pi/(4 omega0) = {math.pi / (4 * omega0):.3g} s "
            "to resolve the carrier fringes")
    offsets = frequency_grid(S, stack, tau_c, "oct", n_intervals, span)
    H = transfer_function(stack, omega0, offsets)
    spec = evaluate_spectrum(S, offsets)
    lam0 = lambda0(S, H)
    g = numerics.fourier(offsets, spec * H.values, tau_c)
    background = 1.0 + lam0
    values = 1.0 + 2.0 * np.real(np.exp(-1j * omega0 * tau_c) * g) / background
    return Interferogram(OCT, tau_c, delay_to_position(tau_c), values,
                         "background", background, omega0, S.label(), stack.name)


def two_surface_oracle(S: SpectralDensity, r1: complex, r2: complex, n: float, L: float, tau):
    """Closed-form ``(Lambda0, Lambda(tau))`` for a two-surface window in air.

    Uses the envelope ``s`` directly (closed form for gaussian/rectangular
    spectra), independent of any transfer-function sampling. ``Lambda0``
    neglects the overlap term, which requires ``n*L`` well beyond the
    coherence length.
    """
    tau = np.asarray(tau, dtype=float)
    r1, r2 = complex(r1), complex(r2)
    tau_d = 2.0 * n * L / c
    phase = S.pump_frequency * n * L / c
    cross = 2.0 * (np.conj(r1) * r2 * np.exp(1j * phase)).real
    lam = (abs(r1) ** 2 * fourier_envelope(S, tau)
           + abs(r2) ** 2 * fourier_envelope(S, tau - 2.0 * tau_d)
           + cross * fourier_envelope(S, tau - tau_d))
    return abs(r1) ** 2 + abs(r2) ** 2, lam


def shifted_reference(values, tau, beta1: float, thickness: float) -> np.ndarray:
    """Predict a buried-sample QOCT trace from the one measured in air.

    ``values`` are sampled on the uniform coincidence-delay grid ``tau``. A
    lossless overburden whose wavenumber has only even orders beyond the
    group delay moves the trace by ``2*beta1*thickness`` and nothing else.
    """
    values = np.asarray(values, dtype=float)
    shift = 2.0 * beta1 * thickness
    if shift == 0 or values.size == 1:
        return values.copy()
    dt = numerics.uniform_step(tau)
    if dt is None:
        raise ConfigError("shifted_reference needs a uniform delay grid")
    return numerics.fractional_shift(values, shift / dt)


def add_counting_noise(g: Interferogram, mean_counts_per_point: float, seed) -> Interferogram:
    """Replace each value by a Poisson count at ``value*mean_counts``, renormalized."""
    if not mean_counts_per_point > 0:
        raise ConfigError("mean counts per point must be positive")
    rng = np.random.default_rng(seed)
    lam = np.clip(g.values, 0.0, None) * mean_counts_per_point
    counts = rng.poisson(lam)
    return dataclasses.replace(g, values=counts / mean_counts_per_point)
