"""Spectral density of the down-converted photon pairs.

A :class:`SpectralDensity` describes ``S(Omega)``, the normalized, symmetric
power spectrum about the degenerate center frequency ``omega0``. The pump
sits at ``2*omega0``. Its Fourier transform

    s(tau) = integral S(Omega) exp(-i Omega tau) dOmega,   s(0) = 1

is the unit-peak envelope that shapes every QOCT dip and OCT fringe packet.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.constants import c
from scipy.optimize import brentq
from scipy.special import sici

from . import numerics
from .errors import ConfigError, NumericalError

SHAPES = ("gaussian", "rectangular", "sinc_squared", "tabulated")

DEFAULT_INTERVALS = 8192
# Default half-span of the frequency grid, in units of the shape's width parameter.
DEFAULT_SPAN = {"gaussian": 8.0, "rectangular": 1.2, "sinc_squared": 8.0}
# sinc^2 spectra are truncated at this many first-zero widths (a double zero).
SINC_LOBES = 8

FWHM_PER_SIGMA = 2.0 * math.sqrt(2.0 * math.log(2.0))
# sin(x)/x = 1/2
_SINC_HALF = brentq(lambda x: math.sin(x) / x - 0.5, 1.0, 2.5, xtol=1e-15)
_SINC_NORM = (2.0 / math.pi) * sici(2.0 * math.pi * SINC_LOBES)[0]

ASYMMETRY_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class SpectralDensity:
    """Normalized, symmetric source spectrum about ``omega0``.

    ``width`` is shape specific: the standard deviation (gaussian), the full
    width (rectangular) or the first-zero half-width (sinc_squared), all in
    rad/s. Tabulated spectra keep their symmetrized, renormalized samples in
    ``table_omega``/``table_density`` instead.
    """

    center_wavelength: float
    shape: str
    width: float | None = None
    table_omega: np.ndarray | None = field(default=None, repr=False)
    table_density: np.ndarray | None = field(default=None, repr=False)
    notes: tuple[str, ...] = ()

    @property
    def center_frequency(self) -> float:
        return 2.0 * math.pi * c / self.center_wavelength

    @property
    def pump_frequency(self) -> float:
        return 2.0 * self.center_frequency

    @property
    def extent(self) -> float:
        """Largest |Omega| where S is nonzero (inf for the gaussian)."""
        if self.shape == "gaussian":
            return math.inf
        if self.shape == "rectangular":
            return 0.5 * self.width
        if self.shape == "sinc_squared":
            return SINC_LOBES * self.width
        return float(self.table_omega[-1])

    def __call__(self, omega):
        return evaluate_spectrum(self, omega)

    def label(self) -> str:
        lam = f"{self.center_wavelength * 1e9:.6g} nm"
        if self.shape == "tabulated":
            return f"tabulated({len(self.table_omega)} pts) @ {lam}"
        return f"{self.shape}(width={self.width:.6g} rad/s) @ {lam}"


def make_spectrum(shape: str, center_wavelength: float, *, width: float | None = None,
                  coherence_length: float | None = None, table=None) -> SpectralDensity:
    """Build a normalized spectrum.

    Parameters
    ----------
    shape : str
        One of ``gaussian``, ``rectangular``, ``sinc_squared``, ``tabulated``.
    center_wavelength : float
        Degenerate center wavelength in meters.
    width : float, optional
        Shape parameter in rad/s (see :class:`SpectralDensity`).
    coherence_length : float, optional
        Alternative to ``width``: FWHM of ``|s(tau)|`` on the ``c*tau/2``
        axis, in meters.
    table : pair of array_like, optional
        ``(omega_offsets, density)`` for tabulated spectra. Offsets must be
        strictly increasing; density is renormalized and symmetrized.
    """
    if shape not in SHAPES:
        raise ConfigError(f"unknown spectral shape {shape!r}; expected one of {SHAPES}")
    if not (100e-9 < center_wavelength < 10e-6):
        raise ConfigError(f"center wavelength {center_wavelength!r} m outside (100 nm, 10 um)")
    omega0 = 2.0 * math.pi * c / center_wavelength

    if shape == "tabulated":
        if table is None:
            raise ConfigError("tabulated spectrum needs a table")
        if width is not None or coherence_length is not None:
            raise ConfigError("tabulated spectrum takes no width or coherence length")
        omega, density, notes = _prepare_table(*table)
        rms = math.sqrt(np.trapezoid(omega**2 * density, omega))
        _check_narrowband(rms, omega0)
        if omega[-1] >= omega0:
            raise ConfigError("tabulated spectrum reaches zero absolute frequency")
        return SpectralDensity(center_wavelength, shape, None, omega, density, notes)

    if (width is None) == (coherence_length is None):
        raise ConfigError("give exactly one of width or coherence_length")
    if coherence_length is not None:
        if not coherence_length > 0:
            raise ConfigError("coherence length must be positive")
        width = _width_from_coherence_length(shape, coherence_length)
    if not (width is not None and width > 0 and math.isfinite(width)):
        raise ConfigError(f"spectral width must be positive, got {width!r}")
    width = float(width)
    half = {"gaussian": width, "rectangular": 0.5 * width, "sinc_squared": width}[shape]
    _check_narrowband(half, omega0)
    return SpectralDensity(center_wavelength, shape, width)


def _check_narrowband(width: float, omega0: float) -> None:
    if width >= omega0 / 4.0:
        raise ConfigError(
            f"spectral width {width:.3g} rad/s is not small against omega0/4 = {omega0 / 4:.3g} rad/s")


def _width_from_coherence_length(shape: str, lc: float) -> float:
    if shape == "gaussian":
        return FWHM_PER_SIGMA * c / (2.0 * lc)
    if shape == "rectangular":
        return 2.0 * _SINC_HALF * c / lc
    # Truncated sinc^2 has no closed-form envelope; the family scales as 1/width.
    ref = 1e13
    return ref * coherence_length(SpectralDensity(1e-6, "sinc_squared", ref)) / lc


def _prepare_table(omega, density):
    omega = np.asarray(omega, dtype=float)
    density = np.asarray(density, dtype=float)
    if omega.ndim != 1 or omega.shape != density.shape or omega.size < 3:
        raise ConfigError("tabulated spectrum needs matching 1-D columns of at least 3 rows")
    if not np.all(np.isfinite(omega)) or not np.all(np.isfinite(density)):
        raise ConfigError("tabulated spectrum contains non-finite values")
    if np.any(np.diff(omega) <= 0):
        raise ConfigError("tabulated spectrum offsets must be strictly increasing")
    if np.any(density < 0):
        raise ConfigError("tabulated spectrum has negative density")
    peak = density.max()
    if peak <= 0:
        raise ConfigError("tabulated spectrum is identically zero")

    mirrored = np.interp(-omega, omega, density, left=0.0, right=0.0)
    notes = ()
    asym = float(np.max(np.abs(density - mirrored)) / peak)
    if asym > ASYMMETRY_TOL:
        msg = f"tabulated spectrum asymmetric (max deviation {asym:.3g} of peak); symmetrized"
        warnings.warn(msg, stacklevel=3)
        notes = (msg,)

    # Positive half-axis nodes, merging near-duplicates from +/- mirroring.
    span = float(np.max(np.abs(omega)))
    mags = np.sort(np.abs(omega))
    keep = np.concatenate(([True], np.diff(mags) > 1e-9 * span))
    mags = mags[keep]
    if mags[0] <= 1e-9 * span:
        mags[0] = 0.0
        nodes = np.concatenate((-mags[:0:-1], mags))
    else:
        nodes = np.concatenate((-mags[::-1], mags))
    values = 0.5 * (np.interp(nodes, omega, density, left=0.0, right=0.0)
                    + np.interp(-nodes, omega, density, left=0.0, right=0.0))
    if values[-1] > 0:
        # Close the table with a zero node one spacing out, so the interpolant
        # is the same function inside and outside the tabulated range.
        h = nodes[-1] - nodes[-2]
        nodes = np.concatenate(([nodes[0] - h], nodes, [nodes[-1] + h]))
        values = np.concatenate(([0.0], values, [0.0]))
    # Piecewise-linear interpolant integrates exactly by trapezoid on its nodes.
    total = np.trapezoid(values, nodes)
    return nodes, values / total, notes


def load_spectrum_csv(path, center_wavelength: float) -> SpectralDensity:
    """Load a two-column CSV (offset in rad/s, relative density).

    A single header row is allowed; lines starting with ``#`` are ignored.
    """
    rows = []
    with open(path, newline="") as fh:
        for i, row in enumerate(csv.reader(line for line in fh if not line.lstrip().startswith("#"))):
            if not row or all(not cell.strip() for cell in row):
                continue
            try:
                rows.append((float(row[0]), float(row[1])))
            except (ValueError, IndexError):
                if rows or i > 0:
                    raise ConfigError(f"{path}: malformed row {row!r}") from None
    if not rows:
        raise ConfigError(f"{path}: no spectral samples")
    omega, density = np.array(rows).T
    return make_spectrum("tabulated", center_wavelength, table=(omega, density))


def evaluate_spectrum(S: SpectralDensity, omega):
    """Density ``S(Omega)`` in s/rad at baseband offsets ``omega``."""
    omega = np.asarray(omega, dtype=float)
    if S.shape == "gaussian":
        sig = S.width
        return np.exp(-0.5 * (omega / sig) ** 2) / (sig * math.sqrt(2.0 * math.pi))
    if S.shape == "rectangular":
        a = np.abs(omega)
        half = 0.5 * S.width
        # Mean value at the jump keeps trapezoidal sums exact on aligned grids;
        # the tolerance absorbs rounding in grid construction.
        edge = np.abs(a - half) <= 1e-12 * half
        return np.where(edge, 0.5 / S.width, np.where(a < half, 1.0 / S.width, 0.0))
    if S.shape == "sinc_squared":
        x = omega / S.width
        return np.where(np.abs(x) <= SINC_LOBES, np.sinc(x) ** 2, 0.0) / (S.width * _SINC_NORM)
    return np.interp(omega, S.table_omega, S.table_density, left=0.0, right=0.0)


def default_grid(S: SpectralDensity, n_intervals: int = DEFAULT_INTERVALS,
                 span: float | None = None) -> np.ndarray:
    """Symmetric uniform offset grid with ``n_intervals + 1`` points.

    ``span`` is the half-width in units of the shape's width parameter.
    Rectangular band edges and uniform table nodes are placed on grid
    points so trapezoidal sums stay exact.
    """
    n = int(n_intervals)
    if n < 2 or n % 2:
        raise ConfigError("number of frequency intervals must be even and >= 2")
    if S.shape == "tabulated":
        omax = float(S.table_omega[-1])
        step = 2.0 * omax / n
        nodes = S.table_omega
        h = numerics.uniform_step(nodes)
        if h is not None:
            first = nodes[nodes >= 0][0]
            m = int(math.floor(n * h / (2.0 * omax) + 1e-9))
            if first > 0.25 * h:
                m -= m % 2
            if m >= 1:
                step = h / m
        return step * np.arange(-n // 2, n // 2 + 1)

    k = DEFAULT_SPAN[S.shape] if span is None else float(span)
    if k <= 0:
        raise ConfigError("grid span must be positive")
    omax = k * S.width
    step = 2.0 * omax / n
    if S.shape == "rectangular":
        edge = 0.5 * S.width
        j = max(1, round(edge / step))
        step = edge / j
    return step * np.arange(-n // 2, n // 2 + 1)


def fourier_envelope(S: SpectralDensity, tau, method: str = "auto", grid=None):
    """Envelope ``s(tau)`` (complex array; real for symmetric spectra).

    ``method='auto'`` uses closed forms for gaussian and rectangular shapes
    and trapezoidal quadrature on ``grid`` (default grid) otherwise.
    """
    tau = np.asarray(tau, dtype=float)
    if method not in ("auto", "closed", "quadrature"):
        raise ValueError(f"unknown method {method!r}")
    closed = S.shape in ("gaussian", "rectangular")
    if method == "closed" and not closed:
        raise ValueError(f"no closed form for {S.shape} spectra")
    if closed and method != "quadrature":
        if S.shape == "gaussian":
            out = np.exp(-0.5 * (S.width * tau) ** 2)
        else:
            out = np.sinc(S.width * tau / (2.0 * math.pi))
        return out.astype(complex)
    offsets = default_grid(S) if grid is None else np.asarray(grid, dtype=float)
    flat = numerics.fourier(offsets, evaluate_spectrum(S, offsets), tau.ravel())
    return flat.reshape(tau.shape)


def coherence_length(S: SpectralDensity) -> float:
    """FWHM of ``|s(tau)|`` expressed on the ``c*tau/2`` axis, in meters."""
    if S.shape == "gaussian":
        return FWHM_PER_SIGMA / S.width * c / 2.0
    if S.shape == "rectangular":
        # |sinc(W tau / 2)| = 1/2 at W tau / 2 = x_half
        return 2.0 * _SINC_HALF / S.width * c
    offsets = default_grid(S)
    step = offsets[1] - offsets[0]
    tau_max = math.pi / step
    mag = lambda t: abs(fourier_envelope(S, np.array([t]), grid=offsets)[0]) - 0.5
    # Walk outward in coarse steps to bracket the first half-maximum crossing.
    dt = 0.4 * math.pi / offsets[-1]
    t_prev, t = 0.0, dt
    while t < tau_max:
        if mag(t) < 0:
            t_half = brentq(mag, t_prev, t, xtol=1e-22, rtol=1e-13)
            return 2.0 * t_half * c / 2.0
        t_prev, t = t, t + dt
    raise NumericalError("|s(tau)| never drops below half maximum inside the Nyquist window")
