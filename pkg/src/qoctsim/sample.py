"""Layered samples and their reflection transfer function.

A sample is a sequence of homogeneous segments, each followed by a (weakly)
reflecting interface. The field returned from interface ``j`` picks up the
round-trip phase of every segment in front of it, so

    H(omega) = sum_j r_j exp(2i * sum_{m<=j} beta_m(omega) d_m).

Reflections are single-pass: no etalon terms, and interface coefficients
are taken as given (no automatic t^2 transmission factors).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy.constants import c

from .errors import ConfigError

WEAK_REFLECTION_LIMIT = 0.2


@dataclass(frozen=True)
class ConstantIndex:
    """Non-dispersive medium: beta(omega) = n*omega/c."""

    n: float

    def __post_init__(self):
        if not self.n >= 1.0:
            raise ConfigError(f"refractive index must be >= 1, got {self.n!r}")
        if self.n > 5.0:
            warnings.warn(f"unusually large refractive index n={self.n}", stacklevel=3)

    def beta(self, omega):
        return self.n * np.asarray(omega, dtype=float) / c

    def group_delay(self, omega: float) -> float:
        return self.n / c


@dataclass(frozen=True)
class TaylorDispersion:
    """Cubic expansion of beta about ``omega_ref``.

    Note the coefficients multiply powers of the offset directly:
    ``beta = beta0 + beta1*W + beta2*W**2 + beta3*W**3`` with ``W = omega - omega_ref``,
    so ``beta2`` is *not* half the second derivative.
    """

    omega_ref: float
    beta0: float = 0.0
    beta1: float = 0.0
    beta2: float = 0.0
    beta3: float = 0.0

    def __post_init__(self):
        if not self.omega_ref > 0:
            raise ConfigError("Taylor reference frequency must be positive")

    def beta(self, omega):
        w = np.asarray(omega, dtype=float) - self.omega_ref
        return self.beta0 + w * (self.beta1 + w * (self.beta2 + w * self.beta3))

    def group_delay(self, omega: float) -> float:
        w = omega - self.omega_ref
        return self.beta1 + 2.0 * self.beta2 * w + 3.0 * self.beta3 * w * w


@dataclass(frozen=True, eq=False)
class TabulatedDispersion:
    """beta(omega) by linear interpolation of (omega, beta) samples."""

    omega: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        om = np.asarray(self.omega, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        if om.ndim != 1 or om.shape != vals.shape or om.size < 2:
            raise ConfigError("tabulated dispersion needs matching columns of >= 2 rows")
        if np.any(np.diff(om) <= 0) or om[0] <= 0:
            raise ConfigError("tabulated dispersion frequencies must be positive and increasing")
        object.__setattr__(self, "omega", om)
        object.__setattr__(self, "values", vals)

    def beta(self, omega):
        omega = np.asarray(omega, dtype=float)
        if np.any(omega < self.omega[0]) or np.any(omega > self.omega[-1]):
            raise ConfigError(
                f"frequency outside tabulated dispersion range [{self.omega[0]:.6g}, {self.omega[-1]:.6g}] rad/s")
        return np.interp(omega, self.omega, self.values)

    def group_delay(self, omega: float) -> float:
        i = int(np.clip(np.searchsorted(self.omega, omega), 1, self.omega.size - 1))
        return float((self.values[i] - self.values[i - 1]) / (self.omega[i] - self.omega[i - 1]))


DispersionLaw = Union[ConstantIndex, TaylorDispersion, TabulatedDispersion]


def beta(law: DispersionLaw, omega):
    """Wavenumber in rad/m of ``law`` at angular frequency ``omega``."""
    if np.any(np.asarray(omega) <= 0):
        raise ConfigError("angular frequency must be positive")
    return law.beta(omega)


def load_dispersion_csv(path) -> TabulatedDispersion:
    """Two-column CSV: omega (rad/s), beta (rad/m); ``#`` comments and one header allowed."""
    rows = []
    first = True
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",")
            try:
                rows.append((float(parts[0]), float(parts[1])))
            except (ValueError, IndexError):
                if not first:
                    raise ConfigError(f"{path}: malformed row {line!r}") from None
            first = False
    if not rows:
        raise ConfigError(f"{path}: no dispersion samples")
    om, b = np.array(rows).T
    return TabulatedDispersion(om, b)


@dataclass(frozen=True)
class MediumSegment:
    thickness: float
    law: DispersionLaw

    def __post_init__(self):
        if not (self.thickness >= 0 and math.isfinite(self.thickness)):
            raise ConfigError(f"segment thickness must be >= 0, got {self.thickness!r}")


@dataclass(frozen=True)
class Interface:
    r: complex

    def __post_init__(self):
        object.__setattr__(self, "r", complex(self.r))
        if abs(self.r) > 1.0 + 1e-12:
            raise ConfigError(f"|r| must not exceed 1, got {abs(self.r):.6g}")


@dataclass(frozen=True)
class Layer:
    """A segment traversed before reaching ``interface``; ``segment=None`` means none."""

    segment: MediumSegment | None
    interface: Interface


@dataclass(frozen=True)
class OpticalStack:
    layers: tuple[Layer, ...]
    name: str = "sample"
    notes: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        layers = tuple(self.layers)
        object.__setattr__(self, "layers", layers)
        if not any(l.interface.r != 0 for l in layers):
            raise ConfigError(f"stack {self.name!r} has no reflecting interface")
        reflecting = [l.interface.r for l in layers if l.interface.r != 0]
        power = sum(abs(r) ** 2 for r in reflecting)
        # A lone reflector has no multiple-scattering paths to neglect.
        if len(reflecting) > 1 and power > WEAK_REFLECTION_LIMIT:
            msg = (f"stack {self.name!r}: total reflectance {power:.3g} exceeds "
                   f"{WEAK_REFLECTION_LIMIT}; single-scattering model is approximate")
            warnings.warn(msg, stacklevel=3)
            object.__setattr__(self, "notes", self.notes + (msg,))

    @property
    def reflectances(self) -> np.ndarray:
        return np.array([l.interface.r for l in self.layers])

    def buried_under(self, segments, name: str | None = None) -> "OpticalStack":
        """Same stack behind non-reflecting ``segments`` (an overburden)."""
        front = tuple(Layer(seg, Interface(0.0)) for seg in segments)
        return OpticalStack(front + self.layers, name or f"{self.name} (buried)")

    def group_delays(self, omega: float) -> np.ndarray:
        """Round-trip group delay in seconds to each interface at ``omega``."""
        acc, out = 0.0, []
        for layer in self.layers:
            if layer.segment is not None:
                acc += 2.0 * layer.segment.thickness * layer.segment.law.group_delay(omega)
            out.append(acc)
        return np.array(out)


def mirror(r: complex = 1.0, name: str = "mirror") -> OpticalStack:
    return OpticalStack((Layer(None, Interface(r)),), name)


def slab(r1: complex, r2: complex, n: float, thickness: float, name: str = "slab") -> OpticalStack:
    """Two-surface window of index ``n`` in air."""
    return OpticalStack(
        (Layer(None, Interface(r1)), Layer(MediumSegment(thickness, ConstantIndex(n)), Interface(r2))),
        name)


def round_trip_phase(stack: OpticalStack, j: int, omega):
    """Round-trip phase ``2*sum_{m<=j} beta_m(omega) d_m`` to interface ``j``."""
    if not -len(stack.layers) <= j < len(stack.layers):
        raise IndexError(f"interface index {j} out of range")
    omega = np.asarray(omega, dtype=float)
    if np.any(omega <= 0):
        raise ConfigError("angular frequency must be positive")
    j %= len(stack.layers)
    phase = np.zeros(omega.shape)
    for layer in stack.layers[: j + 1]:
        seg = layer.segment
        if seg is not None and seg.thickness != 0:
            phase = phase + 2.0 * seg.thickness * seg.law.beta(omega)
    return phase


def transfer_values(stack: OpticalStack, omega) -> np.ndarray:
    """H(omega) at absolute angular frequencies ``omega``."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega <= 0):
        raise ConfigError("angular frequency must be positive")
    h = np.zeros(omega.shape, dtype=complex)
    phase = np.zeros(omega.shape)
    for layer in stack.layers:
        seg = layer.segment
        if seg is not None and seg.thickness != 0:
            phase = phase + 2.0 * seg.thickness * seg.law.beta(omega)
        r = layer.interface.r
        if r != 0:
            h += r * np.exp(1j * phase)
    return h


@dataclass(frozen=True, eq=False)
class TransferFunction:
    """H sampled at ``omega0 + offsets`` on a symmetric uniform offset grid."""

    omega0: float
    offsets: np.ndarray
    values: np.ndarray
    label: str = ""

    @property
    def step(self) -> float:
        return float(self.offsets[1] - self.offsets[0])

    def mirrored(self) -> np.ndarray:
        """H(omega0 - Omega) on the same grid."""
        return self.values[::-1]


def transfer_function(stack: OpticalStack, omega0: float, offsets) -> TransferFunction:
    """Evaluate ``stack`` on the baseband grid ``offsets`` about ``omega0``."""
    from .numerics import check_uniform_grid

    offsets = np.asarray(offsets, dtype=float)
    check_uniform_grid(offsets)
    if omega0 + offsets[0] <= 0:
        raise ConfigError("frequency grid extends to non-positive absolute frequency")
    return TransferFunction(float(omega0), offsets, transfer_values(stack, omega0 + offsets), stack.name)
