"""Scenario documents: parsing and validation.

A scenario is a JSON object with a ``schema`` tag. Every level rejects keys
it does not know, and all physics objects are constructed (hence validated)
before any scan runs. Lengths are in meters except scan windows, which are
in micrometers of delay-line displacement.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from scipy.constants import c

from .errors import ConfigError
from .presets import SCHEMA, preset_config
from .sample import (ConstantIndex, Interface, Layer, MediumSegment, OpticalStack, TaylorDispersion,
                     load_dispersion_csv)
from .spectrum import SpectralDensity, load_spectrum_csv, make_spectrum

SCAN_KINDS = ("qoct", "oct")
DEFAULT_WINDOWS = {
    "qoct": {"start_um": -50.0, "stop_um": 250.0, "step_um": 0.05},
    "oct": {"start_um": -50.0, "stop_um": 250.0, "step_um": 0.02},
}
TRACE_FORMATS = ("csv", "json")


@dataclass(frozen=True)
class ScanWindow:
    start_um: float
    stop_um: float
    step_um: float


@dataclass(frozen=True)
class Noise:
    mean_counts: float
    seed: int


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    source: SpectralDensity
    sample: OpticalStack
    overburden: tuple[MediumSegment, ...] = ()
    scans: tuple[str, ...] = SCAN_KINDS
    windows: dict = field(default_factory=dict)
    frequency_intervals: int | None = None
    frequency_span: float | None = None
    noise: Noise | None = None
    feature_threshold: float = 0.05
    cancel_threshold: float = 1e-3
    fwhm_tolerance: float = 0.01
    output_dir: str | None = None
    trace_format: str = "csv"
    description: str = ""

    @property
    def buried(self) -> OpticalStack | None:
        if not self.overburden:
            return None
        return self.sample.buried_under(self.overburden, f"{self.sample.name} under overburden")


def _object(d, where: str, allowed, required=()) -> dict:
    if not isinstance(d, dict):
        raise ConfigError(f"{where}: expected an object")
    unknown = sorted(set(d) - set(allowed))
    if unknown:
        raise ConfigError(f"{where}: unknown keys {unknown}")
    missing = [k for k in required if k not in d]
    if missing:
        raise ConfigError(f"{where}: missing keys {missing}")
    return d


def _number(v, where: str, positive=False, nonneg=False) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(f"{where}: expected a finite number, got {v!r}")
    if positive and not v > 0:
        raise ConfigError(f"{where}: must be > 0")
    if nonneg and v < 0:
        raise ConfigError(f"{where}: must be >= 0")
    return float(v)


def _resolve(path: str, base: Path | None) -> Path:
    p = Path(path)
    return p if p.is_absolute() or base is None else base / p


def _source(d, base) -> SpectralDensity:
    d = _object(d, "source", ("shape", "center_wavelength_m", "width_rad_s", "coherence_length_m",
                              "table_csv"), ("shape", "center_wavelength_m"))
    lam = _number(d["center_wavelength_m"], "source.center_wavelength_m", positive=True)
    if d["shape"] == "tabulated":
        if "table_csv" not in d:
            raise ConfigError("source: tabulated shape needs table_csv")
        return load_spectrum_csv(_resolve(d["table_csv"], base), lam)
    width = d.get("width_rad_s")
    lc = d.get("coherence_length_m")
    return make_spectrum(
        d["shape"], lam,
        width=None if width is None else _number(width, "source.width_rad_s"),
        coherence_length=None if lc is None else _number(lc, "source.coherence_length_m"))


def _law(d, where: str, omega_ref: float, base):
    if not isinstance(d, dict) or "law" not in d:
        raise ConfigError(f"{where}: medium needs a 'law'")
    law = d["law"]
    if law == "constant_index":
        _object(d, where, ("law", "n"), ("n",))
        return ConstantIndex(_number(d["n"], f"{where}.n"))
    if law == "taylor":
        _object(d, where, ("law", "reference_wavelength_m", "beta0", "beta1", "beta2", "beta3"))
        ref = omega_ref
        if "reference_wavelength_m" in d:
            lam = _number(d["reference_wavelength_m"], f"{where}.reference_wavelength_m", positive=True)
            ref = 2.0 * math.pi * c / lam
        coeffs = {k: _number(d.get(k, 0.0), f"{where}.{k}") for k in ("beta0", "beta1", "beta2", "beta3")}
        return TaylorDispersion(ref, **coeffs)
    if law == "tabulated":
        _object(d, where, ("law", "csv"), ("csv",))
        return load_dispersion_csv(_resolve(d["csv"], base))
    raise ConfigError(f"{where}: unknown dispersion law {law!r}")


def _reflection(v, where: str) -> complex:
    if isinstance(v, list):
        if len(v) != 2:
            raise ConfigError(f"{where}: complex r is given as [re, im]")
        return complex(_number(v[0], where), _number(v[1], where))
    return complex(_number(v, where))


def _segment(d, where, omega_ref, base) -> MediumSegment:
    _object(d, where, ("thickness_m", "medium"), ("thickness_m", "medium"))
    return MediumSegment(_number(d["thickness_m"], f"{where}.thickness_m", nonneg=True),
                         _law(d["medium"], f"{where}.medium", omega_ref, base))


def _sample(d, omega_ref, base) -> OpticalStack:
    d = _object(d, "sample", ("name", "layers"), ("layers",))
    layers = d["layers"]
    if not isinstance(layers, list) or not layers:
        raise ConfigError("sample.layers: need at least one layer")
    out = []
    for i, ld in enumerate(layers):
        where = f"sample.layers[{i}]"
        _object(ld, where, ("thickness_m", "medium", "r"), ("r",))
        seg = None
        if "thickness_m" in ld or "medium" in ld:
            seg = _segment({k: v for k, v in ld.items() if k != "r"}, where, omega_ref, base)
        out.append(Layer(seg, Interface(_reflection(ld["r"], f"{where}.r"))))
    return OpticalStack(tuple(out), str(d.get("name", "sample")))


def _window(d, kind) -> ScanWindow:
    merged = dict(DEFAULT_WINDOWS[kind])
    if d is not None:
        _object(d, f"grids.{kind}", ("start_um", "stop_um", "step_um"))
        merged.update(d)
    w = ScanWindow(_number(merged["start_um"], f"grids.{kind}.start_um"),
                   _number(merged["stop_um"], f"grids.{kind}.stop_um"),
                   _number(merged["step_um"], f"grids.{kind}.step_um", positive=True))
    if w.stop_um < w.start_um:
        raise ConfigError(f"grids.{kind}: stop_um must not precede start_um")
    return w


def parse_config(doc: dict, base_dir=None) -> ScenarioConfig:
    """Validate a scenario document and build its physics objects."""
    base = Path(base_dir) if base_dir is not None else None
    doc = _object(doc, "scenario", ("schema", "name", "description", "source", "sample", "overburden",
                                    "scans", "grids", "noise", "analysis", "outputs"),
                  ("schema", "source", "sample"))
    if doc["schema"] != SCHEMA:
        raise ConfigError(f"unsupported schema {doc['schema']!r}; expected {SCHEMA!r}")
    name = str(doc.get("name", "scenario"))
    if not name or any(ch in name for ch in "/\\"):
        raise ConfigError("scenario name must be a non-empty file-name-safe string")

    scans = doc.get("scans", list(SCAN_KINDS))
    if scans == "both":
        scans = list(SCAN_KINDS)
    if isinstance(scans, str):
        scans = [scans]
    if not isinstance(scans, list) or not scans:
        raise ConfigError("scans: need at least one of 'qoct', 'oct'")
    bad = [s for s in scans if s not in SCAN_KINDS]
    if bad or len(set(scans)) != len(scans):
        raise ConfigError(f"scans: invalid entries {scans!r}")
    scans = tuple(k for k in SCAN_KINDS if k in scans)

    source = _source(doc["source"], base)
    omega0 = source.center_frequency
    sample = _sample(doc["sample"], omega0, base)
    over = doc.get("overburden") or []
    if not isinstance(over, list):
        raise ConfigError("overburden: expected a list of segments")
    overburden = tuple(_segment(o, f"overburden[{i}]", omega0, base) for i, o in enumerate(over))

    grids = _object(doc.get("grids", {}), "grids", ("frequency_intervals", "frequency_span", "qoct", "oct"))
    intervals = grids.get("frequency_intervals")
    if intervals is not None:
        if isinstance(intervals, bool) or not isinstance(intervals, int) or intervals < 2 or intervals & (intervals - 1):
            raise ConfigError("grids.frequency_intervals must be a power of two")
    span = grids.get("frequency_span")
    if span is not None:
        span = _number(span, "grids.frequency_span", positive=True)
    windows = {k: _window(grids.get(k), k) for k in SCAN_KINDS}

    noise = None
    if doc.get("noise") is not None:
        nd = _object(doc["noise"], "noise", ("mean_counts", "seed"), ("mean_counts",))
        seed = nd.get("seed", 0)
        if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
            raise ConfigError("noise.seed must be a non-negative integer")
        noise = Noise(_number(nd["mean_counts"], "noise.mean_counts", positive=True), seed)

    ad = _object(doc.get("analysis", {}), "analysis", ("feature_threshold", "cancel_threshold", "fwhm_tolerance"))
    od = _object(doc.get("outputs", {}), "outputs", ("directory", "format"))
    fmt = od.get("format", "csv")
    if fmt not in TRACE_FORMATS:
        raise ConfigError(f"outputs.format must be one of {TRACE_FORMATS}")

    return ScenarioConfig(
        name=name,
        source=source,
        sample=sample,
        overburden=overburden,
        scans=scans,
        windows=windows,
        frequency_intervals=intervals,
        frequency_span=span,
        noise=noise,
        feature_threshold=_number(ad.get("feature_threshold", 0.05), "analysis.feature_threshold", positive=True),
        cancel_threshold=_number(ad.get("cancel_threshold", 1e-3), "analysis.cancel_threshold", positive=True),
        fwhm_tolerance=_number(ad.get("fwhm_tolerance", 0.01), "analysis.fwhm_tolerance", positive=True),
        output_dir=od.get("directory"),
        trace_format=fmt,
        description=str(doc.get("description", "")),
    )


def load_config(path) -> ScenarioConfig:
    """Read a scenario file; relative data paths resolve against its directory."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from None
    return parse_config(doc, path.parent)


def load_preset(name: str) -> ScenarioConfig:
    try:
        return parse_config(preset_config(name))
    except KeyError as exc:
        raise ConfigError(str(exc.args[0])) from None
