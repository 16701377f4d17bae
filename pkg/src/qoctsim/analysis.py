"""Feature extraction and scan comparison.

QOCT traces are read as dips and humps about a flat baseline; OCT traces are
demodulated to their fringe envelope first. All positions and widths are in
micrometers of delay-line displacement.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import ndimage
from scipy.constants import c
from scipy.fft import next_fast_len
from scipy.signal import correlate, correlation_lags, find_peaks, hilbert

from . import numerics
from .engine import OCT, QOCT, Interferogram
from .errors import ConfigError, QoctError

DEFAULT_THRESHOLD = 0.05
DEFAULT_CANCEL_THRESHOLD = 1e-3
DEFAULT_FWHM_TOLERANCE = 0.01
MATCH_DISTANCE_UM = 5.0


class AnalysisError(QoctError):
    """A trace does not support the requested measurement."""


@dataclass(frozen=True)
class Feature:
    kind: str  # dip, hump or envelope
    center: float
    fwhm: float
    visibility: float
    amplitude_sign: str  # below_baseline or above_baseline
    depth: float  # |extremum - baseline|, or envelope peak


@dataclass(frozen=True)
class FeatureReport:
    kind: str
    baseline: float
    features: tuple[Feature, ...]
    separations: tuple[tuple[int, int, float], ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "baseline": self.baseline,
            "features": [asdict(f) for f in self.features],
            "separations": [{"from": i, "to": j, "separation_um": s} for i, j, s in self.separations],
        }

    def of_kind(self, kind: str) -> list[Feature]:
        return [f for f in self.features if f.kind == kind]


@dataclass(frozen=True)
class ComparisonReport:
    kind: str
    estimated_shift: float
    residual_rms: float
    residual_max: float
    fwhm_ratios: tuple[float, ...]
    verdict: str
    threshold: float

    def to_dict(self) -> dict:
        d = asdict(self)
        d["fwhm_ratios"] = list(self.fwhm_ratios)
        return d


def _step(x: np.ndarray) -> float:
    step = numerics.uniform_step(x)
    if step is None:
        raise AnalysisError("trace must be sampled on a uniform grid")
    return step


def fringe_period_um(omega0: float) -> float:
    return math.pi * c / omega0 * 1e6


def oct_envelope(g: Interferogram, baseline: float | None = None) -> np.ndarray:
    """Fringe envelope of an OCT trace.

    The trace minus its baseline is turned into an analytic signal by
    zeroing negative frequencies (zero padded to avoid wrap-around), then
    demodulated at ``omega0``; the envelope is the magnitude of the result.
    """
    if g.kind != OCT:
        raise AnalysisError("envelope extraction needs an OCT trace")
    dx = _step(g.position_um)
    if dx >= fringe_period_um(g.omega0) / 4.0:
        raise AnalysisError("sampling too coarse to resolve the carrier fringes")
    if baseline is None:
        baseline = float(np.median(g.values))
    ac = g.values - baseline
    n = ac.size
    z = hilbert(ac, next_fast_len(2 * n))[:n]
    baseband = z * np.exp(1j * g.omega0 * g.delay)
    return np.abs(baseband)


def _runs(mask: np.ndarray):
    labels, count = ndimage.label(mask)
    return ndimage.find_objects(labels)[:count] if count else []


def _half_crossings(x: np.ndarray, y: np.ndarray, i: int, half: float):
    """Linear-interpolated positions where ``y`` falls to ``half`` either side of ``i``."""
    below_left = np.flatnonzero(y[:i] <= half)
    below_right = np.flatnonzero(y[i:] <= half)
    if below_left.size == 0 or below_right.size == 0:
        return None
    left = int(below_left[-1])
    right = i + int(below_right[0])
    xl = x[left] + (half - y[left]) * (x[left + 1] - x[left]) / (y[left + 1] - y[left])
    xr = x[right] + (half - y[right]) * (x[right - 1] - x[right]) / (y[right - 1] - y[right])
    return left, right, xl, xr


def _peaks(x: np.ndarray, y: np.ndarray, level: float):
    """Peaks of ``y`` above ``level`` whose half-maximum span holds nothing higher.

    Candidates must also stand out from their surroundings by ``level``
    (prominence), which discards counting-noise wiggles.
    """
    found = []
    candidates, _ = find_peaks(y, height=level, prominence=level)
    for i in candidates:
        span = _half_crossings(x, y, int(i), 0.5 * y[i])
        if span is None:
            continue
        left, right, xl, xr = span
        if np.max(y[left:right + 1]) > y[i]:
            continue  # shoulder of a larger peak
        found.append((int(i), xl, xr))
    return found


def _baseline(values: np.ndarray, deviation, threshold: float) -> float:
    b = float(np.median(values))
    for _ in range(3):
        mask = np.abs(deviation(b)) > threshold * abs(b)
        runs = _runs(mask)
        if not runs:
            break
        grow = max(s[0].stop - s[0].start for s in runs)
        outside = ~ndimage.binary_dilation(mask, iterations=grow)
        if outside.sum() < max(8, values.size // 20):
            break
        b = float(np.median(values[outside]))
    return b


def extract_features(g: Interferogram, threshold: float = DEFAULT_THRESHOLD) -> FeatureReport:
    """Locate dips/humps (QOCT) or fringe envelopes (OCT) and measure them.

    A feature is any excursion from the baseline larger than ``threshold``
    times the baseline. Its FWHM is measured at half the excursion by linear
    interpolation and its center is the midpoint of those crossings.
    """
    x = g.position_um
    if x.size < 3:
        raise AnalysisError("trace too short for feature extraction")
    _step(x)
    features = []
    if g.kind == QOCT:
        b = _baseline(g.values, lambda b: g.values - b, threshold)
        dev = g.values - b
        for sign, kind, side in ((-1.0, "dip", "below_baseline"), (1.0, "hump", "above_baseline")):
            y = sign * dev
            for i, xl, xr in _peaks(x, y, threshold * abs(b)):
                features.append(Feature(kind, float(0.5 * (xl + xr)), float(xr - xl), float(y[i] / abs(b)), side,
                                        float(y[i])))
    else:
        b = _baseline(g.values, lambda b: oct_envelope(g, b), threshold)
        env = oct_envelope(g, b)
        period = fringe_period_um(g.omega0)
        for i, xl, xr in _peaks(x, env, threshold * abs(b)):
            center = float(0.5 * (xl + xr))
            features.append(Feature("envelope", center, float(xr - xl),
                                    float(_fringe_visibility(x, g.values, center, period)), "above_baseline",
                                    float(env[i])))
    if not features:
        raise AnalysisError("no features above threshold")
    features.sort(key=lambda f: f.center)
    seps = tuple((i, j, features[j].center - features[i].center)
                 for i in range(len(features)) for j in range(i + 1, len(features)))
    return FeatureReport(g.kind, b, tuple(features), seps)


def _refined_extremum(y: np.ndarray, i: int) -> float:
    if 0 < i < y.size - 1:
        den = y[i - 1] - 2.0 * y[i] + y[i + 1]
        if den != 0:
            d = 0.5 * (y[i - 1] - y[i + 1]) / den
            return float(y[i] - 0.25 * (y[i - 1] - y[i + 1]) * d)
    return float(y[i])


def _fringe_visibility(x, values, center, period) -> float:
    """(Imax - Imin)/(Imax + Imin) over one fringe period around ``center``."""
    idx = np.flatnonzero(np.abs(x - center) <= 0.5 * period)
    if idx.size < 3:
        return float("nan")
    lo, hi = idx[0], idx[-1] + 1
    seg = values[lo:hi]
    imax = _refined_extremum(values, lo + int(np.argmax(seg)))
    imin = _refined_extremum(values, lo + int(np.argmin(seg)))
    return (imax - imin) / (imax + imin)


def _signal(g: Interferogram, report: FeatureReport) -> np.ndarray:
    if g.kind == QOCT:
        return g.values - report.baseline
    return oct_envelope(g, report.baseline)


def estimate_shift(reference: np.ndarray, moved: np.ndarray) -> float:
    """Samples by which ``moved`` lags ``reference`` (parabolic cross-correlation peak)."""
    corr = correlate(moved, reference, mode="full", method="fft")
    lags = correlation_lags(moved.size, reference.size, mode="full")
    p = int(np.argmax(corr))
    if p == 0 or p == corr.size - 1:
        raise AnalysisError("cross-correlation peak at the edge of the lag window")
    y0, y1, y2 = corr[p - 1], corr[p], corr[p + 1]
    den = y0 - 2.0 * y1 + y2
    frac = 0.5 * (y0 - y2) / den if den != 0 else 0.0
    return float(lags[p] + frac)


def compare_scans(air: Interferogram, buried: Interferogram, *,
                  threshold: float = DEFAULT_CANCEL_THRESHOLD,
                  fwhm_tolerance: float = DEFAULT_FWHM_TOLERANCE,
                  feature_threshold: float = DEFAULT_THRESHOLD) -> ComparisonReport:
    """Test whether ``buried`` is merely a displaced copy of ``air``.

    The buried trace is aligned by the cross-correlation shift using
    band-limited interpolation; residuals are expressed as a fraction of the
    deepest feature of the air trace. OCT traces are compared through their
    envelopes, since carrier phases need not agree.
    """
    if air.kind != buried.kind:
        raise ConfigError(f"cannot compare {air.kind} with {buried.kind}")
    if air.position_um.shape != buried.position_um.shape or not np.allclose(
            air.position_um, buried.position_um, rtol=0, atol=1e-9):
        raise ConfigError("scans must share a common delay grid")
    dx = _step(air.position_um)
    rep_air = extract_features(air, feature_threshold)
    rep_bur = extract_features(buried, feature_threshold)
    sig_air = _signal(air, rep_air)
    sig_bur = _signal(buried, rep_bur)

    shift = estimate_shift(sig_air, sig_bur)
    aligned = numerics.fractional_shift(sig_bur, -shift, baseline=0.0)
    valid = np.ones(aligned.size, dtype=bool)
    cut = int(math.ceil(abs(shift))) + 1
    if shift > 0:
        valid[-cut:] = False
    elif shift < 0:
        valid[:cut] = False
    depth = float(np.max(np.abs(sig_air)))
    resid = (aligned - sig_air)[valid] / depth
    shift_um = shift * dx

    ratios = []
    for fa in rep_air.features:
        best = min(rep_bur.features, key=lambda fb: abs(fb.center - shift_um - fa.center))
        if best.kind == fa.kind and abs(best.center - shift_um - fa.center) <= MATCH_DISTANCE_UM:
            ratios.append(float(best.fwhm / fa.fwhm))
    rmax = float(np.max(np.abs(resid)))
    ok = (bool(ratios) and rmax < threshold
          and all(abs(r - 1.0) <= fwhm_tolerance for r in ratios))
    return ComparisonReport(air.kind, shift_um, float(np.sqrt(np.mean(resid**2))), rmax,
                            tuple(ratios), "cancelled" if ok else "not_cancelled", threshold)


def resolution_ratio(qoct: FeatureReport, oct: FeatureReport,
                     max_distance: float = MATCH_DISTANCE_UM) -> float:
    """Mean FWHM(OCT)/FWHM(QOCT) over features at matching centers."""
    ratios = []
    for fo in oct.features:
        fq = min(qoct.features, key=lambda f: abs(f.center - fo.center))
        if abs(fq.center - fo.center) <= max_distance:
            ratios.append(float(fo.fwhm / fq.fwhm))
    if not ratios:
        raise AnalysisError("no features with matching centers")
    return float(np.mean(ratios))
