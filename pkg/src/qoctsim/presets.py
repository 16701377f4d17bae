"""Built-in scenarios.

The fused-silica window (|r|^2 = 0.04 per face, n = 1.5, 90 um) is probed by
an 812 nm source with a 37 um coherence length, first in air and then behind
two 5 mm ZnSe windows with GVD coefficient 5e-25 s^2/m.

ZnSe's absolute wavenumber and group delay only displace the traces, so the
buried preset carries a small *residual* group delay (as if the reference
arm already compensates most of the ZnSe path) that keeps both variants on
one delay window. Set ``beta1`` to the material value and move the scan
window to see the full displacement.
"""

from __future__ import annotations

import copy

SCHEMA = "qoctsim.scenario/1"

_SOURCE = {"shape": "gaussian", "center_wavelength_m": 812e-9, "coherence_length_m": 37e-6}

_SILICA = {
    "name": "fused-silica window",
    "layers": [
        {"r": 0.2},
        {"thickness_m": 90e-6, "medium": {"law": "constant_index", "n": 1.5}, "r": 0.2},
    ],
}

_ZNSE_WINDOW = {
    "thickness_m": 5e-3,
    "medium": {"law": "taylor", "beta0": 0.0, "beta1": 4e-12, "beta2": 5e-25, "beta3": 0.0},
}

_PRESETS = {
    "mirror": {
        "description": "Unit mirror in place of the sample: a full-visibility HOM dip and a bare OCT fringe packet.",
        "sample": {"name": "mirror", "layers": [{"r": 1.0}]},
    },
    "silica-air": {
        "description": "90 um fused-silica window in air (r1 = r2 = 0.2, n = 1.5).",
        "sample": _SILICA,
    },
    "silica-znse": {
        "description": "The silica window buried under two 5 mm ZnSe windows (beta2 = 5e-25 s^2/m), "
                       "simulated with and without the overburden.",
        "sample": _SILICA,
        "overburden": [_ZNSE_WINDOW, _ZNSE_WINDOW],
    },
}


def list_presets() -> list[tuple[str, str]]:
    """Preset names with one-line descriptions, in a fixed order."""
    return [(name, p["description"]) for name, p in _PRESETS.items()]


def preset_config(name: str) -> dict:
    """Full scenario document for preset ``name`` (a fresh copy)."""
    try:
        p = _PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; available: {', '.join(_PRESETS)}") from None
    doc = {
        "schema": SCHEMA,
        "name": name,
        "description": p["description"],
        "source": _SOURCE,
        "sample": p["sample"],
        "scans": ["qoct", "oct"],
    }
    if "overburden" in p:
        doc["overburden"] = p["overburden"]
    return copy.deepcopy(doc)
