"""Trace and report files.

Trace CSV layout::

    # schema_version=1
    # kind=qoct_coincidence
    # source=...
    # stack=...
    # normalization=lambda0
    # norm_value=0.08
    # omega0_rad_s=2.3198...e+15
    display_position_um,normalized_value
    -50.0,1.0
    ...

Floats are written with ``repr`` so a file read back reproduces the exact
arrays, and identical inputs give byte-identical files.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .engine import Interferogram
from .errors import ConfigError

SCHEMA_VERSION = 1
CSV_HEADER = "display_position_um,normalized_value"


def _meta(g: Interferogram) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": g.kind,
        "source": g.source,
        "stack": g.stack,
        "normalization": g.normalization,
        "norm_value": float(g.norm_value),
        "omega0_rad_s": float(g.omega0),
    }


def _clean(text: str) -> str:
    return str(text).replace("\n", " ").replace("\r", " ")


def trace_to_csv(g: Interferogram) -> str:
    lines = [f"# {k}={_clean(repr(v) if isinstance(v, float) else v)}" for k, v in _meta(g).items()]
    lines.append(CSV_HEADER)
    lines.extend(f"{float(x)!r},{float(v)!r}" for x, v in zip(g.position_um, g.values))
    return "\n".join(lines) + "\n"


def write_trace_csv(g: Interferogram, path) -> Path:
    path = Path(path)
    path.write_text(trace_to_csv(g))
    return path


def read_trace_csv(path) -> Interferogram:
    meta, xs, vs = {}, [], []
    header_seen = False
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, sep, value = line[1:].strip().partition("=")
                if sep:
                    meta[key.strip()] = value.strip()
                continue
            if not header_seen:
                header_seen = True
                if line.replace(" ", "") == CSV_HEADER:
                    continue
            parts = line.split(",")
            try:
                xs.append(float(parts[0]))
                vs.append(float(parts[1]))
            except (ValueError, IndexError):
                raise ConfigError(f"{path}: malformed trace row {line!r}") from None
    missing = [k for k in ("kind", "omega0_rad_s") if k not in meta]
    if missing:
        raise ConfigError(f"{path}: missing metadata {missing}")
    if not xs:
        raise ConfigError(f"{path}: no samples")
    return Interferogram.from_positions(
        meta["kind"], np.array(xs), np.array(vs),
        normalization=meta.get("normalization", ""),
        norm_value=float(meta.get("norm_value", "nan")),
        omega0=float(meta["omega0_rad_s"]),
        source=meta.get("source", ""),
        stack=meta.get("stack", ""))


def trace_to_json(g: Interferogram) -> dict:
    doc = _meta(g)
    doc["display_position_um"] = [float(x) for x in g.position_um]
    doc["normalized_value"] = [float(v) for v in g.values]
    return doc


def read_trace_json(path) -> Interferogram:
    doc = json.loads(Path(path).read_text())
    try:
        return Interferogram.from_positions(
            doc["kind"], np.array(doc["display_position_um"], dtype=float),
            np.array(doc["normalized_value"], dtype=float),
            normalization=doc.get("normalization", ""), norm_value=float(doc.get("norm_value", "nan")),
            omega0=float(doc["omega0_rad_s"]), source=doc.get("source", ""), stack=doc.get("stack", ""))
    except KeyError as exc:
        raise ConfigError(f"{path}: missing field {exc.args[0]!r}") from None


def read_trace(path) -> Interferogram:
    """Read a trace written as CSV or JSON (chosen by extension)."""
    return read_trace_json(path) if str(path).endswith(".json") else read_trace_csv(path)


def dumps(doc) -> str:
    return json.dumps(_plain(doc), indent=2) + "\n"


def write_json(doc, path) -> Path:
    path = Path(path)
    path.write_text(dumps(doc))
    return path


def _plain(obj):
    """Convert numpy scalars/arrays and tuples to JSON-native types."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj
