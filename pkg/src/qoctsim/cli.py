"""Command-line front end.

Usage::

    qoctsim presets                          # list built-in scenarios
    qoctsim presets --show silica-znse       # print a preset as a scenario file
    qoctsim simulate --preset silica-air -o out/
    qoctsim simulate scenario.json --seed 3 --format json
    qoctsim analyze out/silica-air_qoct.csv
    qoctsim compare out/silica-znse_air_qoct.csv out/silica-znse_buried_qoct.csv

Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path

from . import __version__
from .analysis import compare_scans, extract_features, resolution_ratio
from .config import Noise, ScenarioConfig, load_config, load_preset
from .engine import (Interferogram, add_counting_noise, oct_scan, position_to_delay, qoct_scan,
                     scan_positions)
from .errors import ConfigError, QoctError
from .io import dumps, read_trace, trace_to_csv, trace_to_json
from .presets import list_presets, preset_config

log = logging.getLogger("qoctsim")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4
REPORT_SCHEMA_VERSION = 1


def _exit_code(exc: BaseException) -> int:
    if isinstance(exc, ConfigError):
        return EXIT_CONFIG
    if isinstance(exc, QoctError):
        return EXIT_NUMERIC
    if isinstance(exc, OSError):
        return EXIT_IO
    raise exc


def simulate(cfg: ScenarioConfig, seed: int | None = None) -> dict[str, Interferogram]:
    """Run every requested scan; keys are ``<scan>`` or ``<variant>_<scan>``."""
    variants = [("air", cfg.sample)]
    if cfg.buried is not None:
        variants.append(("buried", cfg.buried))
    scanners = {"qoct": qoct_scan, "oct": oct_scan}
    traces = {}
    for variant, stack in variants:
        for kind in cfg.scans:
            w = cfg.windows[kind]
            x = scan_positions(w.start_um, w.stop_um, w.step_um)
            g = scanners[kind](cfg.source, stack, position_to_delay(x),
                               n_intervals=cfg.frequency_intervals, span=cfg.frequency_span)
            # Keep the configured positions verbatim rather than the delay round trip.
            g = dataclasses.replace(g, position_um=x)
            key = kind if cfg.buried is None else f"{variant}_{kind}"
            traces[key] = g
    if cfg.noise is not None:
        base = cfg.noise.seed if seed is None else seed
        # Each trace draws from its own stream, so adding a scan leaves the others unchanged.
        for i, key in enumerate(sorted(traces)):
            traces[key] = add_counting_noise(traces[key], cfg.noise.mean_counts, [base, i])
    return traces


def analyze_traces(cfg: ScenarioConfig, traces: dict[str, Interferogram]) -> tuple[dict, dict | None]:
    reports = {k: extract_features(g, cfg.feature_threshold) for k, g in traces.items()}
    features = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "scenario": cfg.name,
        "traces": {k: {"source": traces[k].source, "stack": traces[k].stack, **r.to_dict()}
                   for k, r in reports.items()},
    }
    prefixes = ["air", "buried"] if cfg.buried is not None else [""]
    ratios = {}
    for p in prefixes:
        q, o = (f"{p}_qoct" if p else "qoct"), (f"{p}_oct" if p else "oct")
        if q in reports and o in reports:
            ratios[p or "sample"] = resolution_ratio(reports[q], reports[o])
    if ratios:
        features["resolution_ratio"] = ratios

    comparison = None
    if cfg.buried is not None:
        comparison = {"schema_version": REPORT_SCHEMA_VERSION, "scenario": cfg.name, "comparison": {}}
        for kind in cfg.scans:
            rep = compare_scans(traces[f"air_{kind}"], traces[f"buried_{kind}"],
                                threshold=cfg.cancel_threshold, fwhm_tolerance=cfg.fwhm_tolerance,
                                feature_threshold=cfg.feature_threshold)
            comparison["comparison"][kind] = rep.to_dict()
    return features, comparison


def run_scenario(cfg: ScenarioConfig, output_dir=None, trace_format: str | None = None,
                 seed: int | None = None) -> tuple[int, list[Path]]:
    """Simulate, analyze and write every output of ``cfg``.

    Returns ``(exit_code, written_paths)``. Nothing is written unless all
    computations succeed.
    """
    fmt = trace_format or cfg.trace_format
    out = Path(output_dir or cfg.output_dir or ".")
    try:
        if fmt not in ("csv", "json"):
            raise ConfigError(f"unknown trace format {fmt!r}")
        traces = simulate(cfg, seed)
        features, comparison = analyze_traces(cfg, traces)
    except QoctError as exc:
        log.error("%s", exc)
        return _exit_code(exc), []

    payload = []
    for key, g in traces.items():
        text = trace_to_csv(g) if fmt == "csv" else dumps(trace_to_json(g))
        payload.append((out / f"{cfg.name}_{key}.{fmt}", text))
    payload.append((out / f"{cfg.name}_features.json", dumps(features)))
    if comparison is not None:
        payload.append((out / f"{cfg.name}_comparison.json", dumps(comparison)))
    written = []
    try:
        out.mkdir(parents=True, exist_ok=True)
        for path, text in payload:
            path.write_text(text)
            written.append(path)
    except OSError as exc:
        log.error("cannot write outputs: %s", exc)
        return EXIT_IO, written
    return EXIT_OK, written


def _cmd_presets(args) -> int:
    if args.show:
        try:
            sys.stdout.write(dumps(preset_config(args.show)))
        except KeyError as exc:
            log.error("%s", exc.args[0])
            return EXIT_CONFIG
        return EXIT_OK
    for name, desc in list_presets():
        print(f"{name:14s} {desc}")
    return EXIT_OK


def _cmd_simulate(args) -> int:
    if (args.config is None) == (args.preset is None):
        log.error("give either a scenario file or --preset")
        return EXIT_CONFIG
    try:
        cfg = load_preset(args.preset) if args.preset else load_config(args.config)
    except (QoctError, OSError) as exc:
        log.error("%s", exc)
        return _exit_code(exc)
    if args.seed is not None and cfg.noise is None and args.mean_counts is None:
        log.warning("--seed has no effect without counting noise")
    if args.mean_counts is not None:
        cfg = dataclasses.replace(cfg, noise=Noise(args.mean_counts, args.seed or 0))
    code, written = run_scenario(cfg, args.output_dir, args.format, args.seed)
    for p in written:
        print(p)
    return code


def _emit(doc, output) -> int:
    text = dumps(doc)
    if output:
        try:
            Path(output).write_text(text)
        except OSError as exc:
            log.error("%s", exc)
            return EXIT_IO
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_analyze(args) -> int:
    try:
        g = read_trace(args.trace)
        report = extract_features(g, args.threshold)
    except (QoctError, OSError) as exc:
        log.error("%s", exc)
        return _exit_code(exc)
    doc = {"schema_version": REPORT_SCHEMA_VERSION, "trace": Path(args.trace).name,
           "source": g.source, "stack": g.stack, **report.to_dict()}
    return _emit(doc, args.output)


def _cmd_compare(args) -> int:
    try:
        rep = compare_scans(read_trace(args.air), read_trace(args.buried), threshold=args.cancel_threshold,
                            fwhm_tolerance=args.fwhm_tolerance, feature_threshold=args.threshold)
    except (QoctError, OSError) as exc:
        log.error("%s", exc)
        return _exit_code(exc)
    doc = {"schema_version": REPORT_SCHEMA_VERSION, "air": Path(args.air).name,
           "buried": Path(args.buried).name, "comparison": rep.to_dict()}
    return _emit(doc, args.output)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qoctsim", description="Quantum and classical OCT interferogram simulator.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("presets", help="list built-in scenarios")
    sp.add_argument("--show", metavar="NAME", help="print the scenario document of a preset")
    sp.set_defaults(func=_cmd_presets)

    sp = sub.add_parser("simulate", help="run a scenario and write traces and reports")
    sp.add_argument("config", nargs="?", help="scenario JSON file")
    sp.add_argument("--preset", help="use a built-in scenario instead of a file")
    sp.add_argument("-o", "--output-dir", help="output directory (default: scenario setting or .)")
    sp.add_argument("--format", choices=("csv", "json"), help="trace file format")
    sp.add_argument("--seed", type=int, help="counting-noise seed (overrides the scenario)")
    sp.add_argument("--mean-counts", type=float, help="add counting noise with this mean per point")
    sp.set_defaults(func=_cmd_simulate)

    sp = sub.add_parser("analyze", help="extract features from a trace file")
    sp.add_argument("trace")
    sp.add_argument("--threshold", type=float, default=0.05)
    sp.add_argument("-o", "--output", help="write JSON here instead of stdout")
    sp.set_defaults(func=_cmd_analyze)

    sp = sub.add_parser("compare", help="test an air/buried pair for dispersion cancellation")
    sp.add_argument("air")
    sp.add_argument("buried")
    sp.add_argument("--threshold", type=float, default=0.05, help="feature threshold")
    sp.add_argument("--cancel-threshold", type=float, default=1e-3)
    sp.add_argument("--fwhm-tolerance", type=float, default=0.01)
    sp.add_argument("-o", "--output", help="write JSON here instead of stdout")
    sp.set_defaults(func=_cmd_compare)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="qoctsim: %(levelname)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
