import numpy as np
import pytest

from qoctsim.config import load_preset
from qoctsim.engine import oct_scan, position_to_delay, qoct_scan, scan_positions
from qoctsim.spectrum import make_spectrum


def scan(kind, S, stack, start=-50.0, stop=250.0, step=None):
    step = step or (0.05 if kind == "qoct" else 0.02)
    x = scan_positions(start, stop, step)
    fn = qoct_scan if kind == "qoct" else oct_scan
    return fn(S, stack, position_to_delay(x))


@pytest.fixture(scope="session")
def source():
    return make_spectrum("gaussian", 812e-9, coherence_length=37e-6)


@pytest.fixture(scope="session")
def silica_cfg():
    return load_preset("silica-air")


@pytest.fixture(scope="session")
def znse_cfg():
    return load_preset("silica-znse")


@pytest.fixture(scope="session")
def silica_traces(silica_cfg):
    cfg = silica_cfg
    return {k: scan(k, cfg.source, cfg.sample) for k in ("qoct", "oct")}


@pytest.fixture(scope="session")
def znse_traces(znse_cfg):
    cfg = znse_cfg
    out = {}
    for variant, stack in (("air", cfg.sample), ("buried", cfg.buried)):
        for k in ("qoct", "oct"):
            out[f"{variant}_{k}"] = scan(k, cfg.source, stack)
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)
