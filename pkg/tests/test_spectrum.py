import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.constants import c

from qoctsim.errors import ConfigError
from qoctsim.numerics import integrate
from qoctsim.spectrum import (coherence_length, default_grid, evaluate_spectrum, fourier_envelope,
                              load_spectrum_csv, make_spectrum)

LAM = 812e-9
SHAPED = ["gaussian", "rectangular", "sinc_squared"]

widths = st.floats(min_value=1e12, max_value=5e13)
wavelengths = st.floats(min_value=500e-9, max_value=1600e-9)


def _tabulated_gaussian(sigma=9.5e12, n=401):
    omega = np.linspace(-8 * sigma, 8 * sigma, n)
    return make_spectrum("tabulated", LAM, table=(omega, np.exp(-0.5 * (omega / sigma) ** 2)))


def _bisect(f, lo, hi, iters=200):
    """Plain bisection, kept independent of the library's root finder."""
    flo = f(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if (f(mid) > 0) == (flo > 0):
            lo, flo = mid, f(mid)
        else:
            hi = mid
    return 0.5 * (lo + hi)


@pytest.mark.parametrize("shape", SHAPED)
@given(width=widths, lam=wavelengths)
@settings(max_examples=25, deadline=None)
def test_normalized_on_default_grid(shape, width, lam):
    S = make_spectrum(shape, lam, width=width)
    offsets = default_grid(S)
    assert abs(integrate(offsets, S(offsets)) - 1.0) < 1e-9


@pytest.mark.parametrize("shape", SHAPED)
@given(width=widths)
@settings(max_examples=25, deadline=None)
def test_symmetric(shape, width):
    S = make_spectrum(shape, LAM, width=width)
    omega = np.linspace(0, 10 * width, 1001)
    np.testing.assert_array_equal(S(omega), S(-omega))


def test_tabulated_normalized_and_symmetrized():
    omega = np.linspace(-4e13, 4e13, 201)
    density = np.exp(-0.5 * ((omega - 1e12) / 9e12) ** 2)
    with pytest.warns(UserWarning):
        S = make_spectrum("tabulated", LAM, table=(omega, density))
    offsets = default_grid(S)
    assert abs(integrate(offsets, S(offsets)) - 1.0) < 1e-9
    np.testing.assert_allclose(S(offsets), S(-offsets), rtol=1e-12, atol=0)
    assert S.notes


def test_gaussian_peak_value():
    sigma = 9e12
    S = make_spectrum("gaussian", LAM, width=sigma)
    assert S(0.0) == pytest.approx(1.0 / (sigma * math.sqrt(2 * math.pi)), rel=1e-14)


def test_rectangular_edges_carry_half_value():
    W = 2e13
    S = make_spectrum("rectangular", LAM, width=W)
    assert S(0.0) == pytest.approx(1 / W)
    assert S(W / 2) == pytest.approx(0.5 / W)
    assert S(-W / 2) == pytest.approx(0.5 / W)
    assert S(0.5000001 * W) == 0.0
    offsets = default_grid(S)
    assert np.any(np.isclose(offsets, W / 2, rtol=1e-12, atol=0))


@pytest.mark.parametrize("shape", SHAPED)
def test_envelope_is_one_at_zero_delay(shape):
    S = make_spectrum(shape, LAM, width=1e13)
    assert fourier_envelope(S, np.array([0.0]), method="quadrature")[0] == pytest.approx(1.0, abs=1e-9)


def test_width_from_coherence_length_matches_independent_value():
    # [DERIVED] sigma = sqrt(2 ln 2) c / l_c for l_c = 37 um.
    S = make_spectrum("gaussian", LAM, coherence_length=37e-6)
    assert S.width == pytest.approx(math.sqrt(2 * math.log(2)) * c / 37e-6, rel=1e-14)
    assert S.width == pytest.approx(9.54e12, rel=1e-3)


@pytest.mark.parametrize("shape", SHAPED)
@given(lc=st.floats(min_value=5e-6, max_value=200e-6))
@settings(max_examples=10, deadline=None)
def test_coherence_length_round_trip(shape, lc):
    S = make_spectrum(shape, LAM, coherence_length=lc)
    assert coherence_length(S) == pytest.approx(lc, rel=1e-6)


def test_rectangular_coherence_length_against_bisection():
    W = 2e13
    S = make_spectrum("rectangular", LAM, width=W)
    f = lambda t: math.sin(W * t / 2) / (W * t / 2) - 0.5
    t_half = _bisect(f, 1e-20, 2 * math.pi / W)
    assert coherence_length(S) == pytest.approx(2 * t_half * c / 2, rel=1e-10)


def test_gaussian_envelope_fwhm_by_bisection(source):
    f = lambda t: abs(fourier_envelope(source, np.array([t]), method="quadrature")[0]) - 0.5
    t_half = _bisect(f, 0.0, 5 / source.width)
    assert 2 * t_half * c / 2 * 1e6 == pytest.approx(37.0, rel=1e-8)


def test_tabulated_gaussian_close_to_analytic():
    S = _tabulated_gaussian()
    assert coherence_length(S) == pytest.approx(math.sqrt(2 * math.log(2)) * c / 9.5e12, rel=5e-3)


@given(k=st.floats(min_value=0.25, max_value=4.0))
@settings(max_examples=20, deadline=None)
def test_envelope_scaling(k):
    S1 = make_spectrum("sinc_squared", LAM, width=1e13)
    S2 = make_spectrum("sinc_squared", LAM, width=k * 1e13)
    tau = np.linspace(-3e-13, 3e-13, 33)
    a = fourier_envelope(S2, tau / k, method="quadrature")
    b = fourier_envelope(S1, tau, method="quadrature")
    np.testing.assert_allclose(a, b, rtol=0, atol=1e-6)


@pytest.mark.parametrize("shape, tol", [("gaussian", 1e-8), ("rectangular", 1e-6)])
def test_quadrature_matches_closed_form(shape, tol):
    # The band edges of the rectangle limit trapezoid accuracy to second order.
    S = make_spectrum(shape, LAM, width=1e13)
    tau = np.linspace(-8 / S.width, 8 / S.width, 401)
    q = fourier_envelope(S, tau, method="quadrature")
    cf = fourier_envelope(S, tau, method="closed")
    assert np.max(np.abs(q - cf)) < tol


def test_rectangular_quadrature_converges_at_second_order():
    S = make_spectrum("rectangular", LAM, width=1e13)
    tau = np.linspace(-8 / S.width, 8 / S.width, 401)
    cf = fourier_envelope(S, tau, method="closed")
    errs = [np.max(np.abs(fourier_envelope(S, tau, method="quadrature", grid=default_grid(S, n)) - cf))
            for n in (4096, 8192)]
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.05)


@pytest.mark.parametrize("shape", SHAPED)
def test_envelope_real_for_symmetric_spectrum(shape):
    S = make_spectrum(shape, LAM, width=1e13)
    tau = np.linspace(-1e-12, 1e-12, 257)
    assert np.max(np.abs(fourier_envelope(S, tau, method="quadrature").imag)) < 1e-10


def test_csv_loader(tmp_path):
    sigma = 9.5e12
    omega = np.linspace(-8 * sigma, 8 * sigma, 321)
    p = tmp_path / "spec.csv"
    lines = ["# a gaussian", "offset_rad_s,density"]
    lines += [f"{float(o)!r},{float(d)!r}" for o, d in zip(omega, np.exp(-0.5 * (omega / sigma) ** 2))]
    p.write_text("\n".join(lines) + "\n")
    S = load_spectrum_csv(p, LAM)
    assert S.shape == "tabulated"
    assert coherence_length(S) == pytest.approx(coherence_length(_tabulated_gaussian(sigma, 321)), rel=1e-12)


@pytest.mark.parametrize("kwargs", [
    dict(shape="lorentzian", width=1e13),
    dict(shape="gaussian", width=-1.0),
    dict(shape="gaussian"),
    dict(shape="gaussian", width=1e13, coherence_length=30e-6),
    dict(shape="gaussian", width=1e15),
])
def test_invalid_spectra(kwargs):
    shape = kwargs.pop("shape")
    with pytest.raises(ConfigError):
        make_spectrum(shape, LAM, **kwargs)


def test_invalid_table():
    with pytest.raises(ConfigError):
        make_spectrum("tabulated", LAM, table=([0.0, 2.0, 1.0], [1.0, 1.0, 1.0]))
    with pytest.raises(ConfigError):
        make_spectrum("tabulated", LAM, table=([-1e13, 0.0, 1e13], [1.0, -1.0, 1.0]))


def test_evaluate_spectrum_vectorizes():
    S = make_spectrum("gaussian", LAM, width=1e13)
    assert evaluate_spectrum(S, np.zeros((3, 4))).shape == (3, 4)
