import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.constants import c

from qoctsim.errors import ConfigError
from qoctsim.sample import (ConstantIndex, Interface, Layer, MediumSegment, OpticalStack,
                            TabulatedDispersion, TaylorDispersion, beta, load_dispersion_csv, mirror,
                            round_trip_phase, slab, transfer_function, transfer_values)

OMEGA0 = 2 * math.pi * c / 812e-9

reflections = st.floats(min_value=0.05, max_value=0.3)
indices = st.floats(min_value=1.2, max_value=2.5)
thicknesses = st.floats(min_value=20e-6, max_value=300e-6)


def test_silica_round_trip_phase_value():
    # [DERIVED] 2 n L omega0 / c for n = 1.5, L = 90 um at 812 nm, about 2089 rad.
    stack = slab(0.2, 0.2, 1.5, 90e-6)
    phi = round_trip_phase(stack, 1, OMEGA0)
    assert phi == pytest.approx(2 * 1.5 * 90e-6 * OMEGA0 / c, rel=1e-14)
    assert phi == pytest.approx(2089.0, abs=1.0)


@given(n=indices, L=thicknesses, w=st.floats(min_value=1e15, max_value=4e15))
@settings(max_examples=50, deadline=None)
def test_constant_index_phase(n, L, w):
    assert round_trip_phase(slab(0.1, 0.1, n, L), 1, w) == pytest.approx(2 * n * L * w / c, rel=1e-13)


def test_zero_thickness_adds_no_phase():
    law = TaylorDispersion(OMEGA0, beta0=1e7, beta1=5e-9, beta2=5e-25)
    stack = OpticalStack((Layer(MediumSegment(0.0, law), Interface(0.3)),))
    w = OMEGA0 + np.linspace(-5e13, 5e13, 11)
    np.testing.assert_array_equal(round_trip_phase(stack, 0, w), 0.0)
    np.testing.assert_allclose(transfer_values(stack, w), 0.3)


def test_taylor_at_reference_is_beta0():
    law = TaylorDispersion(OMEGA0, beta0=1.23e7, beta1=5e-9, beta2=5e-25, beta3=1e-40)
    stack = OpticalStack((Layer(MediumSegment(2e-3, law), Interface(0.1)),))
    assert round_trip_phase(stack, 0, OMEGA0) == pytest.approx(2 * 1.23e7 * 2e-3, rel=1e-15)


def test_quadratic_term_value_and_scaling():
    # [DERIVED] beta2 * W^2 = 5e-25 * (1e13)^2 = 50 rad/m; five times the offset gives 25 times the term.
    law = TaylorDispersion(OMEGA0, beta2=5e-25)
    assert beta(law, OMEGA0 + 1e13) == pytest.approx(50.0, rel=1e-12)
    assert beta(law, OMEGA0 + 5e12) / beta(law, OMEGA0 + 1e12) == pytest.approx(25.0, rel=1e-9)


def test_taylor_group_delay():
    law = TaylorDispersion(OMEGA0, beta1=5e-9, beta2=5e-25, beta3=1e-40)
    w = 3e12
    assert law.group_delay(OMEGA0 + w) == pytest.approx(5e-9 + 2 * 5e-25 * w + 3 * 1e-40 * w * w)


@given(r1=reflections, r2=reflections, n=indices, L=thicknesses)
@settings(max_examples=50, deadline=None)
def test_two_interface_reduction(r1, r2, n, L):
    w = OMEGA0 + np.linspace(-4e13, 4e13, 65)
    h = transfer_values(slab(r1, r2, n, L), w)
    phase = 2 * n * L * w / c
    expect = r1 + r2 * np.exp(1j * phase)
    # Phases reach thousands of radians, so rounding sets the floor.
    assert np.max(np.abs(h - expect)) < max(1e-12, 8 * np.finfo(float).eps * phase.max())


@given(b2=st.floats(min_value=-1e-24, max_value=1e-24), b3=st.floats(min_value=-1e-39, max_value=1e-39),
       d=st.floats(min_value=0.0, max_value=2e-2))
@settings(max_examples=50, deadline=None)
def test_lossless_overburden_is_a_phase_screen(b2, b3, d):
    seg = MediumSegment(d, TaylorDispersion(OMEGA0, beta0=1e7, beta1=5e-9, beta2=b2, beta3=b3))
    stack = mirror().buried_under([seg])
    H = transfer_function(stack, OMEGA0, np.linspace(-5e13, 5e13, 129))
    np.testing.assert_allclose(np.abs(H.values), 1.0, rtol=0, atol=1e-12)


@given(b1=st.floats(min_value=0, max_value=1e-8), b2=st.floats(min_value=-1e-24, max_value=1e-24),
       d=st.floats(min_value=1e-4, max_value=2e-2))
@settings(max_examples=50, deadline=None)
def test_even_orders_drop_out_of_mirrored_product(b1, b2, d):
    # H(w0+W) H*(w0-W) keeps only the odd part of the overburden phase.
    seg = MediumSegment(d, TaylorDispersion(OMEGA0, beta0=3e6, beta1=b1, beta2=b2))
    H = transfer_function(mirror().buried_under([seg]), OMEGA0, np.linspace(-5e13, 5e13, 129))
    product = H.values * np.conj(H.mirrored())
    expect = np.exp(2j * d * 2 * b1 * H.offsets)
    np.testing.assert_allclose(product, expect, rtol=0, atol=1e-9)


def test_transfer_function_mirrored_is_reflection_about_center():
    stack = slab(0.2, 0.2, 1.5, 90e-6)
    offsets = np.linspace(-4e13, 4e13, 101)
    H = transfer_function(stack, OMEGA0, offsets)
    np.testing.assert_allclose(H.mirrored(), transfer_values(stack, OMEGA0 - offsets), rtol=1e-13)


def test_group_delays():
    stack = slab(0.2, 0.2, 1.5, 90e-6)
    np.testing.assert_allclose(stack.group_delays(OMEGA0), [0.0, 2 * 1.5 * 90e-6 / c])


def test_buried_under_prepends_dark_segments():
    seg = MediumSegment(5e-3, TaylorDispersion(OMEGA0, beta2=5e-25))
    stack = slab(0.2, 0.2, 1.5, 90e-6).buried_under([seg, seg], "buried")
    assert stack.name == "buried"
    np.testing.assert_array_equal(stack.reflectances, [0, 0, 0.2, 0.2])


def test_tabulated_dispersion(tmp_path):
    om = np.linspace(2.0e15, 2.6e15, 61)
    p = tmp_path / "disp.csv"
    p.write_text("omega,beta\n" + "".join(f"{float(o)!r},{1.5 * float(o) / c!r}\n" for o in om))
    law = load_dispersion_csv(p)
    w = np.linspace(2.1e15, 2.5e15, 7)
    np.testing.assert_allclose(beta(law, w), ConstantIndex(1.5).beta(w), rtol=1e-12)
    with pytest.raises(ConfigError):
        law.beta(1.9e15)


@pytest.mark.parametrize("build", [
    lambda: ConstantIndex(0.9),
    lambda: MediumSegment(-1e-6, ConstantIndex(1.5)),
    lambda: Interface(1.2),
    lambda: OpticalStack((Layer(None, Interface(0.0)),)),
    lambda: TaylorDispersion(-1.0),
    lambda: TabulatedDispersion([2.0, 1.0], [0.0, 0.0]),
    lambda: beta(ConstantIndex(1.5), 0.0),
])
def test_invalid_inputs(build):
    with pytest.raises(ConfigError):
        build()


def test_strong_reflectors_warn():
    with pytest.warns(UserWarning):
        stack = slab(0.5, 0.5, 1.5, 90e-6)
    assert stack.notes


def test_lone_mirror_does_not_warn(recwarn):
    mirror(1.0)
    assert not recwarn.list


def test_dispersion_csv_rejects_garbage_rows(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("omega,beta\nnot,numbers\n2e15,1e7\n")
    with pytest.raises(ConfigError):
        load_dispersion_csv(p)
