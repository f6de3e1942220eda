import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import constants as sc

from eitkerr import response as rs
from eitkerr.errors import SeriesRegimeViolation, SeriesRegimeWarning, ValidationError
from eitkerr.params import practical_units
from eitkerr.presets import slow_light_config

EPS0C = sc.epsilon_0 * sc.c


def _with_x(x, **kw):
    """Slow-light configuration with (Omega1/Omega2)^2 equal to x."""
    base = slow_light_config(**kw)
    ratio = base.rabi_ratio_sq / base.probe.coherent_amplitude ** 2
    return base.with_updates(probe={"coherent_amplitude": math.sqrt(x / ratio)})


# --- hand-arithmetic oracle for the slow-light numbers ----------------------
# n2 = -2 eps0 c detuning lambda / (pi I2 v_g0), n4 = -3 u n2, n6 = -(8/3) u n4,
# u = eps0 c / I2; only scipy constants and the stated inputs enter.

I2, DET, LAM, VG0 = 400.0, 1.3e6, 589e-9, 17.0
U = EPS0C / I2
N2 = -2 * EPS0C * DET * LAM / (math.pi * I2 * VG0)
N4 = -3 * U * N2
N6 = -8 / 3 * U * N4


def test_slow_light_coefficients_match_hand_arithmetic(slow):
    c = rs.refractive_coeffs(slow)
    assert c.n2 == pytest.approx(N2, rel=1e-9)
    assert c.n4 == pytest.approx(N4, rel=1e-9)
    assert c.n6 == pytest.approx(N6, rel=1e-9)
    assert c.n2_practical == pytest.approx(N2 * 1e4 / (2 * EPS0C), rel=1e-9)
    assert c.n6_practical == pytest.approx(N6 * 1e12 / (2 * EPS0C) ** 3, rel=1e-9)
    assert c.r24 == pytest.approx(-I2 / (3 * EPS0C), rel=1e-9)
    assert c.r46 == pytest.approx(-3 * I2 / (8 * EPS0C), rel=1e-9)


def test_slow_light_group_velocity(slow):
    vg, vg0 = rs.group_velocity(slow)
    assert vg0 == pytest.approx(VG0, rel=1e-12)
    assert vg / vg0 == pytest.approx((1 + slow.rabi_ratio_sq) ** 2, rel=1e-12)
    assert rs.delta_n(slow, lowest_order=True) == pytest.approx(LAM * DET / (2 * math.pi * VG0), rel=1e-12)
    assert rs.delta_n(slow) < rs.delta_n(slow, lowest_order=True)


def test_frozen_slow_light_values(slow):
    # recorded from the hand-arithmetic oracle above; guards against drift
    rep = rs.response_report(slow)
    assert rep["delta_n"] == pytest.approx(7.16709238782036e-3, rel=1e-9)
    assert rep["n2"] == pytest.approx(-1.9028269355476117e-07, rel=1e-9)
    assert rep["n4_practical"] == pytest.approx(13.440986021190916, rel=1e-9)
    assert rep["r24_practical"] == pytest.approx(-0.02666666666666666, rel=1e-9)


def test_chi1_two_routes_agree(slow):
    assert rs.chi1(slow) == pytest.approx(rs.chi1_from_group_velocity(slow), rel=1e-12)
    assert rs.refractive_coeffs(slow).n2 == pytest.approx(rs.kerr_coefficient_from_vg0(slow), rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.floats(1e-4, 3.0))
def test_chi_saturation_law(x):
    cfg = _with_x(x)
    assert cfg.rabi_ratio_sq == pytest.approx(x, rel=1e-10)
    assert rs.chi(cfg) == pytest.approx(rs.chi1(cfg) / (1 + x) ** 2, rel=1e-12)


def test_chi_odd_in_detuning(slow):
    flipped = slow.with_updates(atom={"probe_detuning": -slow.detuning})
    assert rs.chi(flipped) == pytest.approx(-rs.chi(slow), rel=1e-15)
    assert rs.chi(slow.with_updates(atom={"probe_detuning": 0.0})) == 0.0


def test_chi_from_coherence_inverts_polarization(slow):
    assert rs.chi_from_coherence(slow, rs.coherence_largescale(slow)) == pytest.approx(rs.chi(slow), rel=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.0, 2.0))
def test_group_velocity_two_routes(x):
    cfg = _with_x(x) if x > 0 else slow_light_config(probe_fraction=0.0)
    vg, vg0 = rs.group_velocity(cfg)
    fd = rs.group_velocity_from_dispersion(cfg)
    # the closed form drops a relative v_g/c
    assert fd == pytest.approx(vg * sc.c / (vg + sc.c), rel=1e-9)
    assert vg / vg0 == pytest.approx((1 + cfg.rabi_ratio_sq) ** 2, rel=1e-12)


def test_refractive_index_change_validation():
    with pytest.raises(ValidationError):
        rs.refractive_index_change(589e-9, 1e6, 0.0)


def test_series_recursion_and_general_term(slow):
    c = rs.chi_series(slow, 6)
    u = rs._eps0c_over_intensity(slow)
    assert c[1] / c[0] == pytest.approx(-4 * u, rel=1e-14)
    assert c[2] / c[1] == pytest.approx(-3 * u, rel=1e-14)
    assert c[3] / c[2] == pytest.approx(-8 / 3 * u, rel=1e-14)
    for k in range(7):
        assert c[k] == pytest.approx(rs.chi_series_general(slow, k), rel=1e-13)


def test_series_regime_guard():
    cfg = _with_x(2.0)
    with pytest.warns(SeriesRegimeWarning):
        rs.chi_series(cfg)
    with pytest.raises(SeriesRegimeViolation):
        rs.chi_series(cfg.with_updates(strict=True))
    with pytest.raises(ValidationError):
        rs.chi_series(slow_light_config(), -1)


def test_contour_taylor_matches_series(slow):
    numeric = rs.taylor_coefficients_numeric(slow, count=4)
    closed = rs.chi_series(slow, 3)
    np.testing.assert_allclose(numeric, closed, rtol=1e-6)


def test_partial_sums_converge():
    cfg = _with_x(0.5)
    sums = rs.series_partial_sums(cfg, 60)
    assert sums[-1] == pytest.approx(rs.chi(cfg), rel=1e-8)
    err = np.abs(sums - rs.chi(cfg))
    assert err[40] < err[20] < err[5]


def test_ratios_undefined_at_resonance(slow):
    c = rs.refractive_coeffs(slow.with_updates(atom={"probe_detuning": 0.0}))
    assert c.n2 == 0.0 and math.isnan(c.r24) and math.isnan(c.r46_practical)


def test_practical_fields_consistent(slow):
    c = rs.refractive_coeffs(slow)
    assert c.n4_practical == pytest.approx(practical_units(c.n4, 2), rel=1e-15)
    assert c.r46_practical == pytest.approx(c.n4_practical / c.n6_practical, rel=1e-15)


def test_response_report_is_flat(slow):
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        rep = rs.response_report(slow)
    assert all(isinstance(v, float) for v in rep.values())
    assert {"chi", "group_velocity", "n2", "n6_practical"} <= set(rep)


def test_refractive_coefficients_are_half_the_susceptibilities(slow):
    c = rs.refractive_coeffs(slow)
    for n, chi in ((c.n2, c.chi3), (c.n4, c.chi5), (c.n6, c.chi7)):
        assert n / chi == pytest.approx(0.5, rel=1e-10)


def test_sign_alternation(slow):
    c = rs.refractive_coeffs(slow)
    assert c.chi1 > 0 > c.chi3 and c.chi5 > 0 > c.chi7
    assert c.n2 < 0 < c.n4 and c.n6 < 0


@settings(max_examples=20, deadline=None)
@given(st.one_of(st.just(0.0), st.floats(1e-6, 1.0)))
def test_group_velocity_bounded_below(x):
    cfg = _with_x(x) if x > 0 else slow_light_config(probe_fraction=0.0)
    vg, vg0 = rs.group_velocity(cfg)
    assert vg > 0
    assert (vg == vg0) == (cfg.rabi_probe == 0) and vg >= vg0
