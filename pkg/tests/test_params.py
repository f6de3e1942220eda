import math

import pytest
from hypothesis import given, strategies as st

from eitkerr.errors import (
    DetuningRatioViolation,
    DetuningRatioWarning,
    LargeNViolation,
    LargeNWarning,
    UnsupportedOrder,
    ValidationError,
)
from eitkerr.params import (
    CODATA,
    AtomMediumSpec,
    LaserSpec,
    amplitude_from_intensity,
    build_config,
    from_practical_units,
    intensity_from_amplitude,
    per_photon_field,
    practical_units,
)


def _laser(amplitude=10.0, omega=3.2e15, volume=1e-3):
    return LaserSpec(omega, volume, amplitude)


def _atom(detuning=0.0):
    return AtomMediumSpec(2e-29, 1e18, 2 * math.pi * CODATA.c / 3.2e15, detuning)


@pytest.mark.parametrize("field", ["dipole_moment", "number_density", "probe_wavelength"])
@pytest.mark.parametrize("bad", [0.0, -1.0, math.nan, math.inf])
def test_atom_rejects_nonpositive(field, bad):
    kwargs = dict(dipole_moment=1e-29, number_density=1e18, probe_wavelength=589e-9,
                  probe_detuning=0.0)
    kwargs[field] = bad
    with pytest.raises(ValidationError):
        AtomMediumSpec(**kwargs)


def test_laser_rejects_negative_amplitude():
    with pytest.raises(ValidationError):
        _laser(amplitude=-1.0)
    with pytest.raises(ValidationError):
        _laser(omega=0.0)
    assert _laser(amplitude=3.0).mean_photon_number == 9.0


def test_per_photon_field_formula():
    e = per_photon_field(3.2e15, 1e-3)
    assert e == pytest.approx(math.sqrt(CODATA.hbar * 3.2e15 / (2 * CODATA.eps0 * 1e-3)), rel=1e-15)


@given(st.floats(1e-6, 1e3), st.floats(0.0, 1e8))
def test_intensity_amplitude_roundtrip(field, amplitude):
    intensity = intensity_from_amplitude(field, amplitude)
    assert amplitude_from_intensity(field, intensity) == pytest.approx(amplitude, rel=1e-12, abs=1e-12)


def test_practical_units_known_value():
    # 2 eps0 c = 5.3088e-3 W/V^2; m^2/V^2 -> cm^2/W multiplies by 1e4 / (2 eps0 c)
    k = 2 * CODATA.eps0 * CODATA.c
    assert practical_units(1.0, 1) == pytest.approx(1e4 / k, rel=1e-15)
    assert practical_units(1.0, 3) == pytest.approx(1e12 / k ** 3, rel=1e-15)


@given(st.floats(-1e3, 1e3, allow_nan=False), st.sampled_from([1, 2, 3]))
def test_practical_units_roundtrip(value, order):
    back = from_practical_units(practical_units(value, order), order)
    assert back == pytest.approx(value, rel=1e-12, abs=1e-300)


@pytest.mark.parametrize("order", [0, 4, 1.5])
def test_practical_units_bad_order(order):
    with pytest.raises(UnsupportedOrder):
        practical_units(1.0, order)


def test_build_config_derived_fields():
    cfg = build_config(_atom(), _laser(30.0), _laser(40.0))
    e = per_photon_field(3.2e15, 1e-3)
    assert cfg.g1 == pytest.approx(2e-29 * e / CODATA.hbar, rel=1e-14)
    assert cfg.rabi_probe == pytest.approx(2 * cfg.g1 * 30.0, rel=1e-14)
    assert cfg.rabi_coupling == pytest.approx(2 * cfg.g2 * math.sqrt(40.0 ** 2 + 1), rel=1e-14)
    assert cfg.rabi_total == pytest.approx(math.hypot(cfg.rabi_probe, cfg.rabi_coupling))
    assert cfg.nbar_probe == pytest.approx(900.0)
    assert cfg.coupling_intensity == pytest.approx(intensity_from_amplitude(e, 40.0))
    assert cfg.rabi_ratio_sq == pytest.approx((cfg.rabi_probe / cfg.rabi_coupling) ** 2)


def test_build_config_checks_wavelength_consistency():
    atom = AtomMediumSpec(2e-29, 1e18, 500e-9, 0.0)
    with pytest.raises(ValidationError):
        build_config(atom, _laser(), _laser())


def test_large_n_warns_then_raises():
    cfg = build_config(_atom(), _laser(5.0), _laser(40.0))
    with pytest.warns(LargeNWarning):
        cfg.check_large_n()
    with pytest.raises(LargeNViolation):
        cfg.with_updates(strict=True).check_large_n()


def test_detuning_ratio_warns_then_raises():
    cfg = build_config(_atom(), _laser(40.0), _laser(40.0))
    big = cfg.with_updates(atom={"probe_detuning": cfg.rabi_total})
    with pytest.warns(DetuningRatioWarning):
        big.check_detuning_ratio()
    with pytest.raises(DetuningRatioViolation):
        big.with_updates(strict=True).check_detuning_ratio()


def test_with_updates_keeps_other_fields():
    cfg = build_config(_atom(), _laser(40.0), _laser(50.0))
    new = cfg.with_updates(probe={"coherent_amplitude": 20.0})
    assert new.probe.coherent_amplitude == 20.0
    assert new.coupling == cfg.coupling and new.atom == cfg.atom
    assert new.g1 == cfg.g1


def test_as_dict_is_flat_and_si():
    cfg = build_config(_atom(), _laser(40.0), _laser(50.0))
    d = cfg.as_dict()
    assert all(isinstance(v, (float, int, bool)) for v in d.values())
    assert d["g1_rad_per_s"] == cfg.g1
