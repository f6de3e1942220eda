"""
Ready-made configurations.

:func:`slow_light_config` rebuilds the sodium slow-light conditions (589 nm
probe, 1.3e6 rad/s detuning, 40 mW/cm^2 coupling, 17 m/s group velocity).
The dipole moment, atom density and quantization volume are not all
known, but every reported number depends on them only through
``mu^2 N / Omega2^2``, which is fixed by inverting the lowest-order group
velocity. :func:`config_from_couplings` builds test systems directly from
target coupling constants.
"""

from __future__ import annotations

import math

from .params import (
    CODATA,
    AtomMediumSpec,
    Constants,
    LaserSpec,
    SystemConfig,
    amplitude_from_intensity,
    build_config,
    per_photon_field,
)

SODIUM_D2_WAVELENGTH = 589e-9
SODIUM_GROUND_SPLITTING = 2.0 * math.pi * 1.7716e9  # rad/s, 3S1/2 F=1 <-> F=2

# values quoted for the slow-light conditions
PAPER_VALUES = {
    "delta_n": 7.2e-3,
    "n2": -1.9e-7,
    "n4": 3.8e-12,
    "n6": -6.7e-17,
    "n2_practical": -0.36,
    "n4_practical": 13.0,
    "n6_practical": 4.5e2,
    "abs_r24_practical": 1e-2,
}


def slow_light_config(coupling_intensity: float = 400.0, detuning: float = 1.3e6,
                      wavelength: float = SODIUM_D2_WAVELENGTH, vg0: float = 17.0,
                      dipole_moment: float = 2.1e-29, quantization_volume: float = 1e-3,
                      probe_fraction: float = 1e-4,
                      ground_splitting: float = SODIUM_GROUND_SPLITTING,
                      constants: Constants = CODATA, **options) -> SystemConfig:
    """
    Configuration reproducing the slow-light experiment.

    Parameters
    ----------
    coupling_intensity : float
        I2 in W/m^2 (40 mW/cm^2 = 400 W/m^2).
    detuning : float
        Probe detuning in rad/s.
    wavelength : float
        Probe wavelength in m.
    vg0 : float
        Lowest-order group velocity in m/s; the atom density is solved for it.
    dipole_moment, quantization_volume : float
        Free choices; no reported quantity depends on them.
    probe_fraction : float
        Probe intensity as a fraction of ``coupling_intensity``; sets
        (Omega1/Omega2)^2 to about this value.
    """
    omega1 = 2.0 * math.pi * constants.c / wavelength
    omega2 = omega1 - ground_splitting
    e1 = per_photon_field(omega1, quantization_volume, constants)
    e2 = per_photon_field(omega2, quantization_volume, constants)
    beta = amplitude_from_intensity(e2, coupling_intensity, constants)
    alpha = amplitude_from_intensity(e1, probe_fraction * coupling_intensity, constants)
    rabi_coupling = 2.0 * dipole_moment * e2 * math.sqrt(beta ** 2 + 1.0) / constants.hbar
    density = (constants.hbar * constants.c * constants.eps0 * rabi_coupling ** 2
               / (2.0 * omega1 * dipole_moment ** 2 * vg0))
    return build_config(
        AtomMediumSpec(dipole_moment, density, wavelength, detuning),
        LaserSpec(omega1, quantization_volume, alpha),
        LaserSpec(omega2, quantization_volume, beta),
        constants=constants, **options)


def config_from_couplings(g1: float, g2: float, nbar_probe: float, nbar_coupling: float,
                          detuning: float = 0.0, dipole_moment: float = 1e-29,
                          number_density: float = 1e18,
                          wavelength: float = SODIUM_D2_WAVELENGTH,
                          constants: Constants = CODATA, **options) -> SystemConfig:
    """
    Configuration with prescribed coupling constants g1, g2 (rad/s).

    The quantization volumes are solved so that mu * E_i / hbar = g_i.
    Both modes share the probe frequency.
    """
    omega = 2.0 * math.pi * constants.c / wavelength

    def volume(g):
        field = constants.hbar * g / dipole_moment
        return constants.hbar * omega / (2.0 * constants.eps0 * field ** 2)

    return build_config(
        AtomMediumSpec(dipole_moment, number_density, wavelength, detuning),
        LaserSpec(omega, volume(g1), math.sqrt(nbar_probe)),
        LaserSpec(omega, volume(g2), math.sqrt(nbar_coupling)),
        constants=constants, **options)
