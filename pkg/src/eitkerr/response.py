"""
Macroscopic optical response of the EIT medium.

The mean-field susceptibility is::

    chi = 4 N mu^2 Omega2^2 detuning / (hbar eps0 (Omega1^2 + Omega2^2)^2)

Everything else follows from it: the linear term, group velocity, the
refractive-index change, the field-power series chi^(2k+1) and the
nonlinear refractive coefficients n2, n4, n6. Closed forms are paired with
independent numerical routes (finite differences, contour Taylor fits,
partial sums) so each can be checked against the other.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass
from typing import List, NamedTuple

import numpy as np

from .errors import DegenerateManifold, SeriesRegimeViolation, SeriesRegimeWarning, ValidationError
from .params import practical_units


def susceptibility(rabi_probe_sq, rabi_coupling_sq, detuning, dipole_moment, number_density,
                   constants):
    """
    Susceptibility from squared Rabi frequencies.

    Accepts arrays, and complex ``rabi_probe_sq`` for contour evaluation.
    """
    denom = (rabi_probe_sq + rabi_coupling_sq) ** 2
    if np.any(denom == 0):
        raise DegenerateManifold("Omega1 = Omega2 = 0")
    prefactor = 4.0 * number_density * dipole_moment ** 2 / (constants.hbar * constants.eps0)
    return prefactor * rabi_coupling_sq * detuning / denom


def _chi_at(config, rabi_probe_sq, detuning=None):
    return susceptibility(rabi_probe_sq, config.rabi_coupling ** 2,
                          config.detuning if detuning is None else detuning,
                          config.atom.dipole_moment, config.atom.number_density,
                          config.constants)


def chi(config) -> float:
    """Full susceptibility at the mean photon numbers (dimensionless)."""
    config.check_large_n()
    return float(_chi_at(config, config.rabi_probe ** 2))


def chi1(config) -> float:
    """Linear susceptibility, the Omega1 -> 0 limit of :func:`chi`."""
    k = config.constants
    return (4.0 * config.atom.dipole_moment ** 2 * config.atom.number_density * config.detuning
            / (k.hbar * k.eps0 * config.rabi_coupling ** 2))


def chi1_from_group_velocity(config) -> float:
    """The same linear susceptibility written as detuning * lambda1 / (pi v_g0)."""
    _, vg0 = group_velocity(config)
    return config.detuning * config.atom.probe_wavelength / (math.pi * vg0)


class GroupVelocity(NamedTuple):
    v_g: float
    v_g0: float


def group_velocity(config) -> GroupVelocity:
    """
    Probe group velocity and its lowest-order value, both in m/s.

    ``v_g0 = hbar c eps0 Omega2^2 / (2 omega1 mu^2 N)`` and
    ``v_g = v_g0 (Omega1^2 + Omega2^2)^2 / Omega2^4``.
    """
    k = config.constants
    om2_sq = config.rabi_coupling ** 2
    if om2_sq == 0:
        raise DegenerateManifold("coupling Rabi frequency vanishes")
    vg0 = (k.hbar * k.c * k.eps0 * om2_sq
           / (2.0 * config.probe.angular_frequency * config.atom.dipole_moment ** 2
              * config.atom.number_density))
    vg = vg0 * (config.rabi_probe ** 2 + om2_sq) ** 2 / om2_sq ** 2
    return GroupVelocity(vg, vg0)


def group_velocity_from_dispersion(config, rel_step: float = 1e-3) -> float:
    """
    Group velocity ``c / (1 + (omega1/2) |dchi/d detuning|)`` by central differences.

    The Rabi frequencies are held fixed while the detuning is varied. The
    closed form of :func:`group_velocity` is the ``v_g << c`` limit of this
    expression; the two differ by a relative ``v_g / c``.
    """
    det = config.detuning
    h = rel_step * abs(det) if det != 0 else rel_step * config.rabi_total
    om1_sq = config.rabi_probe ** 2
    slope = (_chi_at(config, om1_sq, det + h) - _chi_at(config, om1_sq, det - h)) / (2.0 * h)
    return config.constants.c / (1.0 + 0.5 * config.probe.angular_frequency * abs(slope))


def refractive_index_change(wavelength: float, detuning: float, group_velocity: float) -> float:
    """Delta n = (lambda / 2 pi) * detuning / v_g."""
    if group_velocity <= 0:
        raise ValidationError("group velocity must be positive")
    return wavelength / (2.0 * math.pi) * detuning / group_velocity


def delta_n(config, lowest_order: bool = False) -> float:
    """Refractive-index change near zero detuning, using v_g (or v_g0)."""
    vg, vg0 = group_velocity(config)
    return refractive_index_change(config.atom.probe_wavelength, config.detuning,
                                   vg0 if lowest_order else vg)


def coherence_largescale(config) -> float:
    """Optical coherence a0 * b0 = 2 Omega1 Omega2^2 detuning / Omega^4 at the mean photon numbers."""
    config.check_large_n()
    om1, om2 = config.rabi_probe, config.rabi_coupling
    omega_sq = om1 ** 2 + om2 ** 2
    if omega_sq == 0:
        raise DegenerateManifold("Omega1 = Omega2 = 0")
    return 2.0 * om1 * om2 ** 2 * config.detuning / omega_sq ** 2


def chi_from_coherence(config, coherence: float) -> float:
    """Invert P = mu N rho21 = eps0 chi E1 with E1 = (per-photon field) * alpha."""
    field = config.probe_field
    if field == 0:
        raise ValidationError("probe field is zero; chi is undefined through the polarization")
    return (config.atom.dipole_moment * config.atom.number_density * coherence
            / (config.constants.eps0 * field))


# ---------------------------------------------------------------------------
# field-power series

def _series_regime(config):
    if abs(config.rabi_probe) >= abs(config.rabi_coupling):
        message = ("Omega1 >= Omega2: the power series in the probe field diverges; "
                   "use chi(config) directly")
        if config.strict:
            raise SeriesRegimeViolation(message)
        warnings.warn(message, SeriesRegimeWarning, stacklevel=3)


def _eps0c_over_intensity(config):
    intensity = config.coupling_intensity
    if intensity <= 0:
        raise DegenerateManifold("coupling intensity vanishes; the series is undefined")
    return config.constants.eps0 * config.constants.c / intensity


def chi_series(config, max_order: int = 3) -> List[float]:
    """
    Coefficients chi^(1), chi^(3), ..., chi^(2k+1) in m^2k/V^2k.

    Up to chi^(7) the recursion chi3 = -4u chi1, chi5 = -3u chi3,
    chi7 = -(8/3)u chi5 (u = eps0 c / I2) is used; higher terms follow the
    general pattern (-1)^k (k+1) (2u)^k chi1.
    """
    if int(max_order) != max_order or max_order < 0:
        raise ValidationError("max_order must be a non-negative integer")
    _series_regime(config)
    u = _eps0c_over_intensity(config)
    base = chi1(config)
    out = [base]
    factors = (-4.0 * u, -3.0 * u, -8.0 / 3.0 * u)
    for k in range(1, max_order + 1):
        if k <= 3:
            out.append(out[-1] * factors[k - 1])
        else:
            out.append((-1) ** k * (k + 1) * (2.0 * u) ** k * base)
    return out


def chi_series_general(config, k: int) -> float:
    """Single term (-1)^k (k+1) (2 eps0 c / I2)^k chi^(1)."""
    u = _eps0c_over_intensity(config)
    return (-1) ** k * (k + 1) * (2.0 * u) ** k * chi1(config)


def series_partial_sums(config, terms: int) -> np.ndarray:
    """Partial sums of sum_k chi^(2k+1) |E1|^2k for k < terms."""
    coeffs = np.array(chi_series(config, terms - 1))
    powers = config.probe_field ** (2 * np.arange(terms))
    return np.cumsum(coeffs * powers)


def taylor_coefficients_numeric(config, count: int = 4, points: int = 64,
                                radius_fraction: float = 0.5) -> np.ndarray:
    """
    Taylor coefficients of chi in s = |E1|^2 extracted numerically.

    chi is sampled with the probe amplitude varied along a circle
    ``|s| = radius_fraction * s_pole`` in the complex s plane (s_pole being
    where Omega1^2 = -Omega2^2) and the coefficients are read off with an
    FFT. No closed-form series knowledge enters.
    """
    if count < 1 or points < 2 * count:
        raise ValidationError("need count >= 1 and points >= 2 * count")
    # Omega1^2 = rabi_per_field_sq * s
    rabi_per_field_sq = (2.0 * config.atom.dipole_moment / config.constants.hbar) ** 2
    s_pole = config.rabi_coupling ** 2 / rabi_per_field_sq
    radius = radius_fraction * s_pole
    theta = 2.0 * np.pi * np.arange(points) / points
    s = radius * np.exp(1j * theta)
    samples = _chi_at(config, rabi_per_field_sq * s)
    coeffs = np.fft.fft(samples) / points
    k = np.arange(count)
    return (coeffs[:count] / radius ** k).real


# ---------------------------------------------------------------------------
# refractive coefficients

@dataclass(frozen=True)
class NonlinearCoefficients:
    """
    Nonlinear susceptibilities and refractive-index coefficients.

    SI fields are in m^2k/V^2k; ``*_practical`` fields in cm^2k/W^k;
    ``r24`` and ``r46`` are n2/n4 and n4/n6 in V^2/m^2, their practical
    forms in W/cm^2.
    """

    chi1: float
    chi3: float
    chi5: float
    chi7: float
    n2: float
    n4: float
    n6: float
    n2_practical: float
    n4_practical: float
    n6_practical: float
    r24: float
    r46: float
    r24_practical: float
    r46_practical: float

    def as_dict(self) -> dict:
        return asdict(self)


def kerr_coefficient_from_vg0(config) -> float:
    """n2 written as -(2 eps0 c detuning / (pi I2)) (lambda1 / v_g0)."""
    _, vg0 = group_velocity(config)
    k = config.constants
    return (-2.0 * k.eps0 * k.c * config.detuning / (math.pi * config.coupling_intensity)
            * config.atom.probe_wavelength / vg0)


def _ratio(num, den):
    # every coefficient vanishes together at resonance
    return num / den if den != 0 else math.nan


def refractive_coeffs(config) -> NonlinearCoefficients:
    """
    n2, n4, n6 from n = 1 + chi/2 and the chi series.

    n2 = -(2u) chi1, n4 = -3u n2, n6 = -(8/3)u n4 with u = eps0 c / I2.
    """
    c1, c3, c5, c7 = chi_series(config, 3)
    u = _eps0c_over_intensity(config)
    n2 = -2.0 * u * c1
    n4 = -3.0 * u * n2
    n6 = -8.0 / 3.0 * u * n4
    k = config.constants
    p2, p4, p6 = (practical_units(v, order, k) for order, v in ((1, n2), (2, n4), (3, n6)))
    return NonlinearCoefficients(
        chi1=c1, chi3=c3, chi5=c5, chi7=c7,
        n2=n2, n4=n4, n6=n6,
        n2_practical=p2, n4_practical=p4, n6_practical=p6,
        r24=_ratio(n2, n4), r46=_ratio(n4, n6),
        r24_practical=_ratio(p2, p4), r46_practical=_ratio(p4, p6))


def coefficient_ratios(config):
    """Closed-form ratios (n2/n4, n4/n6) = (-I2/(3 eps0 c), -3 I2/(8 eps0 c)) in V^2/m^2."""
    u = _eps0c_over_intensity(config)
    return -1.0 / (3.0 * u), -3.0 / (8.0 * u)


# ---------------------------------------------------------------------------
# flat report

@dataclass(frozen=True)
class SusceptibilityReport:
    chi: float
    chi1: float
    group_velocity: float
    group_velocity_lowest_order: float
    delta_n: float

    def as_dict(self) -> dict:
        return asdict(self)


def susceptibility_report(config) -> SusceptibilityReport:
    vg, vg0 = group_velocity(config)
    return SusceptibilityReport(chi(config), chi1(config), vg, vg0, delta_n(config))


def response_report(config) -> dict:
    """Every response quantity of ``config`` as one flat record."""
    config.check_detuning_ratio()
    out = susceptibility_report(config).as_dict()
    out["rabi_ratio_sq"] = config.rabi_ratio_sq
    out["coherence_largescale"] = coherence_largescale(config)
    out["delta_n_lowest_order"] = delta_n(config, lowest_order=True)
    out.update(refractive_coeffs(config).as_dict())
    return out
