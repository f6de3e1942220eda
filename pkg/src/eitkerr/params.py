"""
Physical constants, laser/medium specifications and derived quantities.

Everything in this module is SI. Practical units (cm, W) only appear in
:func:`practical_units` and its inverse, which sit at the presentation
boundary.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Optional

import scipy.constants as sc

from .errors import (
    DetuningRatioViolation,
    DetuningRatioWarning,
    LargeNViolation,
    LargeNWarning,
    UnsupportedOrder,
    ValidationError,
)

__all__ = [
    "Constants",
    "CODATA",
    "AtomMediumSpec",
    "LaserSpec",
    "SystemConfig",
    "build_config",
    "per_photon_field",
    "intensity_from_amplitude",
    "amplitude_from_intensity",
    "practical_units",
    "from_practical_units",
]


@dataclass(frozen=True)
class Constants:
    hbar: float = sc.hbar
    eps0: float = sc.epsilon_0
    c: float = sc.c


CODATA = Constants()


@dataclass(frozen=True)
class AtomMediumSpec:
    """
    Atomic medium and probe-transition data.

    Parameters
    ----------
    dipole_moment : float
        Transition dipole moment in C m, shared by both transitions.
    number_density : float
        Atoms per m^3.
    probe_wavelength : float
        Probe wavelength in m.
    probe_detuning : float
        Probe detuning in rad/s.
    """

    dipole_moment: float
    number_density: float
    probe_wavelength: float
    probe_detuning: float

    def __post_init__(self):
        for name in ("dipole_moment", "number_density", "probe_wavelength"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValidationError(f"{name} must be positive and finite, got {value!r}")
        if not math.isfinite(self.probe_detuning):
            raise ValidationError("probe_detuning must be finite")


@dataclass(frozen=True)
class LaserSpec:
    """A single quantized laser mode prepared in a real coherent state."""

    angular_frequency: float
    quantization_volume: float
    coherent_amplitude: float

    def __post_init__(self):
        if not (math.isfinite(self.angular_frequency) and self.angular_frequency > 0):
            raise ValidationError("angular_frequency must be positive")
        if not (math.isfinite(self.quantization_volume) and self.quantization_volume > 0):
            raise ValidationError("quantization_volume must be positive")
        if not (math.isfinite(self.coherent_amplitude) and self.coherent_amplitude >= 0):
            raise ValidationError(
                f"coherent_amplitude must be real and >= 0, got {self.coherent_amplitude!r}")

    @property
    def mean_photon_number(self) -> float:
        return self.coherent_amplitude ** 2


def per_photon_field(angular_frequency: float, quantization_volume: float,
                     constants: Constants = CODATA) -> float:
    """Single-photon field amplitude sqrt(hbar*omega / (2*eps0*V)) in V/m."""
    return math.sqrt(constants.hbar * angular_frequency
                     / (2.0 * constants.eps0 * quantization_volume))


def intensity_from_amplitude(per_photon_field: float, amplitude: float,
                             constants: Constants = CODATA) -> float:
    """Intensity 2*eps0*c*E^2*amplitude^2 in W/m^2 of a coherent mode."""
    if per_photon_field < 0 or amplitude < 0:
        raise ValidationError("per-photon field and amplitude must be >= 0")
    return 2.0 * constants.eps0 * constants.c * per_photon_field ** 2 * amplitude ** 2


def amplitude_from_intensity(per_photon_field: float, intensity: float,
                             constants: Constants = CODATA) -> float:
    """Inverse of :func:`intensity_from_amplitude`."""
    if per_photon_field <= 0 or intensity < 0:
        raise ValidationError("need per_photon_field > 0 and intensity >= 0")
    return math.sqrt(intensity / (2.0 * constants.eps0 * constants.c)) / per_photon_field


def _check_order(order):
    if order not in (1, 2, 3):
        raise UnsupportedOrder(f"order must be 1, 2 or 3, got {order!r}")


def practical_units(value: float, order: int, constants: Constants = CODATA) -> float:
    """
    Convert a field-power coefficient in m^2k/V^2k to cm^2k/W^k.

    The coefficient multiplies |E|^2k; with I = 2*eps0*c*|E|^2 it becomes a
    coefficient of I^k, then metres are turned into centimetres.
    """
    _check_order(order)
    per_intensity = value / (2.0 * constants.eps0 * constants.c) ** order
    return per_intensity * 1e4 ** order


def from_practical_units(value: float, order: int, constants: Constants = CODATA) -> float:
    _check_order(order)
    return value / 1e4 ** order * (2.0 * constants.eps0 * constants.c) ** order


@dataclass(frozen=True)
class SystemConfig:
    """
    Fully resolved system: inputs plus every derived SI quantity.

    Build with :func:`build_config`; the derived fields are never set by hand.
    """

    constants: Constants
    atom: AtomMediumSpec
    probe: LaserSpec
    coupling: LaserSpec
    per_photon_field_1: float
    per_photon_field_2: float
    g1: float
    g2: float
    rabi_probe: float
    rabi_coupling: float
    coupling_intensity: float
    strict: bool = False
    large_n_floor: float = 1e3
    detuning_ratio_max: float = 0.1

    @property
    def detuning(self) -> float:
        return self.atom.probe_detuning

    @property
    def rabi_total(self) -> float:
        return math.hypot(self.rabi_probe, self.rabi_coupling)

    @property
    def nbar_probe(self) -> float:
        return self.probe.mean_photon_number

    @property
    def nbar_coupling(self) -> float:
        return self.coupling.mean_photon_number

    @property
    def probe_field(self) -> float:
        """Mean probe field amplitude E1 = per-photon field * alpha, in V/m."""
        return self.per_photon_field_1 * self.probe.coherent_amplitude

    @property
    def probe_intensity(self) -> float:
        return intensity_from_amplitude(self.per_photon_field_1,
                                        self.probe.coherent_amplitude, self.constants)

    @property
    def rabi_ratio_sq(self) -> float:
        """x = (Omega1/Omega2)^2, the expansion variable of the susceptibility."""
        return (self.rabi_probe / self.rabi_coupling) ** 2

    def _complain(self, message, error, warning):
        if self.strict:
            raise error(message)
        warnings.warn(message, warning, stacklevel=3)

    def check_large_n(self):
        """Flag mean photon numbers below the large-n floor."""
        for name, nbar in (("probe", self.nbar_probe), ("coupling", self.nbar_coupling)):
            if nbar < self.large_n_floor:
                self._complain(
                    f"{name} mean photon number {nbar:.3g} below large-n floor "
                    f"{self.large_n_floor:.3g}", LargeNViolation, LargeNWarning)

    def check_detuning_ratio(self):
        """Flag |detuning|/Omega above the perturbative ceiling."""
        ratio = abs(self.detuning) / self.rabi_total
        if ratio > self.detuning_ratio_max:
            self._complain(
                f"|detuning|/Omega = {ratio:.3g} exceeds {self.detuning_ratio_max:.3g}",
                DetuningRatioViolation, DetuningRatioWarning)

    def with_updates(self, *, atom: Optional[dict] = None, probe: Optional[dict] = None,
                     coupling: Optional[dict] = None, **options) -> "SystemConfig":
        """Rebuild with selected input fields replaced."""
        return build_config(
            replace(self.atom, **(atom or {})),
            replace(self.probe, **(probe or {})),
            replace(self.coupling, **(coupling or {})),
            constants=options.pop("constants", self.constants),
            strict=options.pop("strict", self.strict),
            large_n_floor=options.pop("large_n_floor", self.large_n_floor),
            detuning_ratio_max=options.pop("detuning_ratio_max", self.detuning_ratio_max),
        )

    def as_dict(self) -> dict:
        """Flat record of every resolved SI parameter."""
        return {
            "hbar_J_s": self.constants.hbar,
            "eps0_F_per_m": self.constants.eps0,
            "c_m_per_s": self.constants.c,
            "dipole_moment_C_m": self.atom.dipole_moment,
            "number_density_per_m3": self.atom.number_density,
            "probe_wavelength_m": self.atom.probe_wavelength,
            "probe_detuning_rad_per_s": self.atom.probe_detuning,
            "probe_angular_frequency_rad_per_s": self.probe.angular_frequency,
            "probe_quantization_volume_m3": self.probe.quantization_volume,
            "probe_coherent_amplitude": self.probe.coherent_amplitude,
            "coupling_angular_frequency_rad_per_s": self.coupling.angular_frequency,
            "coupling_quantization_volume_m3": self.coupling.quantization_volume,
            "coupling_coherent_amplitude": self.coupling.coherent_amplitude,
            "per_photon_field_1_V_per_m": self.per_photon_field_1,
            "per_photon_field_2_V_per_m": self.per_photon_field_2,
            "g1_rad_per_s": self.g1,
            "g2_rad_per_s": self.g2,
            "rabi_probe_rad_per_s": self.rabi_probe,
            "rabi_coupling_rad_per_s": self.rabi_coupling,
            "coupling_intensity_W_per_m2": self.coupling_intensity,
            "strict": self.strict,
            "large_n_floor": self.large_n_floor,
            "detuning_ratio_max": self.detuning_ratio_max,
        }


# probe_wavelength and the probe angular frequency are given independently;
# they may differ by the detuning but not by more than this.
_WAVELENGTH_TOLERANCE = 1e-3


def build_config(atom: AtomMediumSpec, probe: LaserSpec, coupling: LaserSpec, *,
                 constants: Constants = CODATA, strict: bool = False,
                 large_n_floor: float = 1e3,
                 detuning_ratio_max: float = 0.1) -> SystemConfig:
    """
    Resolve the derived quantities of a two-mode Lambda system.

    Coupling constants are g_i = mu * E_i / hbar with E_i the per-photon
    field, mean Rabi frequencies are ``2 g1 sqrt(nbar_alpha)`` and
    ``2 g2 sqrt(nbar_beta + 1)``, and the coupling intensity is
    ``2 eps0 c E_2^2 beta^2``.

    Raises
    ------
    ValidationError
        If any input invariant is violated.
    """
    if large_n_floor < 0 or detuning_ratio_max <= 0:
        raise ValidationError("large_n_floor must be >= 0 and detuning_ratio_max > 0")
    omega_from_wavelength = 2.0 * math.pi * constants.c / atom.probe_wavelength
    mismatch = abs(probe.angular_frequency - omega_from_wavelength) / omega_from_wavelength
    if mismatch > _WAVELENGTH_TOLERANCE:
        raise ValidationError(
            f"probe angular frequency {probe.angular_frequency:.6g} rad/s is inconsistent "
            f"with probe_wavelength {atom.probe_wavelength:.6g} m")

    e1 = per_photon_field(probe.angular_frequency, probe.quantization_volume, constants)
    e2 = per_photon_field(coupling.angular_frequency, coupling.quantization_volume, constants)
    g1 = atom.dipole_moment * e1 / constants.hbar
    g2 = atom.dipole_moment * e2 / constants.hbar
    rabi_probe = 2.0 * g1 * math.sqrt(probe.mean_photon_number)
    rabi_coupling = 2.0 * g2 * math.sqrt(coupling.mean_photon_number + 1.0)
    if not rabi_coupling > 0:
        raise ValidationError("coupling Rabi frequency must be positive")
    return SystemConfig(
        constants=constants,
        atom=atom,
        probe=probe,
        coupling=coupling,
        per_photon_field_1=e1,
        per_photon_field_2=e2,
        g1=g1,
        g2=g2,
        rabi_probe=rabi_probe,
        rabi_coupling=rabi_coupling,
        coupling_intensity=intensity_from_amplitude(e2, coupling.coherent_amplitude, constants),
        strict=strict,
        large_n_floor=large_n_floor,
        detuning_ratio_max=detuning_ratio_max,
    )
