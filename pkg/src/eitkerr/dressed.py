"""
Perturbative dressed states of the two-mode Lambda system.

Within the manifold (n1, n2) spanned by |1,n1,n2>, |2,n1-1,n2> and
|3,n1-1,n2+1> the Hamiltonian has three eigenstates, labelled ``plus``,
``minus`` and ``zero``. Coefficients and energies here are first order in
the probe detuning and are transcribed verbatim; accuracy is checked
against :mod:`eitkerr.fock_oracle`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, NamedTuple, Optional

import numpy as np

from .errors import DegenerateManifold, ValidationError

BRANCHES = ("plus", "minus", "zero")


@dataclass(frozen=True)
class ManifoldIndex:
    n1: int
    n2: int

    def __post_init__(self):
        if int(self.n1) != self.n1 or int(self.n2) != self.n2:
            raise ValidationError("photon numbers must be integers")
        if self.n1 < 1:
            raise ValidationError(f"manifold needs n1 >= 1, got {self.n1}")
        if self.n2 < 0:
            raise ValidationError(f"manifold needs n2 >= 0, got {self.n2}")


@dataclass(frozen=True)
class DressedSolution:
    """
    One dressed state: amplitudes on (|1>, |2>, |3>) and its energy.

    ``energy`` is E/hbar in rad/s. ``method`` is ``"perturbative"`` or
    ``"exact"``.
    """

    branch: str
    a: complex
    b: complex
    c: complex
    energy: float
    rabi_probe: float
    rabi_coupling: float
    rabi_total: float
    method: str = "perturbative"

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c])

    @property
    def norm_residual(self) -> float:
        return float(abs(np.vdot(self.vector, self.vector).real - 1.0))

    @property
    def upper_population(self) -> float:
        return float(abs(self.b) ** 2)


class RabiPair(NamedTuple):
    probe: float
    coupling: float
    total: float


def rabi_pair(config, idx: ManifoldIndex) -> RabiPair:
    """Rabi frequencies 2 g1 sqrt(n1), 2 g2 sqrt(n2+1) and their norm."""
    omega1 = 2.0 * config.g1 * math.sqrt(idx.n1)
    omega2 = 2.0 * config.g2 * math.sqrt(idx.n2 + 1)
    return RabiPair(omega1, omega2, math.hypot(omega1, omega2))


def _check_branch(branch):
    if branch not in BRANCHES:
        raise ValidationError(f"branch must be one of {BRANCHES}, got {branch!r}")


def _total(omega1, omega2):
    omega = np.hypot(omega1, omega2)
    if np.any(omega == 0):
        raise DegenerateManifold("both Rabi frequencies vanish")
    return omega


def perturbative_amplitudes(omega1, omega2, detuning, branch: str):
    """
    Array-friendly core of :func:`coefficients_perturbative`.

    Broadcasts over ``omega1``, ``omega2`` and ``detuning`` and returns the
    tuple ``(a, b, c)``.
    """
    _check_branch(branch)
    omega1 = np.asarray(omega1, dtype=float)
    omega2 = np.asarray(omega2, dtype=float)
    detuning = np.asarray(detuning, dtype=float)
    omega = _total(omega1, omega2)
    om3 = omega ** 3
    if branch == "zero":
        a = omega2 / omega
        b = 2.0 * omega1 * omega2 * detuning / om3
        c = -omega1 / omega
        return a, b * np.ones_like(a), c
    s = 1.0 if branch == "plus" else -1.0
    root2 = math.sqrt(2.0)
    a = omega1 / (root2 * omega) * (1.0 - s * (omega1 ** 2 + 4.0 * omega2 ** 2) / (2.0 * om3) * detuning)
    b = s / root2 * (1.0 + s * omega1 ** 2 / (2.0 * om3) * detuning)
    c = omega2 / (root2 * omega) * (1.0 + s * 3.0 * omega1 ** 2 / (2.0 * om3) * detuning)
    return a, b * np.ones_like(a), c


def perturbative_energy(omega1, omega2, detuning, branch: str):
    """Array-friendly core of :func:`energies_perturbative`."""
    _check_branch(branch)
    omega1 = np.asarray(omega1, dtype=float)
    omega2 = np.asarray(omega2, dtype=float)
    omega = _total(omega1, omega2)
    if branch == "zero":
        return omega1 ** 2 / omega ** 2 * detuning
    s = 1.0 if branch == "plus" else -1.0
    return (omega1 ** 2 + 2.0 * omega2 ** 2) / (2.0 * omega ** 2) * detuning + s * omega / 2.0


def energies_perturbative(omega1: float, omega2: float, detuning: float, branch: str) -> float:
    """Dressed energy E/hbar (rad/s) to first order in the detuning."""
    return float(perturbative_energy(omega1, omega2, detuning, branch))


def coefficients_perturbative(omega1: float, omega2: float, detuning: float,
                              branch: str) -> DressedSolution:
    """
    First-order dressed-state amplitudes for one branch.

    Parameters
    ----------
    omega1, omega2 : float
        Manifold Rabi frequencies in rad/s.
    detuning : float
        Probe detuning in rad/s.
    branch : {"plus", "minus", "zero"}

    Raises
    ------
    DegenerateManifold
        If ``omega1 == omega2 == 0``.
    """
    a, b, c = perturbative_amplitudes(omega1, omega2, detuning, branch)
    return DressedSolution(
        branch=branch, a=float(a), b=float(b), c=float(c),
        energy=energies_perturbative(omega1, omega2, detuning, branch),
        rabi_probe=float(omega1), rabi_coupling=float(omega2),
        rabi_total=math.hypot(omega1, omega2))


def dressed_manifold(config, idx: ManifoldIndex) -> List[DressedSolution]:
    """All three perturbative branches of one manifold."""
    omega1, omega2, _ = rabi_pair(config, idx)
    return [coefficients_perturbative(omega1, omega2, config.detuning, br) for br in BRANCHES]


@dataclass(frozen=True)
class EdgeState:
    """An uncoupled basis ket |level, n1, n2> and its energy in rad/s."""

    level: int
    n1: int
    n2: int
    energy: float


def edge_states(config, n1_max: int, n2_max: int) -> List[EdgeState]:
    """
    Kets outside every (n1, n2) manifold of a truncated space.

    The truncated space holds photon numbers 0..n1_max and 0..n2_max. Two
    families fall outside every manifold: |1,0,n2> with energy exactly 0,
    and |3,n1,0>, whose energy is the diagonal entry of level |3>, i.e. the
    detuning (zero at resonance).
    """
    if n1_max < 0 or n2_max < 0:
        raise ValidationError("truncation limits must be >= 0")
    states = [EdgeState(1, 0, n2, 0.0) for n2 in range(n2_max + 1)]
    states += [EdgeState(3, n1, 0, float(config.detuning)) for n1 in range(n1_max + 1)]
    return states


def manifold_of(level: int, n1: int, n2: int) -> Optional[ManifoldIndex]:
    """Manifold containing the basis ket |level, n1, n2>, or None for edge kets."""
    if level == 1:
        return ManifoldIndex(n1, n2) if n1 >= 1 else None
    if level == 2:
        return ManifoldIndex(n1 + 1, n2)
    if level == 3:
        return ManifoldIndex(n1 + 1, n2 - 1) if n2 >= 1 else None
    raise ValidationError(f"level must be 1, 2 or 3, got {level}")
