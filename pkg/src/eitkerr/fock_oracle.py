"""
Exact numerics on the truncated two-mode Fock space.

The interaction-picture Hamiltonian conserves n1 + n2 excitations in the
sense that it only connects the three kets of one manifold (n1, n2). Each
manifold is therefore a 3x3 Hermitian block (entries in rad/s, basis order
|1,n1,n2>, |2,n1-1,n2>, |3,n1-1,n2+1>)::

    [[0,            g1 sqrt(n1),     0             ],
     [g1 sqrt(n1),  detuning,        g2 sqrt(n2+1) ],
     [0,            g2 sqrt(n2+1),   detuning      ]]

This module diagonalizes blocks exactly, evolves them under a slow
switch-on of the couplings and assembles the Poisson-weighted coherent
ensemble. It is the reference against which the perturbative formulas are
checked, so it applies none of their approximations.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Tuple

import numba
import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.special import gammaln
from scipy.stats import poisson

from .dressed import BRANCHES, DressedSolution, ManifoldIndex, perturbative_amplitudes, rabi_pair
from .errors import ConvergenceFailure, NormDrift, StepTooLarge, TruncationError, ValidationError

RESIDUAL_TOL = 1e-12
NORM_TOL = 1e-8
MAX_STEP_PHASE = 0.1
DEFAULT_EPS_TRUNC = 1e-10

# eigenvalues of a tridiagonal block with nonzero couplings never cross,
# so ascending order is the branch order at every detuning
_ASCENDING_BRANCHES = ("minus", "zero", "plus")


@dataclass(frozen=True)
class ManifoldBlock:
    idx: ManifoldIndex
    matrix: np.ndarray

    @property
    def detuning(self) -> float:
        return float(self.matrix[1, 1].real)

    @property
    def rabi_probe(self) -> float:
        return 2.0 * float(self.matrix[1, 0].real)

    @property
    def rabi_coupling(self) -> float:
        return 2.0 * float(self.matrix[1, 2].real)


def block_matrix(g1: float, g2: float, n1: int, n2: int, detuning: float,
                 probe_scale: float = 1.0, coupling_scale: float = 1.0) -> np.ndarray:
    p = probe_scale * g1 * math.sqrt(n1)
    q = coupling_scale * g2 * math.sqrt(n2 + 1)
    return np.array([[0.0, p, 0.0],
                     [p, detuning, q],
                     [0.0, q, detuning]], dtype=complex)


def build_block(config, idx: ManifoldIndex) -> ManifoldBlock:
    """The 3x3 Hamiltonian block (rad/s) of manifold ``idx``."""
    return ManifoldBlock(idx, block_matrix(config.g1, config.g2, idx.n1, idx.n2, config.detuning))


def block_builder(config, idx: ManifoldIndex) -> Callable[[float, float], np.ndarray]:
    """Callable ``(probe_scale, coupling_scale) -> block`` used during a ramp."""
    g1, g2, det = config.g1, config.g2, config.detuning

    def builder(probe_scale: float, coupling_scale: float) -> np.ndarray:
        return block_matrix(g1, g2, idx.n1, idx.n2, det, probe_scale, coupling_scale)

    return builder


def _reference_vectors(omega1, omega2):
    """Zero-detuning eigenvectors per branch, shape (..., 3, 3) with branches in columns."""
    omega1 = np.asarray(omega1, dtype=float)
    omega2 = np.asarray(omega2, dtype=float)
    out = []
    for branch in _ASCENDING_BRANCHES:
        a, b, c = perturbative_amplitudes(omega1, omega2, 0.0, branch)
        out.append(np.stack([a, b, c], axis=-1))
    return np.stack(out, axis=-1)


def _align_phases(vectors, reference):
    """Rotate each eigenvector so its inner product with the reference is real positive."""
    overlap = np.einsum("...ij,...ij->...j", reference.conj(), vectors)
    mag = np.abs(overlap)
    phase = np.where(mag > 0, overlap.conj() / np.where(mag > 0, mag, 1.0), 1.0)
    return vectors * phase[..., None, :]


@dataclass(frozen=True)
class ExactEigensystem:
    """
    Exact eigenpairs of one block.

    ``energies[j]`` and ``vectors[:, j]`` belong to ``branches[j]``; the
    order is ascending in energy: minus, zero, plus. Each vector is phased
    so that its overlap with the zero-detuning dressed state is real and
    positive.
    """

    block: ManifoldBlock
    energies: np.ndarray
    vectors: np.ndarray
    residual: float
    branches: Tuple[str, str, str] = _ASCENDING_BRANCHES

    def energy(self, branch: str) -> float:
        return float(self.energies[self.branches.index(branch)])

    def vector(self, branch: str) -> np.ndarray:
        return self.vectors[:, self.branches.index(branch)]

    def solution(self, branch: str) -> DressedSolution:
        a, b, c = self.vector(branch)
        om1, om2 = self.block.rabi_probe, self.block.rabi_coupling
        return DressedSolution(branch, a, b, c, self.energy(branch), om1, om2,
                               math.hypot(om1, om2), method="exact")


def exact_eigensystem(block: ManifoldBlock) -> ExactEigensystem:
    """
    Diagonalize a block and label its eigenpairs by branch.

    Raises
    ------
    ConvergenceFailure
        If ``||H v - E v|| / ||H||`` exceeds 1e-12 for any pair.
    """
    h = np.asarray(block.matrix)
    if not np.allclose(h, h.conj().T, rtol=0, atol=1e-14 * max(np.abs(h).max(), 1.0)):
        raise ValidationError("block is not Hermitian")
    energies, vectors = np.linalg.eigh(h)
    om1, om2 = block.rabi_probe, block.rabi_coupling
    if om1 == 0 and om2 == 0:
        ref = np.eye(3)[:, [1, 0, 2]].astype(complex)
    else:
        ref = _reference_vectors(om1, om2).astype(complex)
    if om1 == 0 or om2 == 0:
        # reducible block: levels may cross, so label by overlap instead of order
        cost = -np.abs(ref.conj().T @ vectors)
        _, col = linear_sum_assignment(cost)
        energies, vectors = energies[col], vectors[:, col]
    vectors = _align_phases(vectors, ref)
    scale = max(np.linalg.norm(h, 2), np.finfo(float).tiny)
    residual = float(np.max(np.linalg.norm(h @ vectors - vectors * energies, axis=0)) / scale)
    if residual > RESIDUAL_TOL:
        raise ConvergenceFailure(f"eigen-residual {residual:.3g} above {RESIDUAL_TOL:g}")
    return ExactEigensystem(block, energies, vectors, residual)


def batch_eigensystem(omega1, omega2, detuning):
    """
    Vectorized exact eigenpairs for many manifolds.

    Returns ``(energies, vectors)`` with shapes (..., 3) and (..., 3, 3),
    branches ordered minus, zero, plus. Requires nonzero Rabi frequencies.
    """
    omega1 = np.asarray(omega1, dtype=float)
    omega2 = np.asarray(omega2, dtype=float)
    if np.any(omega1 == 0) or np.any(omega2 == 0):
        raise ValidationError("batch_eigensystem needs nonzero Rabi frequencies")
    shape = np.broadcast(omega1, omega2).shape
    h = np.zeros(shape + (3, 3))
    h[..., 0, 1] = h[..., 1, 0] = omega1 / 2.0
    h[..., 1, 2] = h[..., 2, 1] = omega2 / 2.0
    h[..., 1, 1] = h[..., 2, 2] = detuning
    energies, vectors = np.linalg.eigh(h)
    vectors = _align_phases(vectors, _reference_vectors(omega1, omega2))
    return energies, vectors


# ---------------------------------------------------------------------------
# switch-on ramps

_SHAPES = {
    "linear": lambda u: u,
    "smoothstep": lambda u: u * u * (3.0 - 2.0 * u),
    "sin2": lambda u: np.sin(0.5 * np.pi * u) ** 2,
}
_ORDERS = ("coupling_first", "probe_first", "simultaneous")


@dataclass(frozen=True)
class RampProfile:
    """
    Switch-on schedule for the two couplings.

    Over ``[0, duration]`` the couplings rise from 0 to full strength with
    ``shape``; afterwards they are held until ``total_time``. With a
    sequential ``order`` the first coupling ramps during the first half of
    ``duration`` and the second during the second half. ``steps`` is the
    number of integration steps over ``total_time``.
    """

    shape: str = "sin2"
    duration: float = 1.0
    total_time: float = 1.0
    steps: int = 1000
    order: str = "coupling_first"

    def __post_init__(self):
        if self.shape not in _SHAPES:
            raise ValidationError(f"shape must be one of {sorted(_SHAPES)}")
        if self.order not in _ORDERS:
            raise ValidationError(f"order must be one of {_ORDERS}")
        if not (0 < self.duration <= self.total_time):
            raise ValidationError("need 0 < duration <= total_time")
        if int(self.steps) != self.steps or self.steps < 1:
            raise ValidationError("steps must be a positive integer")

    @property
    def dt(self) -> float:
        return self.total_time / self.steps

    def _rise(self, t, start, length):
        u = np.clip((np.asarray(t, dtype=float) - start) / length, 0.0, 1.0)
        return _SHAPES[self.shape](u)

    def envelopes(self, t):
        """Return ``(probe_scale, coupling_scale)`` at time(s) ``t``."""
        d = self.duration
        if self.order == "simultaneous":
            s = self._rise(t, 0.0, d)
            return s, s
        first, second = self._rise(t, 0.0, d / 2), self._rise(t, d / 2, d / 2)
        if self.order == "coupling_first":
            return second, first
        return first, second

    def reversed(self) -> "RampProfile":
        swap = {"coupling_first": "probe_first", "probe_first": "coupling_first",
                "simultaneous": "simultaneous"}
        return RampProfile(self.shape, self.duration, self.total_time, self.steps,
                           swap[self.order])

    def scaled(self, factor: float) -> "RampProfile":
        """Same ramp with duration and total time multiplied, at the same step size."""
        return RampProfile(self.shape, self.duration * factor, self.total_time * factor,
                           int(math.ceil(self.steps * factor)), self.order)

    @classmethod
    def for_rate(cls, max_rate: float, duration: float, hold: float = 0.0,
                 shape: str = "sin2", order: str = "coupling_first",
                 step_phase: float = 0.05) -> "RampProfile":
        """Ramp whose step keeps ``dt * max_rate`` at ``step_phase``."""
        total = duration * (1.0 + hold)
        steps = int(math.ceil(total * max_rate / step_phase))
        return cls(shape, duration, total, max(steps, 1), order)


DEFAULT_DURATION_FACTOR = 400.0


def default_ramp(config, duration_factor: float = DEFAULT_DURATION_FACTOR, hold: float = 0.0,
                 shape: str = "sin2", order: str = "coupling_first",
                 max_rate: Optional[float] = None) -> RampProfile:
    """
    Default switch-on: sin^2 over ``duration_factor / Omega_bar``, coupling first.

    400/Omega_bar passes the doubling test of :func:`ramp_convergence` (change
    below 1e-5) and keeps |2> below 1e-4; 50/Omega_bar does neither.
    """
    rate = max_rate or max(config.rabi_total, abs(config.detuning))
    return RampProfile.for_rate(rate, duration_factor / config.rabi_total, hold, shape, order)


@dataclass(frozen=True)
class Trajectory:
    """State of one manifold sampled at ``times``; ``states`` has shape (T, 3)."""

    times: np.ndarray
    states: np.ndarray

    @property
    def populations(self) -> np.ndarray:
        return np.abs(self.states) ** 2

    @property
    def coherence(self) -> np.ndarray:
        """<2|rho|1> of the manifold, i.e. b * conj(a)."""
        return self.states[:, 1] * self.states[:, 0].conj()

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def _block_rate(h):
    p, q = abs(h[1, 0]), abs(h[1, 2])
    return max(2.0 * math.hypot(p, q), abs(h[1, 1].real))


def evolve_block(builder: Callable[[float, float], np.ndarray], ramp: RampProfile,
                 initial, dt: Optional[float] = None, sample_every: int = 1) -> Trajectory:
    """
    Propagate one manifold through a coupling ramp.

    Each step exponentiates the block frozen at the step midpoint, so the
    propagator is unitary by construction; the norm is still checked after
    every step as a diagnostic.

    Raises
    ------
    StepTooLarge
        If ``dt * max(Omega, |detuning|) > 0.1`` at full coupling.
    NormDrift
        If the norm moves away from 1 by more than 1e-8.
    """
    psi = np.asarray(initial, dtype=complex).copy()
    if psi.shape != (3,) or abs(np.linalg.norm(psi) - 1.0) > 1e-12:
        raise ValidationError("initial state must be a unit 3-vector")
    if dt is None:
        steps = ramp.steps
        dt = ramp.dt
    else:
        steps = int(math.ceil(ramp.total_time / dt - 1e-9))
    rate = _block_rate(builder(1.0, 1.0))
    if dt * rate > MAX_STEP_PHASE * (1 + 1e-12):
        raise StepTooLarge(f"dt * rate = {dt * rate:.3g} exceeds {MAX_STEP_PHASE}")

    mid = (np.arange(steps) + 0.5) * dt
    env1, env2 = ramp.envelopes(mid)
    times, states = [0.0], [psi.copy()]
    for k in range(steps):
        h = builder(float(env1[k]), float(env2[k]))
        w, v = np.linalg.eigh(h)
        psi = v @ (np.exp(-1j * w * dt) * (v.conj().T @ psi))
        drift = abs(np.vdot(psi, psi).real - 1.0)
        if drift > NORM_TOL:
            raise NormDrift(f"norm drift {drift:.3g} at step {k}")
        if (k + 1) % sample_every == 0 or k == steps - 1:
            times.append((k + 1) * dt)
            states.append(psi.copy())
    return Trajectory(np.array(times), np.array(states))


def sudden_upper_population(omega1: float, omega2: float, t):
    """Closed-form |2> population after a sudden switch-on at zero detuning from |1>."""
    omega = math.hypot(omega1, omega2)
    return (omega1 / omega) ** 2 * np.sin(0.5 * omega * np.asarray(t)) ** 2


# ---------------------------------------------------------------------------
# coherent ensemble

def coherent_weights(n, amplitude: float) -> np.ndarray:
    """Fock amplitudes exp(-a^2/2) a^n / sqrt(n!) of a real coherent state."""
    n = np.asarray(n)
    if amplitude == 0:
        return (n == 0).astype(float)
    logw = -0.5 * amplitude ** 2 + n * math.log(amplitude) - 0.5 * gammaln(n + 1.0)
    return np.exp(logw)


def poisson_window(nbar: float, eps: float = DEFAULT_EPS_TRUNC, width: float = 6.0):
    """
    Photon-number window for one mode.

    Starts from ``nbar +/- width*sqrt(nbar)`` and widens it to the Poisson
    quantiles ``eps/4`` and ``1 - eps/4`` when those lie further out.
    """
    if nbar == 0:
        return 0, 0
    spread = width * math.sqrt(nbar)
    lo = max(0, int(math.floor(nbar - spread)))
    hi = int(math.ceil(nbar + spread))
    lo = min(lo, int(poisson.ppf(eps / 4, nbar)))
    hi = max(hi, int(poisson.isf(eps / 4, nbar)) + 1)
    return lo, hi


def window_mass(nbar: float, lo: int, hi: int) -> float:
    if nbar == 0:
        return 1.0 if lo == 0 else 0.0
    below = poisson.cdf(lo - 1, nbar) if lo > 0 else 0.0
    above = poisson.sf(hi, nbar)
    return float(1.0 - below - above)


@dataclass
class EnsembleHistory:
    """Diagnostics recorded while evolving an ensemble."""

    times: np.ndarray
    total_upper_population: np.ndarray
    max_upper_population: np.ndarray
    max_norm_drift: float


@dataclass
class CoherentEnsemble:
    """
    Poisson-weighted collection of per-manifold states.

    ``states[i, j]`` is the normalized 3-vector of manifold
    ``(n1[i], n2[j])``. Rows with ``n1 == 0`` hold the inert edge kets
    |1,0,n2>, stored as (1, 0, 0). ``weights`` are the field amplitudes
    w(n1) * w(n2).
    """

    config: object
    n1: np.ndarray
    n2: np.ndarray
    weights: np.ndarray
    states: np.ndarray
    eps_trunc: float = DEFAULT_EPS_TRUNC
    history: Optional[EnsembleHistory] = None
    meta: Dict[str, object] = field(default_factory=dict)

    @property
    def alpha(self) -> float:
        return self.config.probe.coherent_amplitude

    @property
    def beta(self) -> float:
        return self.config.coupling.coherent_amplitude

    @property
    def window(self) -> Tuple[int, int, int, int]:
        return int(self.n1[0]), int(self.n1[-1]), int(self.n2[0]), int(self.n2[-1])

    @property
    def window_mass(self) -> float:
        return float(np.sum(self.weights ** 2))

    @property
    def total_norm(self) -> float:
        """Squared norm of the truncated state, equal to the window mass for unit blocks."""
        return float(np.sum(self.weights ** 2 * np.sum(np.abs(self.states) ** 2, axis=-1)))

    @property
    def upper_population(self) -> float:
        return float(np.sum(self.weights ** 2 * np.abs(self.states[..., 1]) ** 2))

    @property
    def active(self) -> np.ndarray:
        """Mask of genuine manifolds (n1 >= 1) over the (n1, n2) grid."""
        return np.broadcast_to((self.n1 >= 1)[:, None], self.weights.shape)

    def rabi_grid(self):
        n1 = self.n1[:, None].astype(float)
        n2 = self.n2[None, :].astype(float)
        om1 = 2.0 * self.config.g1 * np.sqrt(n1) * np.ones_like(n2)
        om2 = 2.0 * self.config.g2 * np.sqrt(n2 + 1.0) * np.ones_like(n1)
        return om1, om2


def ensemble_window(config, eps: float = DEFAULT_EPS_TRUNC, width: float = 6.0):
    """Default truncation window ``(n1_lo, n1_hi, n2_lo, n2_hi)`` and its Poisson mass."""
    lo1, hi1 = poisson_window(config.nbar_probe, eps, width)
    lo2, hi2 = poisson_window(config.nbar_coupling, eps, width)
    mass = (window_mass(config.nbar_probe, lo1, hi1)
            * window_mass(config.nbar_coupling, lo2, hi2))
    return (lo1, hi1, lo2, hi2), mass


def _resolve_window(config, window, eps):
    if window is None:
        window, mass = ensemble_window(config, eps)
    else:
        lo1, hi1, lo2, hi2 = window
        if lo1 < 0 or lo2 < 0 or hi1 < lo1 or hi2 < lo2:
            raise ValidationError(f"bad window {window}")
        mass = (window_mass(config.nbar_probe, lo1, hi1)
                * window_mass(config.nbar_coupling, lo2, hi2))
    if mass < 1.0 - eps:
        raise TruncationError(f"window {window} holds Poisson mass {mass:.12g} < 1 - {eps:g}")
    return window


def _empty_ensemble(config, window, eps):
    lo1, hi1, lo2, hi2 = window
    n1 = np.arange(lo1, hi1 + 1)
    n2 = np.arange(lo2, hi2 + 1)
    weights = np.outer(coherent_weights(n1, config.probe.coherent_amplitude),
                       coherent_weights(n2, config.coupling.coherent_amplitude))
    states = np.zeros((n1.size, n2.size, 3), dtype=complex)
    states[..., 0] = 1.0
    return CoherentEnsemble(config, n1, n2, weights, states, eps)


def ensemble_from_dressed(config, source: str = "exact", window=None,
                          eps: float = DEFAULT_EPS_TRUNC) -> CoherentEnsemble:
    """
    Ensemble with every manifold in its ``zero`` branch.

    ``source`` selects the exact eigenvectors or the first-order dressed
    amplitudes.
    """
    window = _resolve_window(config, window, eps)
    ens = _empty_ensemble(config, window, eps)
    active = ens.active
    om1, om2 = ens.rabi_grid()
    om1, om2 = om1[active], om2[active]
    if source == "exact":
        _, vecs = batch_eigensystem(om1, om2, config.detuning)
        ens.states[active] = vecs[..., :, 1]
    elif source == "perturbative":
        a, b, c = perturbative_amplitudes(om1, om2, config.detuning, "zero")
        ens.states[active] = np.stack([a, b, c], axis=-1)
    else:
        raise ValidationError("source must be 'exact' or 'perturbative'")
    ens.meta["source"] = source
    return ens


@numba.njit(cache=True, fastmath=True, nogil=True)
def _evolve_kernel(psi, sq1, sq2, w2, g1, g2, detuning, env1, env2, dt):
    # frozen-midpoint propagation of every manifold; the coupling part is
    # exponentiated in closed form (eigenvalues 0, +-r), the diagonal
    # detuning part is applied as half steps on either side
    m_count = psi.shape[0]
    steps = env1.shape[0]
    total = np.zeros(steps)
    max_pop = np.zeros(m_count)
    max_drift = 0.0
    half = np.exp(-0.5j * detuning * dt)
    for m in range(m_count):
        x0 = psi[m, 0]
        x1 = psi[m, 1]
        x2 = psi[m, 2]
        peak = 0.0
        for k in range(steps):
            p = g1 * env1[k] * sq1[m]
            q = g2 * env2[k] * sq2[m]
            x1 *= half
            x2 *= half
            r2 = p * p + q * q
            if r2 > 0.0:
                r = math.sqrt(r2)
                cr = math.cos(r * dt)
                sr = math.sin(r * dt) / r
                k0 = p * x1
                k1 = p * x0 + q * x2
                k2 = q * x1
                f = (cr - 1.0) / r2
                # H^2 x = H (k0, k1, k2)
                x0 = x0 + f * (p * k1) - 1j * sr * k0
                x1 = x1 + f * (p * k0 + q * k2) - 1j * sr * k1
                x2 = x2 + f * (q * k1) - 1j * sr * k2
            x1 *= half
            x2 *= half
            pop = x1.real * x1.real + x1.imag * x1.imag
            total[k] += w2[m] * pop
            if pop > peak:
                peak = pop
            nrm = (x0.real * x0.real + x0.imag * x0.imag + pop
                   + x2.real * x2.real + x2.imag * x2.imag)
            d = abs(nrm - 1.0)
            if d > max_drift:
                max_drift = d
        psi[m, 0] = x0
        psi[m, 1] = x1
        psi[m, 2] = x2
        max_pop[m] = peak
    return total, max_pop, max_drift


def evolve_ensemble(ensemble: CoherentEnsemble, ramp: RampProfile,
                    dt: Optional[float] = None, threads: int = 1) -> CoherentEnsemble:
    """
    Evolve every manifold of ``ensemble`` through ``ramp`` in place.

    At zero detuning each step is the exact exponential of the frozen block.
    At nonzero detuning the detuning part is split symmetrically around the
    coupling exponential, which keeps every step unitary and second-order
    accurate.

    With ``threads > 1`` the manifolds are split into contiguous chunks run
    concurrently; chunk results are reduced in chunk order, so the output
    is deterministic but may differ from the serial sum at the 1e-12 level.
    """
    if int(threads) != threads or threads < 1:
        raise ValidationError("threads must be a positive integer")
    cfg = ensemble.config
    steps = ramp.steps if dt is None else int(math.ceil(ramp.total_time / dt - 1e-9))
    dt = ramp.dt if dt is None else dt
    active = ensemble.active
    om1, om2 = ensemble.rabi_grid()
    rate = max(float(np.max(np.hypot(om1, om2)[active], initial=0.0)), abs(cfg.detuning))
    if dt * rate > MAX_STEP_PHASE * (1 + 1e-12):
        raise StepTooLarge(f"dt * rate = {dt * rate:.3g} exceeds {MAX_STEP_PHASE}")
    mid = (np.arange(steps) + 0.5) * dt
    env1, env2 = (np.ascontiguousarray(e, dtype=float) for e in ramp.envelopes(mid))

    n1 = np.broadcast_to(ensemble.n1[:, None], ensemble.weights.shape)[active]
    n2 = np.broadcast_to(ensemble.n2[None, :], ensemble.weights.shape)[active]
    psi = np.ascontiguousarray(ensemble.states[active])
    w2 = np.ascontiguousarray(ensemble.weights[active] ** 2)
    sq1, sq2 = np.sqrt(n1.astype(float)), np.sqrt(n2 + 1.0)
    args = (float(cfg.g1), float(cfg.g2), float(cfg.detuning), env1, env2, float(dt))
    if threads == 1 or psi.shape[0] < 2 * threads:
        total, max_pop, drift = _evolve_kernel(psi, sq1, sq2, w2, *args)
    else:
        bounds = np.linspace(0, psi.shape[0], threads + 1).astype(int)
        chunks = [slice(lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:])]
        parts = [np.ascontiguousarray(psi[c]) for c in chunks]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(
                lambda i: _evolve_kernel(parts[i], sq1[chunks[i]], sq2[chunks[i]],
                                         w2[chunks[i]], *args), range(threads)))
        for c, part in zip(chunks, parts):
            psi[c] = part
        total = np.zeros(steps)
        for r in results:
            total += r[0]
        max_pop = np.concatenate([r[1] for r in results])
        drift = max(r[2] for r in results)
    if drift > NORM_TOL:
        raise NormDrift(f"norm drift {drift:.3g} during ensemble evolution")
    ensemble.states[active] = psi
    peak = np.zeros(ensemble.weights.shape)
    peak[active] = max_pop
    ensemble.history = EnsembleHistory((np.arange(steps) + 1) * dt, total, peak, float(drift))
    ensemble.meta["ramp"] = ramp
    return ensemble


def steady_state_exact(config, ramp: Optional[RampProfile] = None, window=None,
                       eps: float = DEFAULT_EPS_TRUNC, threads: int = 1) -> CoherentEnsemble:
    """
    Adiabatically evolved state of |1> x |alpha, beta>.

    Every manifold in the truncation window starts in |1,n1,n2> and is
    propagated through ``ramp`` (default :func:`default_ramp` with the step
    resolving the fastest manifold).

    Raises
    ------
    TruncationError
        If the window holds less than ``1 - eps`` of the Poisson mass.
    """
    window = _resolve_window(config, window, eps)
    ens = _empty_ensemble(config, window, eps)
    if ramp is None:
        om1, om2 = ens.rabi_grid()
        ramp = default_ramp(config, max_rate=max(float(np.max(np.hypot(om1, om2))),
                                                 abs(config.detuning)))
    return evolve_ensemble(ens, ramp, threads=threads)


def dark_state_fidelity(ensemble: CoherentEnsemble) -> np.ndarray:
    """|<zero branch|psi>|^2 per manifold (1 for the inert edge rows)."""
    fid = np.ones(ensemble.weights.shape)
    active = ensemble.active
    om1, om2 = ensemble.rabi_grid()
    _, vecs = batch_eigensystem(om1[active], om2[active], ensemble.config.detuning)
    dark = vecs[..., :, 1]
    overlap = np.einsum("mi,mi->m", dark.conj(), ensemble.states[active])
    fid[active] = np.abs(overlap) ** 2
    return fid


@dataclass(frozen=True)
class CoherenceResult:
    exact: complex
    large_n: float

    @property
    def relative_error(self) -> float:
        return abs(self.exact - self.large_n) / abs(self.large_n)


def large_n_coherence(config) -> float:
    """a0 * b0 evaluated at the mean photon numbers."""
    omega1, omega2 = config.rabi_probe, config.rabi_coupling
    a, b, _ = perturbative_amplitudes(omega1, omega2, config.detuning, "zero")
    return float(a * b)


def exact_coherence(ensemble: CoherentEnsemble, align_phases: bool = True) -> CoherenceResult:
    """
    <2|rho_A|1> of the ensemble, summed over the traced-out field.

    The sum runs over pairs of manifolds whose probe photon numbers differ
    by one: the |2> amplitude of (m1+1, m2) against the |1> amplitude of
    (m1, m2). With ``align_phases`` each manifold is rotated so its |1>
    amplitude is real, keeping only the component oscillating at the probe
    frequency.
    """
    states = ensemble.states
    if align_phases:
        a = states[..., 0]
        mag = np.abs(a)
        phase = np.where(mag > 0, a.conj() / np.where(mag > 0, mag, 1.0), 1.0)
        states = states * phase[..., None]
    amp = ensemble.weights[..., None] * states
    upper = amp[1:, :, 1]
    lower = amp[:-1, :, 0]
    # rows are consecutive n1 values by construction
    rho21 = complex(np.sum(upper * lower.conj()))
    return CoherenceResult(rho21, large_n_coherence(ensemble.config))


def ramp_convergence(config, idx: ManifoldIndex, ramp: RampProfile):
    """
    Final dark-state fidelity for ``ramp`` and for the doubled ramp.

    Returns ``(fidelity, fidelity_doubled, change)``.
    """
    builder = block_builder(config, idx)
    dark = exact_eigensystem(build_block(config, idx)).vector("zero")
    out = []
    for r in (ramp, ramp.scaled(2.0)):
        traj = evolve_block(builder, r, [1.0, 0.0, 0.0])
        out.append(float(abs(np.vdot(dark, traj.final)) ** 2))
    return out[0], out[1], abs(out[1] - out[0])


__all__ = [
    "ManifoldBlock", "build_block", "block_builder", "block_matrix", "ExactEigensystem",
    "exact_eigensystem", "batch_eigensystem", "RampProfile", "default_ramp", "Trajectory",
    "evolve_block", "sudden_upper_population", "coherent_weights", "poisson_window",
    "window_mass", "CoherentEnsemble", "EnsembleHistory", "ensemble_window",
    "ensemble_from_dressed", "evolve_ensemble", "steady_state_exact", "dark_state_fidelity",
    "CoherenceResult", "large_n_coherence", "exact_coherence", "ramp_convergence",
    "BRANCHES", "rabi_pair",
]
