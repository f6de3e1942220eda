import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eitkerr.dressed import (
    BRANCHES,
    ManifoldIndex,
    coefficients_perturbative,
    dressed_manifold,
    edge_states,
    energies_perturbative,
    manifold_of,
    perturbative_amplitudes,
    rabi_pair,
)
from eitkerr.errors import DegenerateManifold, ValidationError
from eitkerr.fock_oracle import block_matrix

rabi = st.floats(0.05, 20.0)


def _first_order_oracle(omega1, omega2):
    """Generic Rayleigh-Schrodinger first-order terms for V = diag(0, 1, 1)."""
    omega = math.hypot(omega1, omega2)
    r2 = math.sqrt(2.0)
    zeroth = {
        "zero": (0.0, np.array([omega2, 0.0, -omega1]) / omega),
        "plus": (omega / 2, np.array([omega1 / omega, 1.0, omega2 / omega]) / r2),
        "minus": (-omega / 2, np.array([omega1 / omega, -1.0, omega2 / omega]) / r2),
    }
    v = np.diag([0.0, 1.0, 1.0])
    out = {}
    for name, (e_n, psi_n) in zeroth.items():
        shift = psi_n @ v @ psi_n
        vec = np.zeros(3)
        for other, (e_m, psi_m) in zeroth.items():
            if other != name:
                vec += (psi_m @ v @ psi_n) / (e_n - e_m) * psi_m
        out[name] = (e_n, shift, psi_n, vec)
    return out


@settings(max_examples=60, deadline=None)
@given(rabi, rabi)
def test_matches_generic_first_order_theory(omega1, omega2):
    oracle = _first_order_oracle(omega1, omega2)
    scale = math.hypot(omega1, omega2)
    for branch in BRANCHES:
        e0, shift, psi0, psi1 = oracle[branch]
        at0 = coefficients_perturbative(omega1, omega2, 0.0, branch)
        at1 = coefficients_perturbative(omega1, omega2, 1.0, branch)
        np.testing.assert_allclose(at0.vector, psi0, atol=1e-12)
        np.testing.assert_allclose(at1.vector - at0.vector, psi1, atol=1e-12 * max(1, 1 / scale))
        assert at0.energy == pytest.approx(e0, abs=1e-12 * scale)
        assert at1.energy - at0.energy == pytest.approx(shift, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(rabi, rabi)
def test_zeroth_order_are_eigenvectors(omega1, omega2):
    h = block_matrix(omega1 / 2, omega2 / 2, 1, 0, 0.0)
    for branch in BRANCHES:
        sol = coefficients_perturbative(omega1, omega2, 0.0, branch)
        np.testing.assert_allclose(h @ sol.vector, sol.energy * sol.vector, atol=1e-12 * (omega1 + omega2))
        assert sol.norm_residual < 1e-14


@settings(max_examples=40, deadline=None)
@given(rabi, rabi, st.floats(1e-4, 1e-2))
def test_residual_is_second_order(omega1, omega2, ratio):
    omega = math.hypot(omega1, omega2)
    for branch in BRANCHES:
        small = coefficients_perturbative(omega1, omega2, ratio * omega, branch).norm_residual
        assert small <= 10.0 * ratio ** 2


def test_zero_branch_is_dark_at_resonance():
    sol = coefficients_perturbative(1.0, 3.0, 0.0, "zero")
    assert sol.b == 0.0 and sol.upper_population == 0.0
    assert sol.energy == 0.0


def test_branches_orthogonal_at_resonance():
    vecs = np.array([coefficients_perturbative(0.7, 1.9, 0.0, b).vector for b in BRANCHES])
    np.testing.assert_allclose(vecs @ vecs.T, np.eye(3), atol=1e-14)


def test_energy_sum_is_trace():
    # first-order shifts add up to the trace 2*detuning
    det = 1e-3
    total = sum(energies_perturbative(0.8, 1.3, det, b) for b in BRANCHES)
    assert total == pytest.approx(2 * det, rel=1e-12)


def test_amplitudes_broadcast():
    om1 = np.linspace(0.1, 1.0, 5)
    a, b, c = perturbative_amplitudes(om1, 2.0, 1e-3, "plus")
    assert a.shape == b.shape == c.shape == (5,)
    assert a[2] == pytest.approx(coefficients_perturbative(om1[2], 2.0, 1e-3, "plus").a)


def test_degenerate_manifold_raises():
    with pytest.raises(DegenerateManifold):
        coefficients_perturbative(0.0, 0.0, 0.0, "zero")


def test_bad_branch():
    with pytest.raises(ValidationError):
        coefficients_perturbative(1.0, 1.0, 0.0, "dark")


def test_manifold_index_validation():
    with pytest.raises(ValidationError):
        ManifoldIndex(0, 3)
    with pytest.raises(ValidationError):
        ManifoldIndex(2, -1)


def test_rabi_pair_and_manifold(small):
    idx = ManifoldIndex(9, 15)
    pair = rabi_pair(small, idx)
    assert pair.probe == pytest.approx(2 * small.g1 * 3.0)
    assert pair.coupling == pytest.approx(2 * small.g2 * 4.0)
    sols = dressed_manifold(small, idx)
    assert [s.branch for s in sols] == list(BRANCHES)


def test_edge_states(small):
    edges = edge_states(small, 3, 2)
    assert len(edges) == 3 + 4
    assert all(e.energy == 0.0 for e in edges if e.level == 1)
    assert all(e.energy == small.detuning for e in edges if e.level == 3)
    for e in edges:
        assert manifold_of(e.level, e.n1, e.n2) is None


def test_manifold_of_roundtrip():
    idx = ManifoldIndex(4, 7)
    assert manifold_of(1, 4, 7) == idx
    assert manifold_of(2, 3, 7) == idx
    assert manifold_of(3, 3, 8) == idx
