import math

import numpy as np
import pytest

from twocavity.evolve import TimeGrid, propagate_unitary
from twocavity.hilbert import DensityMatrix, StateVector, basis_state, make_space
from twocavity.model import ModelParams, full_hamiltonian, t0
from twocavity.observe import (
    atom_ground_probability,
    bell_fidelity,
    entanglement_entropy,
    excitation_number,
    photon_populations,
    record,
)

S2 = 1 / math.sqrt(2)


@pytest.fixture
def space():
    return make_space(2, 4)


def bell(space, m, phase=1.0):
    return (basis_state(space, "g", m, 0) + phase * basis_state(space, "g", 0, m)) * S2


def test_populations_examples(space):
    pops = photon_populations(basis_state(space, "g", 0, 2))
    assert pops[(0, 2)] == 1 and sum(pops.values()) == 1
    pops = photon_populations(bell(space, 2))
    assert pops[(0, 2)] == pytest.approx(0.5) and pops[(2, 0)] == pytest.approx(0.5)


def test_populations_sum_over_atom(space):
    psi = (basis_state(space, "g", 0, 1) + basis_state(space, "i2", 0, 1)) * S2
    assert photon_populations(psi)[(0, 1)] == pytest.approx(1.0)


def test_populations_mixed_sum_to_trace(space, rng):
    g = rng.normal(size=(space.dim, space.dim)) + 1j * rng.normal(size=(space.dim, space.dim))
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    assert sum(photon_populations(DensityMatrix(space, rho)).values()) == pytest.approx(1.0, abs=1e-8)


def test_atom_ground_probability(space):
    assert atom_ground_probability(basis_state(space, "g", 0, 2)) == 1
    assert atom_ground_probability(basis_state(space, "e", 0, 0)) == 0
    assert atom_ground_probability(basis_state(make_space(2, 1), "g", 0, 2)) == 1


def test_entropy_examples(space):
    assert entanglement_entropy(basis_state(space, "g", 0, 2)) == pytest.approx(0, abs=1e-12)
    assert entanglement_entropy(bell(space, 2)) == pytest.approx(1.0)
    big = make_space(4, 1)
    assert entanglement_entropy(bell(big, 4)) == pytest.approx(1.0)


def test_entropy_mixed_state(space):
    rho = 0.5 * (basis_state(space, "g", 0, 2).to_density().entries
                 + basis_state(space, "g", 2, 0).to_density().entries)
    assert entanglement_entropy(DensityMatrix(space, rho)) == pytest.approx(1.0)


def test_bell_fidelity_examples(space):
    assert bell_fidelity(bell(space, 2, 1j), 2) == pytest.approx(1.0)
    assert bell_fidelity(bell(space, 2, -1), 2) == pytest.approx(1.0)
    assert bell_fidelity(basis_state(space, "g", 2, 0), 2) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        bell_fidelity(basis_state(space, "g", 2, 0), 3)


def test_bell_fidelity_brute_force_phase(space, rng):
    # closed form against a direct scan over the relative phase
    for _ in range(10):
        v = rng.normal(size=space.dim) + 1j * rng.normal(size=space.dim)
        psi = StateVector(space, v).normalize()
        best = max(abs(bell(space, 2, np.exp(1j * phi)).inner(psi)) ** 2
                   for phi in np.linspace(0, 2 * np.pi, 20001))
        assert bell_fidelity(psi, 2) == pytest.approx(best, abs=1e-7)
        assert bell_fidelity(psi.to_density(), 2) == pytest.approx(bell_fidelity(psi, 2))


def test_excitation_number(space):
    assert excitation_number(basis_state(space, "g", 0, 2)) == pytest.approx(2)
    assert excitation_number(basis_state(space, "e", 0, 0)) == pytest.approx(2)
    assert excitation_number(basis_state(space, "i1", 1, 0)) == pytest.approx(2)


def test_entropy_invariant_under_local_diagonal_phases(space, rng):
    # frame rotations are products of per-factor phases; an arbitrary
    # diagonal unitary is nonlocal and may change the entropy
    for _ in range(20):
        v = rng.normal(size=space.dim) + 1j * rng.normal(size=space.dim)
        psi = StateVector(space, v).normalize()
        phases = [np.exp(1j * rng.uniform(0, 2 * np.pi, k)) for k in space.shape]
        diag = np.kron(phases[0], np.kron(phases[1], phases[2]))
        rotated = StateVector(space, diag * psi.amplitudes)
        assert entanglement_entropy(rotated) == pytest.approx(entanglement_entropy(psi), abs=1e-10)


def test_perfect_bell_fidelity_means_one_bit(space):
    for phase in np.exp(1j * np.linspace(0, 2 * np.pi, 7)):
        psi = bell(space, 2, phase)
        assert bell_fidelity(psi, 2) == pytest.approx(1.0, abs=1e-12)
        assert entanglement_entropy(psi) == pytest.approx(1.0, abs=1e-6)


def test_record_fields(space):
    rec = record(basis_state(space, "g", 0, 2), 3.0, bell_m=2)
    assert rec.t == 3.0 and rec.bell_fidelity == pytest.approx(0.5) and rec.trace is None
    rec = record(basis_state(space, "g", 0, 2).to_density(), 0.0)
    assert rec.bell_fidelity is None and rec.trace == pytest.approx(1.0)


def _fig2_at(times):
    params = ModelParams(delta_1=20, delta_2=20, delta_small=5, n_max=2)
    space = make_space(2, 4)
    grid = TimeGrid(times[0], times[-1], len(times))
    return propagate_unitary(full_hamiltonian(params, space), basis_state(space, "g", 0, 2), grid)


@pytest.mark.xfail(strict=True, reason="full-model transfer lags T0 by ~2.5%: P(2,0)=0.480 at T0")
def test_fig2_populations_cross_at_t0():
    params = ModelParams(delta_1=20, delta_2=20, delta_small=5, n_max=2)
    pops = photon_populations(_fig2_at([0.0, t0(params)])[1])
    assert pops[(0, 2)] == pytest.approx(0.5, abs=0.01)
    assert pops[(2, 0)] == pytest.approx(0.5, abs=0.01)


def test_fig2_populations_balanced_at_fidelity_peak(fig_run):
    _, records = fig_run("fig2")
    best = max(records, key=lambda r: r.bell_fidelity)
    assert best.pop[(0, 2)] == pytest.approx(0.5, abs=0.01)
    assert best.pop[(2, 0)] == pytest.approx(0.5, abs=0.01)
