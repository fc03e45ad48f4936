"""Observables on pure or mixed states of the atom-plus-two-modes system."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .hilbert import DensityMatrix, StateVector, reduced_matrix
from .model import excitation_operator

EIG_CUTOFF = 1e-12


def _diagonal(state) -> np.ndarray:
    if isinstance(state, StateVector):
        return np.abs(state.amplitudes) ** 2
    return np.diagonal(state.entries).real


def photon_populations(state) -> dict:
    """P(m, n) summed over atomic levels."""
    space = state.space
    probs = _diagonal(state).reshape(space.shape).sum(axis=0)
    return {(m, n): float(probs[m, n]) for m in range(space.n_fock) for n in range(space.n_fock)}


def population(state, m: int, n: int) -> Optional[float]:
    """P(m, n), or None when (m, n) lies outside the truncation."""
    space = state.space
    if not (0 <= m <= space.n_max and 0 <= n <= space.n_max):
        return None
    return float(_diagonal(state).reshape(space.shape)[:, m, n].sum())


def atom_ground_probability(state) -> float:
    space = state.space
    if space.atom_dim == 1:
        return 1.0
    return float(_diagonal(state).reshape(space.shape)[0].sum())


def von_neumann_entropy(rho: np.ndarray, base: float = 2.0) -> float:
    evals = np.linalg.eigvalsh(rho)
    evals = evals[evals > EIG_CUTOFF]
    return float(-(evals * np.log(evals)).sum() / np.log(base))


def entanglement_entropy(state) -> float:
    """Base-2 entropy of mode a, tracing out the atom and mode b.

    For mixed states this is the entropy of the reduced state only, not an
    entanglement measure.
    """
    raw = state.amplitudes if isinstance(state, StateVector) else state.entries
    return max(0.0, von_neumann_entropy(reduced_matrix(raw, state.space, "mode_a")))


def bell_fidelity(state, m: int) -> float:
    """Overlap with (|g,m,0> + e^{i phi}|g,0,m>)/sqrt(2), maximised over phi.

    Closed form: (rho_xx + rho_yy)/2 + |rho_xy| with x = (g,m,0), y = (g,0,m).
    """
    space = state.space
    if not 1 <= m <= space.n_max:
        raise ValueError(f"Bell photon number m={m} outside 1..{space.n_max}")
    x = space.encode(0, m, 0)
    y = space.encode(0, 0, m)
    if isinstance(state, StateVector):
        ax, ay = state.amplitudes[x], state.amplitudes[y]
        rxx, ryy, rxy = abs(ax) ** 2, abs(ay) ** 2, ax * np.conj(ay)
    else:
        rho = state.entries
        rxx, ryy, rxy = rho[x, x].real, rho[y, y].real, rho[x, y]
    return float(0.5 * (rxx + ryy) + abs(rxy))


def excitation_number(state) -> float:
    """<a^dag a + b^dag b + P_i1 + P_i2 + 2 P_e> (atomic terms per model level)."""
    return excitation_operator(state.space).expect(state)


@dataclass(frozen=True)
class ObservableRecord:
    t: float
    pop: dict
    p_ground: float
    entropy_bits: float
    bell_fidelity: Optional[float]
    n_expect: float
    trace: Optional[float] = None


def record(state, t: float, bell_m: Optional[int] = None) -> ObservableRecord:
    mixed = isinstance(state, DensityMatrix)
    return ObservableRecord(
        t=float(t),
        pop=photon_populations(state),
        p_ground=atom_ground_probability(state),
        entropy_bits=entanglement_entropy(state),
        bell_fidelity=None if bell_m is None else bell_fidelity(state, bell_m),
        n_expect=excitation_number(state),
        trace=state.trace() if mixed else None,
    )


def trajectory_records(traj, bell_m: Optional[int] = None) -> list:
    return [record(traj[k], t, bell_m) for k, t in enumerate(traj.times)]
