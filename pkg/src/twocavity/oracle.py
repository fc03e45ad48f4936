"""Closed-form dynamics of the mode-mode Hamiltonian on small invariant subspaces.

These are written out by hand and do not touch :mod:`hilbert` or
:mod:`evolve`, so agreement with the simulator is a real check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SQ2 = math.sqrt(2.0)
SQ3 = math.sqrt(3.0)


@dataclass(frozen=True)
class SubspaceSolution:
    times: np.ndarray
    amplitudes: np.ndarray  # (n_times, len(basis))
    basis: tuple

    def populations(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def amplitude(self, label) -> np.ndarray:
        return self.amplitudes[:, self.basis.index(label)]


def _rate(params) -> float:
    if params.delta_1 != params.delta_2:
        raise ValueError("closed forms assume delta_1 == delta_2")
    lam = params.g**2 / params.delta_1
    return lam**2 / params.delta_small


def predicted_t0(params) -> float:
    """delta*pi/(8 lam**2)."""
    if params.delta_1 != params.delta_2:
        raise ValueError("closed forms assume delta_1 == delta_2")
    return params.delta_small * math.pi * params.delta_1**2 / (8.0 * params.g**4)


def rabi_two_level(params, times, initial=(1.0, 0.0)) -> SubspaceSolution:
    """Evolution in span{|2,0>, |0,2>} under c*(2 I + 2 sigma_x), c = lam**2/delta.

    From |2,0>: amp(0,2) = -i exp(-2ict) sin(2ct).
    """
    c = _rate(params)
    t = np.asarray(times, dtype=float)
    u, v = complex(initial[0]), complex(initial[1])
    phase = np.exp(-2j * c * t)
    cos, sin = np.cos(2 * c * t), np.sin(2 * c * t)
    amps = np.stack(
        [phase * (cos * u - 1j * sin * v), phase * (cos * v - 1j * sin * u)], axis=1
    )
    return SubspaceSolution(t, amps, ((2, 0), (0, 2)))


# Eigenvectors of [[12, 2r6, 0], [2r6, 4, 2r6], [0, 2r6, 12]] in the basis
# (|4,0>, |2,2>, |0,4>): the antisymmetric mirror state plus the two
# eigenvectors of the symmetric 2x2 block [[12, 4r3], [4r3, 4]].
THREE_LEVEL_ENERGIES = np.array([0.0, 12.0, 16.0])
THREE_LEVEL_VECTORS = np.array(
    [
        [1 / (2 * SQ2), 1 / SQ2, SQ3 / (2 * SQ2)],
        [-SQ3 / 2, 0.0, 0.5],
        [1 / (2 * SQ2), -1 / SQ2, SQ3 / (2 * SQ2)],
    ]
)


def three_level(params, times, initial=(1.0, 0.0, 0.0)) -> SubspaceSolution:
    """Exact evolution in span{|4,0>, |2,2>, |0,4>}; spectrum {0, 12, 16} lam**2/delta."""
    c = _rate(params)
    t = np.asarray(times, dtype=float)
    psi0 = np.asarray(initial, dtype=complex)
    coeffs = THREE_LEVEL_VECTORS.T @ psi0
    phases = np.exp(-1j * c * np.outer(t, THREE_LEVEL_ENERGIES))
    amps = (phases * coeffs) @ THREE_LEVEL_VECTORS.T
    return SubspaceSolution(t, amps, ((4, 0), (2, 2), (0, 4)))


def schmidt_entropy(p: np.ndarray) -> np.ndarray:
    """Entropy in bits of Schmidt weights given as rows of ``p``."""
    p = np.clip(np.asarray(p, dtype=float), 0.0, None)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 1e-12, -p * np.log2(p), 0.0)
    return terms.sum(axis=-1)
