"""Closed-system propagation by spectral decomposition and Lindblad RK4 stepping."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .hilbert import DensityMatrix, OperatorMatrix, StateVector

NORM_TOL = 1e-9
TRACE_TOL = 1e-6
POSITIVITY_TOL = 1e-6


class NumericalInvariantError(RuntimeError):
    """A propagated state broke a norm, trace or positivity bound."""

    def __init__(self, invariant: str, detail: str):
        super().__init__(f"{invariant}: {detail}")
        self.invariant = invariant


@dataclass(frozen=True)
class TimeGrid:
    t_start: float
    t_end: float
    n_points: int

    def __post_init__(self):
        if self.n_points < 2:
            raise ValueError("a time grid needs at least two points")
        if not self.t_end > self.t_start:
            raise ValueError("t_end must exceed t_start")

    @property
    def times(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, self.n_points)

    @property
    def spacing(self) -> float:
        return (self.t_end - self.t_start) / (self.n_points - 1)


@dataclass(frozen=True)
class Trajectory:
    """States on a time grid.

    ``data`` is stacked: shape ``(n_points, dim)`` for pure states or
    ``(n_points, dim, dim)`` for density matrices.
    """

    grid: TimeGrid
    space: object
    data: np.ndarray
    level: str = ""
    params: object = None
    meta: dict = field(default_factory=dict)
    support: Optional[np.ndarray] = None

    def __post_init__(self):
        if len(self.data) != self.grid.n_points:
            raise ValueError("one state per grid point required")
        self.data.setflags(write=False)

    def full_data(self, k: int) -> np.ndarray:
        """State ``k`` embedded in the full space (``data`` may hold only ``support``)."""
        if self.support is None:
            return self.data[k]
        d = self.space.dim
        if self.mixed:
            out = np.zeros((d, d), dtype=complex)
            out[np.ix_(self.support, self.support)] = self.data[k]
        else:
            out = np.zeros(d, dtype=complex)
            out[self.support] = self.data[k]
        return out

    @property
    def times(self) -> np.ndarray:
        return self.grid.times

    @property
    def mixed(self) -> bool:
        return self.data.ndim == 3

    def __len__(self):
        return len(self.data)

    def __getitem__(self, k):
        if self.mixed:
            return DensityMatrix(self.space, self.full_data(k), check=False)
        return StateVector(self.space, self.full_data(k))

    @property
    def states(self) -> list:
        return [self[k] for k in range(len(self))]


def _check_hermitian(H: OperatorMatrix):
    scale = max(1.0, float(np.max(np.abs(H.entries), initial=0.0)))
    if not H.is_hermitian(atol=1e-12 * scale):
        raise ValueError("propagate_unitary needs a Hermitian Hamiltonian")


def propagate_unitary(
    H: OperatorMatrix, psi0: StateVector, grid: TimeGrid, level: str = "", params=None
) -> Trajectory:
    """psi(t) = exp(-iHt) psi0 from one eigendecomposition of ``H``."""
    if H.space != psi0.space:
        raise ValueError("Hamiltonian and state live on different spaces")
    _check_hermitian(H)
    energies, vecs = np.linalg.eigh(H.entries)
    coeffs = vecs.conj().T @ psi0.amplitudes
    phases = np.exp(-1j * np.outer(grid.times, energies))
    data = (phases * coeffs) @ vecs.T

    norms = np.linalg.norm(data, axis=1)
    drift = float(np.max(np.abs(norms - psi0.norm())))
    if drift > NORM_TOL:
        raise NumericalInvariantError("norm", f"drift {drift:.3e} exceeds {NORM_TOL:g}")
    return Trajectory(grid, psi0.space, data, level, params)


def operator_norm(op: OperatorMatrix) -> float:
    return float(np.linalg.norm(op.entries, 2)) if op.entries.size else 0.0


def default_step(H: OperatorMatrix, c_ops) -> float:
    """0.05 over an upper bound on the generator norm, ||H|| + sum ||C_j||**2."""
    bound = operator_norm(H) + sum(operator_norm(c) ** 2 for c in c_ops)
    if bound == 0.0:
        return math.inf
    return 0.05 / bound


def invariant_support(ops, seed: np.ndarray) -> np.ndarray:
    """Indices of the smallest coordinate subspace containing ``seed`` and closed under ``ops``."""
    adjacency = np.zeros(ops[0].shape, dtype=bool)
    for op in ops:
        adjacency |= np.abs(op) > 0
    mask = np.asarray(seed, dtype=bool).copy()
    while True:
        grown = mask | (adjacency.astype(np.int64) @ mask.astype(np.int64) > 0)
        if np.array_equal(grown, mask):
            return np.flatnonzero(mask)
        mask = grown


def lindblad_rhs(K: np.ndarray, C: Optional[np.ndarray], rho: np.ndarray) -> np.ndarray:
    """Generator applied to a Hermitian ``rho``.

    ``K`` is the non-Hermitian H - (i/2) sum C^dag C and ``C`` the stacked
    collapse operators. Uses rho K^dag = (K rho)^dag, valid for Hermitian rho.
    """
    x = K @ rho
    out = -1j * x
    out += out.conj().T
    if C is not None:
        out += (C @ rho @ C.conj().transpose(0, 2, 1)).sum(axis=0)
    return out


def propagate_lindblad(
    H: OperatorMatrix,
    c_ops,
    rho0,
    grid: TimeGrid,
    step: Optional[float] = None,
    level: str = "",
    params=None,
    check: bool = True,
) -> Trajectory:
    """Fixed-step classical RK4 integration of the Lindblad master equation.

    ``step`` is an upper bound: each grid interval is split into
    ``ceil(spacing/step)`` equal sub-steps so the grid is hit exactly.
    ``rho0`` may be a :class:`DensityMatrix` or a :class:`StateVector`.

    Integration runs on the coordinate subspace reachable from the support
    of ``rho0`` under H, the C_j and C_j^dag C_j; the density matrix has no
    weight outside it at any time, so the restriction is exact.

    Raises
    ------
    NumericalInvariantError
        If the trace drifts by more than 1e-6 or an eigenvalue drops below
        -1e-6 at any grid point (with ``check``).
    """
    if isinstance(rho0, StateVector):
        rho0 = rho0.to_density()
    space = rho0.space
    if H.space != space or any(c.space != space for c in c_ops):
        raise ValueError("all operators must act on the state's space")
    if step is None:
        step = default_step(H, c_ops)
    if not step > 0:
        raise ValueError("step must be positive")

    n_sub = max(1, math.ceil(grid.spacing / step - 1e-9))
    h = grid.spacing / n_sub
    C = np.array([c.entries for c in c_ops]) if c_ops else None
    K = H.entries.astype(complex)
    decay = [] if C is None else [c.conj().T @ c for c in C]
    if C is not None:
        K = K - 0.5j * sum(decay)

    seed = (np.abs(rho0.entries) > 0).any(axis=0)
    support = invariant_support([H.entries, *([] if C is None else C), *decay], seed)
    sub = np.ix_(support, support)
    K = np.ascontiguousarray(K[sub])
    if C is not None:
        C = np.ascontiguousarray(C[:, support][:, :, support])

    data = np.empty((grid.n_points, len(support), len(support)), dtype=complex)
    rho = rho0.entries[sub].copy()
    data[0] = rho
    f = lindblad_rhs
    for k in range(1, grid.n_points):
        for _ in range(n_sub):
            k1 = f(K, C, rho)
            k2 = f(K, C, rho + 0.5 * h * k1)
            k3 = f(K, C, rho + 0.5 * h * k2)
            k4 = f(K, C, rho + h * k3)
            rho = rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        data[k] = rho

    full = len(support) == space.dim
    traj = Trajectory(
        grid, space, data, level, params, {"step": h}, None if full else support
    )
    if check:
        check_density_trajectory(traj, rho0.trace())
    return traj


def check_density_trajectory(traj: Trajectory, trace0: float = 1.0):
    traces = np.trace(traj.data, axis1=1, axis2=2).real
    drift = float(np.max(np.abs(traces - trace0)))
    if drift > TRACE_TOL:
        raise NumericalInvariantError("trace", f"drift {drift:.3e} exceeds {TRACE_TOL:g}")
    herm = 0.5 * (traj.data + traj.data.conj().transpose(0, 2, 1))
    min_eig = float(np.linalg.eigvalsh(herm).min())
    if min_eig < -POSITIVITY_TOL:
        raise NumericalInvariantError(
            "positivity", f"minimum eigenvalue {min_eig:.3e} below {-POSITIVITY_TOL:g}"
        )
