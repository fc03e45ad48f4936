"""Truncated atom (x) mode-a (x) mode-b Hilbert space.

Basis ordering is fixed as atom (x) mode_a (x) mode_b; the label
``(atom, m, n)`` maps to ``atom * (n_max+1)**2 + m * (n_max+1) + n``.
All index arithmetic goes through :meth:`HilbertSpace.encode` /
:meth:`HilbertSpace.decode`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

ATOM_LEVELS = {
    4: ("g", "i1", "i2", "e"),
    2: ("g", "e"),
    1: ("g",),
}

# atomic contribution to the conserved excitation number, per level name
LEVEL_EXCITATION = {"g": 0, "i1": 1, "i2": 1, "e": 2}

SUBSYSTEMS = ("atom", "mode_a", "mode_b")


@dataclass(frozen=True)
class HilbertSpace:
    """Atom with ``atom_dim`` levels coupled to two modes truncated at ``n_max``."""

    n_max: int
    atom_dim: int

    def __post_init__(self):
        if self.atom_dim not in ATOM_LEVELS:
            raise ValueError(f"atom_dim must be one of 1, 2, 4; got {self.atom_dim}")
        if self.n_max < 0:
            raise ValueError(f"n_max must be >= 0; got {self.n_max}")

    @property
    def n_fock(self) -> int:
        return self.n_max + 1

    @property
    def dim(self) -> int:
        return self.atom_dim * self.n_fock**2

    @property
    def levels(self) -> tuple:
        return ATOM_LEVELS[self.atom_dim]

    @property
    def shape(self) -> tuple:
        """Tensor shape (atom, mode_a, mode_b)."""
        return (self.atom_dim, self.n_fock, self.n_fock)

    def level_index(self, level) -> int:
        """Index of an atomic level given by name (``"g"``, ``"i1"``...) or integer."""
        if isinstance(level, str):
            try:
                return self.levels.index(level)
            except ValueError:
                raise ValueError(
                    f"level {level!r} not available for atom_dim={self.atom_dim}"
                ) from None
        level = int(level)
        if not 0 <= level < self.atom_dim:
            raise ValueError(f"level {level} out of range for atom_dim={self.atom_dim}")
        return level

    def encode(self, atom, m: int, n: int) -> int:
        alpha = self.level_index(atom)
        for label, k in (("m", m), ("n", n)):
            if not 0 <= k <= self.n_max:
                raise ValueError(f"{label}={k} outside Fock truncation 0..{self.n_max}")
        return alpha * self.n_fock**2 + m * self.n_fock + n

    def decode(self, index: int) -> tuple[int, int, int]:
        if not 0 <= index < self.dim:
            raise ValueError(f"index {index} out of range for dim={self.dim}")
        alpha, rest = divmod(index, self.n_fock**2)
        m, n = divmod(rest, self.n_fock)
        return alpha, m, n

    def labels(self):
        """All ``(level_name, m, n)`` labels in basis order."""
        return [
            (self.levels[a], m, n)
            for a in range(self.atom_dim)
            for m in range(self.n_fock)
            for n in range(self.n_fock)
        ]


def make_space(n_max: int, atom_dim: int) -> HilbertSpace:
    return HilbertSpace(n_max=int(n_max), atom_dim=int(atom_dim))


@dataclass(frozen=True)
class StateVector:
    space: HilbertSpace
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.space.dim,):
            raise ValueError(f"expected amplitudes of shape ({self.space.dim},), got {amps.shape}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalize(self) -> "StateVector":
        nrm = self.norm()
        if nrm == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return StateVector(self.space, self.amplitudes / nrm)

    def to_density(self) -> "DensityMatrix":
        return DensityMatrix(self.space, np.outer(self.amplitudes, self.amplitudes.conj()))

    def inner(self, other: "StateVector") -> complex:
        """<self|other>."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def __add__(self, other: "StateVector") -> "StateVector":
        _check_same_space(self.space, other.space)
        return StateVector(self.space, self.amplitudes + other.amplitudes)

    def __mul__(self, scalar) -> "StateVector":
        return StateVector(self.space, self.amplitudes * scalar)

    __rmul__ = __mul__


@dataclass(frozen=True)
class DensityMatrix:
    space: HilbertSpace
    entries: np.ndarray
    check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        rho = np.asarray(self.entries, dtype=complex)
        d = self.space.dim
        if rho.shape != (d, d):
            raise ValueError(f"expected a {d}x{d} matrix, got {rho.shape}")
        if self.check:
            if np.max(np.abs(rho - rho.conj().T)) > 1e-10:
                raise ValueError("density matrix is not Hermitian")
            if abs(np.trace(rho).real - 1.0) > 1e-8:
                raise ValueError(f"density matrix trace {np.trace(rho).real} != 1")
            if np.linalg.eigvalsh(rho).min() < -1e-8:
                raise ValueError("density matrix has negative eigenvalues")
        rho.setflags(write=False)
        object.__setattr__(self, "entries", rho)

    def trace(self) -> float:
        return float(np.trace(self.entries).real)


@dataclass(frozen=True)
class OperatorMatrix:
    space: HilbertSpace
    entries: np.ndarray
    hermitian_flag: bool = False

    def __post_init__(self):
        op = np.asarray(self.entries, dtype=complex)
        d = self.space.dim
        if op.shape != (d, d):
            raise ValueError(f"expected a {d}x{d} operator, got {op.shape}")
        if self.hermitian_flag and op.size and np.max(np.abs(op - op.conj().T)) > 1e-12:
            raise ValueError("operator flagged Hermitian but max|A - A^dag| > 1e-12")
        op.setflags(write=False)
        object.__setattr__(self, "entries", op)

    @property
    def dag(self) -> "OperatorMatrix":
        return OperatorMatrix(self.space, self.entries.conj().T, self.hermitian_flag)

    def is_hermitian(self, atol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.entries - self.entries.conj().T), initial=0.0) <= atol)

    def apply(self, psi: StateVector) -> StateVector:
        _check_same_space(self.space, psi.space)
        return StateVector(self.space, self.entries @ psi.amplitudes)

    def expect(self, state) -> float:
        """Real part of the expectation value in a pure or mixed state."""
        if isinstance(state, StateVector):
            v = state.amplitudes
            return float(np.vdot(v, self.entries @ v).real)
        return float(np.trace(self.entries @ state.entries).real)

    def __matmul__(self, other):
        if isinstance(other, StateVector):
            return self.apply(other)
        _check_same_space(self.space, other.space)
        return OperatorMatrix(self.space, self.entries @ other.entries)

    def __add__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        _check_same_space(self.space, other.space)
        return OperatorMatrix(
            self.space, self.entries + other.entries, self.hermitian_flag and other.hermitian_flag
        )

    def __sub__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return self + (-1.0) * other

    def __mul__(self, scalar) -> "OperatorMatrix":
        herm = self.hermitian_flag and np.isreal(scalar)
        return OperatorMatrix(self.space, self.entries * scalar, bool(herm))

    __rmul__ = __mul__


def _check_same_space(s1: HilbertSpace, s2: HilbertSpace):
    if s1 != s2:
        raise ValueError(f"space mismatch: {s1} vs {s2}")


def basis_state(space: HilbertSpace, atom, m: int, n: int) -> StateVector:
    amps = np.zeros(space.dim, dtype=complex)
    amps[space.encode(atom, m, n)] = 1.0
    return StateVector(space, amps)


def _ladder(n_fock: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n_fock, dtype=float)), k=1)


def annihilator(space: HilbertSpace, mode: str) -> OperatorMatrix:
    """Lowering operator of ``mode`` ('a' or 'b'), identity on the other factors."""
    eye_atom = np.eye(space.atom_dim)
    eye_mode = np.eye(space.n_fock)
    low = _ladder(space.n_fock)
    if mode == "a":
        mat = np.kron(eye_atom, np.kron(low, eye_mode))
    elif mode == "b":
        mat = np.kron(eye_atom, np.kron(eye_mode, low))
    else:
        raise ValueError(f"mode must be 'a' or 'b'; got {mode!r}")
    return OperatorMatrix(space, mat)


def creator(space: HilbertSpace, mode: str) -> OperatorMatrix:
    return annihilator(space, mode).dag


def number_operator(space: HilbertSpace, mode: str) -> OperatorMatrix:
    a = annihilator(space, mode)
    return OperatorMatrix(space, a.entries.conj().T @ a.entries, hermitian_flag=True)


def identity(space: HilbertSpace) -> OperatorMatrix:
    return OperatorMatrix(space, np.eye(space.dim), hermitian_flag=True)


def atomic_transition(space: HilbertSpace, to, frm) -> OperatorMatrix:
    """``|to><frm|`` on the atom, identity on both modes."""
    i, j = space.level_index(to), space.level_index(frm)
    proj = np.zeros((space.atom_dim, space.atom_dim))
    proj[i, j] = 1.0
    mat = np.kron(proj, np.eye(space.n_fock**2))
    return OperatorMatrix(space, mat, hermitian_flag=(i == j))


def projector(space: HilbertSpace, level) -> OperatorMatrix:
    return atomic_transition(space, level, level)


def reduced_matrix(entries: np.ndarray, space: HilbertSpace, keep: str) -> np.ndarray:
    """Partial trace of a raw density matrix (or pure amplitude vector) onto ``keep``."""
    if keep not in SUBSYSTEMS:
        raise ValueError(f"keep must be one of {SUBSYSTEMS}; got {keep!r}")
    axis = SUBSYSTEMS.index(keep)
    entries = np.asarray(entries)
    if entries.ndim == 1:
        psi = np.moveaxis(entries.reshape(space.shape), axis, 0)
        psi = psi.reshape(psi.shape[0], -1)
        return psi @ psi.conj().T
    rho = entries.reshape(space.shape + space.shape)
    letters_row = ["i", "j", "k"]
    letters_col = ["i", "j", "k"]
    letters_col[axis] = "x"
    spec = "".join(letters_row) + "".join(letters_col) + "->" + letters_row[axis] + "x"
    return np.einsum(spec, rho)


def partial_trace(rho, keep: str) -> DensityMatrix:
    """Reduced state on ``keep`` in {'atom', 'mode_a', 'mode_b'}.

    Accepts a :class:`StateVector` or :class:`DensityMatrix`. The result is
    a single-factor :class:`ReducedState` (dimension ``atom_dim`` or
    ``n_max+1``).
    """
    if isinstance(rho, StateVector):
        mat = reduced_matrix(rho.amplitudes, rho.space, keep)
    else:
        mat = reduced_matrix(rho.entries, rho.space, keep)
    return ReducedState(keep, mat)


@dataclass(frozen=True)
class ReducedState:
    """Density matrix on a single tensor factor."""

    subsystem: str
    entries: np.ndarray

    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)
