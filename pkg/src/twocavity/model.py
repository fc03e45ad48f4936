"""Hamiltonians, collapse operators and regime checks for the two-cavity scheme.

All Hamiltonians are returned divided by hbar and written in the frame
rotating at the cavity frequency times the excitation number, so the bare
optical frequency never appears. Rates are in units of the coupling ``g``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass


from .hilbert import (
    ATOM_LEVELS,
    LEVEL_EXCITATION,
    HilbertSpace,
    OperatorMatrix,
    annihilator,
    atomic_transition,
    number_operator,
    projector,
)

REGIME_THRESHOLD = 4.0


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters in units of ``g``.

    ``delta_1``/``delta_2`` are the detunings of the cavity frequency from the
    two intermediate levels, ``delta_small`` the two-photon detuning from the
    upper level.
    """

    g: float = 1.0
    delta_1: float = 20.0
    delta_2: float = 20.0
    delta_small: float = 5.0
    kappa: float = 0.0
    gamma: float = 0.0
    n_max: int = 2

    def __post_init__(self):
        if not self.g > 0:
            raise ValueError("g must be positive")
        if self.n_max < 0:
            raise ValueError("n_max must be >= 0")
        if self.kappa < 0 or self.gamma < 0:
            raise ValueError("decay rates must be non-negative")
        for name in ("delta_1", "delta_2", "delta_small"):
            value = getattr(self, name)
            if value == 0 or not math.isfinite(value):
                raise ValueError(f"{name} must be finite and nonzero")

    @property
    def degenerate(self) -> bool:
        return self.delta_1 == self.delta_2

    @property
    def lam(self) -> float:
        """Two-photon coupling g**2/Delta (degenerate intermediate levels only)."""
        _require_degenerate(self)
        return self.g**2 / self.delta_1

    @property
    def effective_rate(self) -> float:
        """Coefficient lam**2/delta of the mode-mode Hamiltonian."""
        return self.lam**2 / self.delta_small


def _require_degenerate(params: ModelParams):
    if not params.degenerate:
        raise ValueError(
            "this quantity needs delta_1 == delta_2; got "
            f"{params.delta_1} and {params.delta_2}"
        )


def _check_atom_dim(space: HilbertSpace, expected: int):
    if space.atom_dim != expected:
        raise ValueError(f"expected a space with atom_dim={expected}, got {space.atom_dim}")


def excitation_operator(space: HilbertSpace) -> OperatorMatrix:
    """a^dag a + b^dag b plus the atomic excitation (1 per intermediate level, 2 for e)."""
    n_op = number_operator(space, "a") + number_operator(space, "b")
    if space.atom_dim == 4:
        n_op = n_op + projector(space, "i1") + projector(space, "i2") + 2.0 * projector(space, "e")
    elif space.atom_dim == 2:
        n_op = n_op + 2.0 * projector(space, "e")
    return n_op


def full_hamiltonian(params: ModelParams, space: HilbertSpace) -> OperatorMatrix:
    """Four-level atom ladder-coupled to both modes.

    H = -D1 P_i1 - D2 P_i2 - d P_e
        + g(|g><i1| a^dag + |i1><e| a^dag + |g><i2| b^dag + |i2><e| b^dag + h.c.)
    """
    _check_atom_dim(space, 4)
    a_dag = annihilator(space, "a").dag
    b_dag = annihilator(space, "b").dag
    t = lambda to, frm: atomic_transition(space, to, frm)
    coupling = (
        t("g", "i1") @ a_dag
        + t("i1", "e") @ a_dag
        + t("g", "i2") @ b_dag
        + t("i2", "e") @ b_dag
    ).entries
    mat = (
        -params.delta_1 * projector(space, "i1").entries
        - params.delta_2 * projector(space, "i2").entries
        - params.delta_small * projector(space, "e").entries
        + params.g * (coupling + coupling.conj().T)
    )
    return OperatorMatrix(space, mat, hermitian_flag=True)


def two_photon_hamiltonian(params: ModelParams, space: HilbertSpace) -> OperatorMatrix:
    """Two-level atom exchanging photon pairs with either mode.

    H = 2 lam (a^dag a + b^dag b) - d P_e + lam(|g><e| (a^dag^2 + b^dag^2) + h.c.)
    """
    _check_atom_dim(space, 2)
    lam = params.lam
    a = annihilator(space, "a").entries
    b = annihilator(space, "b").entries
    lower = atomic_transition(space, "g", "e").entries
    pair_up = a.conj().T @ a.conj().T + b.conj().T @ b.conj().T
    coupling = lower @ pair_up
    mat = (
        2.0 * lam * (number_operator(space, "a").entries + number_operator(space, "b").entries)
        - params.delta_small * projector(space, "e").entries
        + lam * (coupling + coupling.conj().T)
    )
    return OperatorMatrix(space, mat, hermitian_flag=True)


def effective_hamiltonian(params: ModelParams, space: HilbertSpace) -> OperatorMatrix:
    """(lam**2/d)(a^dag^2 a^2 + b^dag^2 b^2 + a^dag^2 b^2 + b^dag^2 a^2) on the modes."""
    _check_atom_dim(space, 1)
    a = annihilator(space, "a").entries
    b = annihilator(space, "b").entries
    a2, b2 = a @ a, b @ b
    a2d, b2d = a2.conj().T, b2.conj().T
    mat = params.effective_rate * (a2d @ a2 + b2d @ b2 + a2d @ b2 + b2d @ a2)
    return OperatorMatrix(space, mat, hermitian_flag=True)


def collapse_operators(params: ModelParams, space: HilbertSpace) -> list:
    """Cavity loss on both modes plus, for gamma > 0, cascade atomic decay."""
    ops = []
    if params.kappa > 0:
        rate = math.sqrt(params.kappa)
        ops += [rate * annihilator(space, "a"), rate * annihilator(space, "b")]
    if params.gamma > 0:
        rate = math.sqrt(params.gamma)
        if space.atom_dim == 4:
            channels = [("g", "i1"), ("g", "i2"), ("i1", "e"), ("i2", "e")]
        elif space.atom_dim == 2:
            channels = [("g", "e")]
        else:
            channels = []
        ops += [rate * atomic_transition(space, to, frm) for to, frm in channels]
    return ops


def hamiltonian(level: str, params: ModelParams, space: HilbertSpace) -> OperatorMatrix:
    builders = {
        "full": full_hamiltonian,
        "two_photon": two_photon_hamiltonian,
        "effective": effective_hamiltonian,
    }
    try:
        return builders[level](params, space)
    except KeyError:
        raise ValueError(f"unknown Hamiltonian level {level!r}") from None


ATOM_DIM = {"full": 4, "two_photon": 2, "effective": 1}


def required_n_max(level: str, atom, m: int, n: int) -> int:
    """Smallest truncation that holds every state reachable from ``|atom, m, n>``.

    Equal to the conserved excitation number: photons plus 1 for an
    intermediate level, 2 for the upper level.
    """
    name = atom if isinstance(atom, str) else ATOM_LEVELS[ATOM_DIM[level]][atom]
    return m + n + LEVEL_EXCITATION[name]


def make_model_space(level: str, params: ModelParams, excitation: int | None = None) -> HilbertSpace:
    if excitation is not None and params.n_max < excitation:
        warnings.warn(
            f"n_max={params.n_max} is below the conserved excitation number {excitation}; "
            "dynamics will be truncated",
            stacklevel=2,
        )
    return HilbertSpace(n_max=params.n_max, atom_dim=ATOM_DIM[level])


@dataclass(frozen=True)
class RegimeReport:
    ratio_Delta_over_g: float
    ratio_Delta_over_delta: float
    ratio_delta_over_lambda: float
    ratio_lambda2_over_delta_vs_kappa: float
    ratio_lambda2_over_delta_vs_gamma: float
    threshold: float = REGIME_THRESHOLD

    def _ok(self, value) -> bool:
        return value >= self.threshold

    @property
    def flags(self) -> dict:
        return {
            "Delta_over_g": self._ok(self.ratio_Delta_over_g),
            "Delta_over_delta": self._ok(self.ratio_Delta_over_delta),
            "delta_over_lambda": self._ok(self.ratio_delta_over_lambda),
            "lambda2_over_delta_vs_kappa": self._ok(self.ratio_lambda2_over_delta_vs_kappa),
            "lambda2_over_delta_vs_gamma": self._ok(self.ratio_lambda2_over_delta_vs_gamma),
        }

    @property
    def adiabatic(self) -> bool:
        """True when all three detuning hierarchies hold."""
        f = self.flags
        return f["Delta_over_g"] and f["Delta_over_delta"] and f["delta_over_lambda"]

    @property
    def all_pass(self) -> bool:
        return all(self.flags.values())

    def lines(self) -> list:
        out = []
        for name, ok in self.flags.items():
            value = getattr(self, "ratio_" + name)
            out.append(f"{name} = {value:.6g} ({'pass' if ok else 'FAIL'})")
        out.append(f"adiabatic = {self.adiabatic}")
        return out


def validate_regime(params: ModelParams) -> RegimeReport:
    Delta = min(abs(params.delta_1), abs(params.delta_2))
    delta = abs(params.delta_small)
    lam = params.g**2 / Delta
    slow_rate = lam**2 / delta
    return RegimeReport(
        ratio_Delta_over_g=Delta / params.g,
        ratio_Delta_over_delta=Delta / delta,
        ratio_delta_over_lambda=delta / lam,
        ratio_lambda2_over_delta_vs_kappa=slow_rate / params.kappa if params.kappa > 0 else math.inf,
        ratio_lambda2_over_delta_vs_gamma=slow_rate / params.gamma if params.gamma > 0 else math.inf,
    )


def t0(params: ModelParams) -> float:
    """Entangling time d*pi/(8 lam**2) = d*pi*Delta**2/(8 g**4)."""
    _require_degenerate(params)
    return params.delta_small * math.pi * params.delta_1**2 / (8.0 * params.g**4)
