"""Two cavity modes entangled through a virtual two-photon process in a four-level atom.

Three levels of description are provided: the full atom-cavity model, the
two-photon model with the intermediate levels eliminated, and the effective
mode-mode Hamiltonian with the atom eliminated.
"""

from .evolve import (
    NumericalInvariantError,
    TimeGrid,
    Trajectory,
    default_step,
    propagate_lindblad,
    propagate_unitary,
)
from .hilbert import (
    DensityMatrix,
    HilbertSpace,
    OperatorMatrix,
    StateVector,
    annihilator,
    atomic_transition,
    basis_state,
    creator,
    make_space,
    partial_trace,
)
from .model import (
    ModelParams,
    RegimeReport,
    collapse_operators,
    effective_hamiltonian,
    excitation_operator,
    full_hamiltonian,
    t0,
    two_photon_hamiltonian,
    validate_regime,
)
from .observe import (
    atom_ground_probability,
    bell_fidelity,
    entanglement_entropy,
    excitation_number,
    photon_populations,
)

__version__ = "0.1.0"
