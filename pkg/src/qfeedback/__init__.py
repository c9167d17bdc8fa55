"""Time-delayed coherent feedback for two emitters in a driven cavity.

A numpy/numba library that integrates the two-excitation wavefunction of a
weakly driven cavity QED system coupled to a structured photon continuum
(feedback via a mirror at distance L, delay tau = 2 L / c), computes photon
statistics (photon number, two-photon probability, equal-time g2) and the
emitter-emitter concurrence, and cross-checks the closure dynamics against
a brute-force full-basis evolution.
"""

from .dressed import DressedState, dressed_states, format_catalog, resonance_detuning
from .dynamics import DerivativeWorkspace, derivative, evolve, step_rk4
from .errors import (
    ConfigurationError,
    DegenerateStateError,
    GridTooCoarseError,
    IntegrationDivergedError,
    MemoryBudgetError,
    ParameterConflictError,
    PhysicalDomainError,
    SweepValidationError,
)
from .model import (
    CouplingMode,
    CouplingTable,
    KGrid,
    SystemParams,
    build_kgrid,
    build_params,
    coupling,
    coupling_table,
    default_half_width,
    load_config,
    parse_config,
    stability_dt,
)
from .observables import (
    EmitterDensityMatrix,
    compute_record,
    concurrence,
    g2_zero_delay,
    photon_number,
    reduced_density_matrix,
    two_photon_probability,
)
from .oracle import FullBasis, SparseHamiltonian, assemble, boundary_leak, evolve_full
from .state import (
    ObservableRecord,
    StateVector,
    load_checkpoint,
    norm,
    save_checkpoint,
    single_excitation_state,
    state_size,
    vacuum_state,
)

__version__ = "0.1.0"

__all__ = [
    "CouplingMode",
    "CouplingTable",
    "DerivativeWorkspace",
    "DressedState",
    "EmitterDensityMatrix",
    "FullBasis",
    "KGrid",
    "ObservableRecord",
    "SparseHamiltonian",
    "StateVector",
    "SystemParams",
    "assemble",
    "boundary_leak",
    "build_kgrid",
    "build_params",
    "compute_record",
    "concurrence",
    "coupling",
    "coupling_table",
    "default_half_width",
    "derivative",
    "dressed_states",
    "evolve",
    "evolve_full",
    "format_catalog",
    "g2_zero_delay",
    "load_checkpoint",
    "load_config",
    "norm",
    "parse_config",
    "photon_number",
    "reduced_density_matrix",
    "resonance_detuning",
    "save_checkpoint",
    "single_excitation_state",
    "stability_dt",
    "state_size",
    "step_rk4",
    "two_photon_probability",
    "vacuum_state",
    "ConfigurationError",
    "DegenerateStateError",
    "GridTooCoarseError",
    "IntegrationDivergedError",
    "MemoryBudgetError",
    "ParameterConflictError",
    "PhysicalDomainError",
    "SweepValidationError",
    "__version__",
]
