"""Compressed VQE for the Fermi-Hubbard model on a noisy statevector simulator.

The package splits into a small gate-level simulator (:mod:`cvqe.sim`),
the fermionic reference Hamiltonians (:mod:`cvqe.jw`), the compressed
(1 up, 1 down)-sector encoding (:mod:`cvqe.compressed`), the two-site
ansatz and its shot-based energy estimator (:mod:`cvqe.ansatz`), error
mitigation (:mod:`cvqe.mitigation`), the SPSA optimizer
(:mod:`cvqe.spsa`) and the experiment runner/CLI.
"""

__version__ = "0.1.0"

from .ansatz import (
    AnsatzParams,
    ansatz_circuit,
    energy_from_counts,
    exact_ansatz_state,
    exact_landscape,
    final_evaluation,
    measure_energy,
    measurement_circuit,
)
from .compressed import (
    CompressedHamiltonian,
    analytic_ground_2x1,
    compressed_hamiltonian,
    compressed_hopping_matrix,
    estimate_compressed_energy,
    matching_decomposition,
    matching_evolution,
    subspace_hadamard,
)
from .jw import (
    PauliHamiltonian,
    dense_hamiltonian,
    ground_state_dense,
    jordan_wigner_hamiltonian,
    sector_restrict,
)
from .lattice import HubbardSpec, grid_edges, load_edge_list, preset
from .mitigation import (
    MitigationError,
    OccupationFilter,
    ReadoutCalibration,
    apply_readout_correction,
    calibrate_readout,
    postselect_occupation,
)
from .runner import MitigationOptions, VQERunResult, run_vqe
from .sim import (
    Circuit,
    Gate,
    NoiseModel,
    ShotCounts,
    StateVector,
    derive_seed,
    expectation,
    run_circuit,
    sample_circuit_counts,
)
from .spsa import SPSAConfig, Stage, named_schedule, spsa_minimize

__all__ = [
    "AnsatzParams",
    "Circuit",
    "CompressedHamiltonian",
    "Gate",
    "HubbardSpec",
    "MitigationError",
    "MitigationOptions",
    "NoiseModel",
    "OccupationFilter",
    "PauliHamiltonian",
    "ReadoutCalibration",
    "SPSAConfig",
    "ShotCounts",
    "Stage",
    "StateVector",
    "VQERunResult",
    "analytic_ground_2x1",
    "ansatz_circuit",
    "apply_readout_correction",
    "calibrate_readout",
    "compressed_hamiltonian",
    "compressed_hopping_matrix",
    "dense_hamiltonian",
    "derive_seed",
    "energy_from_counts",
    "estimate_compressed_energy",
    "exact_ansatz_state",
    "exact_landscape",
    "expectation",
    "final_evaluation",
    "grid_edges",
    "ground_state_dense",
    "jordan_wigner_hamiltonian",
    "load_edge_list",
    "matching_decomposition",
    "matching_evolution",
    "measure_energy",
    "measurement_circuit",
    "named_schedule",
    "postselect_occupation",
    "preset",
    "run_circuit",
    "run_vqe",
    "sample_circuit_counts",
    "sector_restrict",
    "spsa_minimize",
    "subspace_hadamard",
]
