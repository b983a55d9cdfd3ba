"""Lattice shortest-vector instances compiled to Ising annealing."""

from . import cli, dynamics, emulator, encoding, experiments, lattice, spectrum
from .dynamics import (
    IntegratorError,
    ScanEntry,
    SweepResult,
    SweepSchedule,
    evolve,
    initial_state,
    sweep_scan,
)
from .emulator import (
    AnnealParams,
    ChimeraEmbedding,
    ChimeraGraph,
    EmbeddingError,
    NoiseSpec,
    PhysicalModel,
    SampleSet,
    build_chimera,
    decode_majority,
    embed_clique,
    lower_to_physical,
    sample,
    validate_embedding,
)
from .encoding import (
    EncodingError,
    IsingModel,
    QuditEncoding,
    QuditLayout,
    SpinConfig,
    compile_ising,
    exhaustive_length_table,
    ground_manifold_size,
    parse_encoding,
    problem_diagonal_ints,
    qudit_value,
    redundancy,
)
from .experiments import (
    FoMReport,
    FourProbs,
    InstanceRecord,
    LengthHistogram,
    aggregate,
    baseline,
    figures_of_merit,
    histogram,
)
from .lattice import (
    Basis,
    GramMatrix,
    HnfBasis,
    Instance,
    LatticeError,
    OracleResult,
    QubitBudget,
    ResourceLimitError,
    auto_box,
    brute_force_svp,
    coefficient_box,
    generate_instance,
    gram,
    hnf,
    is_optimal_hnf,
    minkowski_bound,
    qubit_budget,
)
from .spectrum import (
    DriverSpec,
    GapProfile,
    ProblemDiagonal,
    SpectrumError,
    apply_hamiltonian,
    dense_hamiltonian,
    gap_scan,
    low_spectrum,
    sector_gap_scan,
)

__all__ = [n for n in dir() if not n.startswith("_")]
__version__ = "0.1.0"
