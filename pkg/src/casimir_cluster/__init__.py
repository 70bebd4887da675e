"""Gaussian cluster states generated by moving-boundary (dynamical Casimir) drives."""

from .bogoliubov import (
    BogoliubovSet,
    BoundaryKind,
    CavitySpec,
    MotionKind,
    MotionParams,
    beta_discrete_first_order,
    beta_oscillating,
    resonant_pairs,
    resonant_tms_state,
    symplectic_from_bogoliubov,
)
from .entanglement import (
    NegativityReport,
    NoiseFactors,
    log_negativity_closed_form,
    log_negativity_two_mode,
    purity,
    sequential_drive_state,
    set_log_base,
)
from .errors import (
    InvalidArgumentError,
    NotBipartiteError,
    OutOfValidityError,
    PerturbativeWarning,
    PlanInfeasibleError,
    UnphysicalStateError,
)
from .gaussian_core import (
    CovarianceState,
    SymplecticTransform,
    apply_symplectic,
    cz_gate,
    partial_trace,
    phase_shift,
    symplectic_eigenvalues,
    two_mode_squeezer,
    vacuum,
)
from .graph import (
    ClusterAdjacency,
    HGraph,
    accumulate_drive,
    bipartition,
    effective_hamiltonian,
    materialize_Z,
    nullifier_variances,
    to_cluster,
)
from .planner import (
    DrivePlan,
    DriveSegment,
    UniformityFilter,
    lambda_from_Lambda,
    plan_ladder,
    plan_square,
    spurious_edges,
)

__version__ = "0.1.0"

__all__ = [
    "accumulate_drive",
    "apply_symplectic",
    "beta_discrete_first_order",
    "beta_oscillating",
    "bipartition",
    "BogoliubovSet",
    "BoundaryKind",
    "CavitySpec",
    "ClusterAdjacency",
    "CovarianceState",
    "cz_gate",
    "DrivePlan",
    "DriveSegment",
    "effective_hamiltonian",
    "HGraph",
    "InvalidArgumentError",
    "lambda_from_Lambda",
    "log_negativity_closed_form",
    "log_negativity_two_mode",
    "materialize_Z",
    "MotionKind",
    "MotionParams",
    "NegativityReport",
    "NoiseFactors",
    "NotBipartiteError",
    "nullifier_variances",
    "OutOfValidityError",
    "partial_trace",
    "PerturbativeWarning",
    "phase_shift",
    "plan_ladder",
    "plan_square",
    "PlanInfeasibleError",
    "purity",
    "resonant_pairs",
    "resonant_tms_state",
    "sequential_drive_state",
    "set_log_base",
    "spurious_edges",
    "symplectic_eigenvalues",
    "symplectic_from_bogoliubov",
    "SymplecticTransform",
    "to_cluster",
    "two_mode_squeezer",
    "UniformityFilter",
    "UnphysicalStateError",
    "vacuum",
]
