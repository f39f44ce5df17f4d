"""Structural controllability of sparse linear ensemble systems."""
from .analysis import (
    AnalysisReport,
    HamiltonianDecomposition,
    check_accessible,
    check_condition_A,
    check_condition_B,
    check_finite_structural,
    find_hamiltonian_decomposition,
    is_minimal,
    satisfies_condition_A,
)
from .enumeration import CatalogEntry, are_isomorphic, canonical_form, enumerate_minimal
from .graph import PatternError, SccDecomposition, SparsityPattern, strong_components
from .reduction import MinimalPattern, NotStructurallyControllable, canonical_relabel, reduce_to_minimal
from .synthesis import EnsemblePair, build_ensemble_pair, compute_kappa, synthesize_finite_pair
from .verification import (
    CertificationReport,
    SingularGramianError,
    SteeringResult,
    certify,
    eigenvalues_at,
    kalman_rank,
    steer_subensemble,
)

__version__ = "0.1.0"
