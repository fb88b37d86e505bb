"""Matchgate classical shadows.

Sampling of fermionic-Gaussian (matchgate) circuit ensembles, dense
simulation and Born sampling, shadow estimators for Majorana monomials and
k-RDMs, and exact verification of the three-design/cubature and invariance
properties those estimators rely on.
"""
from .errors import (
    DataError,
    DomainError,
    InternalError,
    MatchgateShadowsError,
    NumericError,
    ResourceError,
)
from .givens import (
    CLIFFORD_ANGLES,
    GivensRotation,
    GivensSequence,
    PerfectMatching,
    SignedPermutation,
    act_on_monomial,
    braid_rewrite,
    brickwall_transform,
    bubblesort_transpositions,
    canonical_permutation,
    circuit_from_json,
    circuit_to_json,
    compose_to_matrix,
    greedy_depth,
    inversion_count,
    minor_determinant,
    perfect_matching_of,
    sequence_of_signed_permutation,
    signed_permutation_of,
)
from .pauli import (
    MajoranaMonomial,
    PauliString,
    bitstring_expectation,
    dense_matrix,
    jw_pauli,
    monomial_to_pauli,
    rdm_expansion,
)
from .sampling import (
    ENSEMBLES,
    add_random_reflection,
    all_perfect_matchings,
    clifford_sequence,
    haar_sequence,
    sample_angle,
    sample_circuit,
    sample_optimal_circuit,
)
from .shadows import (
    EstimatorReport,
    ShadowBatch,
    ShadowSample,
    BenchConfig,
    collect_batch,
    collect_shadows,
    estimate,
    estimate_rdm,
    lambda_eigenvalue,
    sample_size,
    single_sample_estimate,
    variance_experiment,
)
from .statevec import (
    StateVector,
    apply_givens,
    apply_sequence,
    basis_state,
    born_sample,
    load_state,
    make_state,
    random_state,
    save_state,
)
from .twirl import (
    ContinuousDensity,
    DiscreteAngles,
    averaged_gate_3fold,
    brute_3fold_quadrature,
    check_3design,
    clifford_tfold,
    gamma_4fold,
    haar_angle_density,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
