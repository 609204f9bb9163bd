"""Simulate the correlation phase of 4-/6-state QKD and certify
entanglement from the observed joint outcome distribution alone."""

from .channels import (
    AttackRecord,
    Channel,
    apply_to_bob,
    depolarizing_channel,
    identity_channel,
    intercept_resend,
    make_channel,
    rotation_channel,
)
from .errors import NumericError, UsageError, ValidationError
from .information import (
    TripartiteTable,
    conditional_mutual_information,
    intrinsic_info_upper_bound,
    make_tripartite_table,
    mutual_information,
    separable_extension,
)
from .measurements import (
    FOUR_STATE,
    SIX_STATE,
    JointDistribution,
    Protocol,
    distribution_from_probs,
    joint_distribution,
    observed_pauli_table,
    protocol_by_name,
    protocol_source,
    qber,
    tomographic_state,
)
from .qlinalg import (
    EigenSystem,
    SchmidtForm,
    hermitian_eig,
    kron,
    partial_transpose,
    schmidt_decompose,
)
from .states import (
    PptResult,
    SourceState,
    TwoQubitState,
    bell_state,
    bell_vector,
    is_ppt,
    make_state,
    pure_state,
    werner_state,
)
from .witnesses import (
    DetectionResult,
    PseudoMixture,
    Witness,
    detect_4state,
    detect_6state,
    evaluate_from_data,
    grid_search_family,
    is_xz_witness,
    optimal_witness,
    pseudo_mixture,
    pt_symmetrize,
    witness_from_coefficients,
    witness_from_real_state,
)

__version__ = "0.1.0"
