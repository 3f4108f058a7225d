"""Genuine multipartite entanglement witnesses for qudit stabilizer states and subspaces."""
from __future__ import annotations

from .coloring import (
    Coloring,
    CommutationProfile,
    chromatic_number,
    commutation_profile,
    lms_count,
    locally_commute,
)
from .graphs import (
    Multigraph,
    cluster_generators,
    five_qubit_code_generators,
    ghz_generators,
    ghz_state_vector,
    graph_generators,
    graph_state_vector,
    nd_subspace_generators,
    opt_subspace_generators,
    w_state_vector,
    wbar_state_vector,
)
from .pauli import (
    DenseCapExceeded,
    DimensionMismatch,
    PauliWord,
    commutation_exponent,
    dagger,
    multiply,
    power,
    to_dense,
)
from .stabilizer import (
    DependentGenerators,
    GeneratorSet,
    NonCommutingGenerators,
    StabilizerError,
    StabilizerGroup,
    projector,
    subspace_dimension,
    validate,
)
from .witness import (
    NotDetected,
    RobustnessReport,
    Witness,
    colored_witness,
    curve_emit,
    expectation,
    generator_witness,
    normalized_trace,
    p_limit_closed_form,
    p_limit_generic,
    projector_witness,
    witness_spectrum,
)

__version__ = "0.1.0"
