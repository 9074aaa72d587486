"""Brute-force ground truth for the closed-form models."""

from .exact import (
    PostSelectionReport,
    exact_post_selection,
    exact_sample_probability_ab,
    exact_sample_probability_linear,
    validate_post_selection_formula,
)
from .fock import (
    coherence_rank,
    complexity_score,
    elementary_symmetric,
    enumerate_fock,
    full_count,
    is_collision_free,
    subspace_count,
    uniform_post_selection,
)
from .mesh import PermutationMatch, expand_spatial_mesh, expand_timebin_program, match_rows
from .permanent import naive_permanent, permanent, permanents_batch
from .unitary import (
    COUPLER,
    SWAP,
    MziSetting,
    haar_unitary,
    make_rng,
    mzi_matrix,
    output_distribution,
    random_settings,
    unitarity_error,
)

__all__ = [
    "PostSelectionReport",
    "exact_post_selection",
    "exact_sample_probability_ab",
    "exact_sample_probability_linear",
    "validate_post_selection_formula",
    "coherence_rank",
    "complexity_score",
    "elementary_symmetric",
    "enumerate_fock",
    "full_count",
    "is_collision_free",
    "subspace_count",
    "uniform_post_selection",
    "PermutationMatch",
    "expand_spatial_mesh",
    "expand_timebin_program",
    "match_rows",
    "naive_permanent",
    "permanent",
    "permanents_batch",
    "COUPLER",
    "SWAP",
    "MziSetting",
    "haar_unitary",
    "make_rng",
    "mzi_matrix",
    "output_distribution",
    "random_settings",
    "unitarity_error",
]
