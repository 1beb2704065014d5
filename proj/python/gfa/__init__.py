"""Multi-view group factor analysis with a Gibbs sampler."""

from ._core import (
    GfaError,
    ModelConfig,
    SamplingSchedule,
    benjamini_hochberg,
    classify,
    derive_seed,
    fit,
    generate_synthetic,
    merge_replicates,
    select_chain,
    significant_samples,
    similarity_curve,
    threshold_top_genes,
)

__all__ = [
    "GfaError",
    "ModelConfig",
    "SamplingSchedule",
    "benjamini_hochberg",
    "classify",
    "derive_seed",
    "fit",
    "generate_synthetic",
    "merge_replicates",
    "select_chain",
    "significant_samples",
    "similarity_curve",
    "threshold_top_genes",
]
