"""Quasi-Bayesian GMM with adaptively tuned weighting matrices."""

from ._bgmm import (
    ChainOutput,
    Dataset,
    DgpConfig,
    DgpDraw,
    EstimateReport,
    InputError,
    NumericalError,
    ProfileRow,
    WeightingMatrix,
    __version__,
    adaptation_probability,
    candidate_grid,
    criterion_profile,
    estimate,
    fine_profile_grid,
    generate_dataset,
    interquantile_range,
    load_dataset_csv,
    moment_matrix,
    moment_mean,
    ner_precision,
    ner_single_split,
    pseudo_precision,
    save_dataset_csv,
    split_criterion,
    standard_precision,
    subsample_covariances,
    tsls_estimate,
)

__all__ = [
    "ChainOutput",
    "Dataset",
    "DgpConfig",
    "DgpDraw",
    "EstimateReport",
    "InputError",
    "NumericalError",
    "ProfileRow",
    "WeightingMatrix",
    "__version__",
    "adaptation_probability",
    "candidate_grid",
    "criterion_profile",
    "estimate",
    "fine_profile_grid",
    "generate_dataset",
    "interquantile_range",
    "load_dataset_csv",
    "moment_matrix",
    "moment_mean",
    "ner_precision",
    "ner_single_split",
    "pseudo_precision",
    "save_dataset_csv",
    "split_criterion",
    "standard_precision",
    "subsample_covariances",
    "tsls_estimate",
]
