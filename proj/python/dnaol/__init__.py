"""Nonlinear analysis operator learning for classification.

Thin wrapper over the C++ core: cosparse feature models f = s_lam(A x)
trained jointly with linear classifiers, plus data helpers.
"""

from ._dnaol import (
    AnalysisModel,
    NonSepModel,
    SepModel,
    classify,
    cosparsity,
    evaluate,
    extract_features,
    gen_synthetic,
    load_labels,
    load_matrix,
    load_model,
    normalize_unit_l2,
    save_labels,
    save_matrix_binary,
    save_matrix_csv,
    save_model,
    train_nonsep,
    train_sep,
    update_z_entry,
)

__all__ = [
    "AnalysisModel",
    "NonSepModel",
    "SepModel",
    "classify",
    "cosparsity",
    "evaluate",
    "extract_features",
    "gen_synthetic",
    "load_labels",
    "load_matrix",
    "load_model",
    "normalize_unit_l2",
    "save_labels",
    "save_matrix_binary",
    "save_matrix_csv",
    "save_model",
    "train_nonsep",
    "train_sep",
    "update_z_entry",
]

__version__ = "0.1.0"
