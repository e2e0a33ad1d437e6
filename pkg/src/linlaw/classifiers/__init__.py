"""From-scratch classifiers with scikit-learn style ``fit``/``predict``."""

from .ensemble import BaggedTrees
from .functional import (
    fit_ensemble,
    fit_predict_knn,
    fit_svm_linear,
    fit_tree,
    predict_ensemble,
    predict_svm,
    predict_tree,
)
from .knn import KNeighborsVote
from .model_selection import (
    DEFAULT_PARAMS,
    KINDS,
    ClassifierSpec,
    Dataset,
    EvalReport,
    cross_validate,
    group_folds,
    majority_vote,
    sample_params,
    tune,
)
from .report import render_table, report_json
from .svm import LinearSVM, hinge_objective
from .tree import CartTree

__all__ = [
    "BaggedTrees",
    "CartTree",
    "ClassifierSpec",
    "DEFAULT_PARAMS",
    "Dataset",
    "EvalReport",
    "KINDS",
    "KNeighborsVote",
    "LinearSVM",
    "cross_validate",
    "fit_ensemble",
    "fit_predict_knn",
    "fit_svm_linear",
    "fit_tree",
    "group_folds",
    "hinge_objective",
    "majority_vote",
    "predict_ensemble",
    "predict_svm",
    "predict_tree",
    "render_table",
    "report_json",
    "sample_params",
    "tune",
]
