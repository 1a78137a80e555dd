"""Sparse boosted ensembles of kernelized local patterns for
binary time-series classification."""

from .boost import BoostConfig, BoostTrace, RoundRecord, restricted_dual, train
from .core import (
    BaseHypothesis,
    Distribution,
    Ensemble,
    LabeledInstance,
    PatternBank,
    TimeSeries,
    eval_base,
    eval_ensemble,
    extract_patterns,
)
from .data import Dataset, load_ucr, save_dataset, stratified_kfold, znormalize
from .estimator import ShapeletBoostClassifier
from .exceptions import (
    InternalError,
    InvalidInputError,
    InvalidModelError,
    InvalidParameterError,
    ParseError,
    ShapeboostError,
    UnsupportedError,
)
from .experiment import GridResult, GridSpec, evaluate_model, fit_dataset, grid_search
from .kernels import DEFAULT_SIGMA_GRID, GramTensor, KernelSpec, gram_bank, select_sigma
from .modelio import (
    ModelFile,
    load_model,
    model_from_ensemble,
    pattern_report,
    save_model,
    sparsity_report,
)
from .weak import WeakLearnConfig, weak_learn

__version__ = "0.1.0"

__all__ = [
    "BaseHypothesis",
    "BoostConfig",
    "BoostTrace",
    "DEFAULT_SIGMA_GRID",
    "Dataset",
    "Distribution",
    "Ensemble",
    "GramTensor",
    "GridResult",
    "GridSpec",
    "InternalError",
    "InvalidInputError",
    "InvalidModelError",
    "InvalidParameterError",
    "KernelSpec",
    "LabeledInstance",
    "ModelFile",
    "ParseError",
    "PatternBank",
    "RoundRecord",
    "ShapeboostError",
    "ShapeletBoostClassifier",
    "TimeSeries",
    "UnsupportedError",
    "WeakLearnConfig",
    "eval_base",
    "eval_ensemble",
    "evaluate_model",
    "extract_patterns",
    "fit_dataset",
    "gram_bank",
    "grid_search",
    "load_model",
    "load_ucr",
    "model_from_ensemble",
    "pattern_report",
    "restricted_dual",
    "save_dataset",
    "save_model",
    "select_sigma",
    "sparsity_report",
    "stratified_kfold",
    "train",
    "weak_learn",
    "znormalize",
]
