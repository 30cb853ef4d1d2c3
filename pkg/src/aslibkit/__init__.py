"""Toolkit for algorithm-selection benchmark scenarios in the ASlib format."""

from .errors import (
    AslibError,
    EvaluationError,
    FetchError,
    FormatError,
    LearnerError,
    PreprocessError,
    SelectorError,
    SubmissionError,
)
from .evaluation import (
    EvaluationReport,
    ScheduleEntry,
    SelectionOutput,
    cross_validate,
    evaluate_selection,
    gap_closed,
    read_submission,
    sbs_baseline,
    score_submission,
    vbs_baseline,
    write_submission,
)
from .generate import GenSpec, PlantedTruth, generate, write_generated
from .io import RepoConfig, fetch_scenario, load_scenario, write_scenario
from .preprocess import (
    PreparedData,
    aggregate_repetitions,
    apply_feature_costs,
    clean_features,
    normalize_features,
)
from .scenario import MetaInfo, Scenario, validate_scenario
from .selectors import SelectorModel, SelectorSpec, parse_selector_spec, select, select_many, train_selector
from .subset import ForwardSelectionResult, forward_select

__version__ = "0.1.0"

__all__ = [
    "AslibError",
    "EvaluationError",
    "EvaluationReport",
    "FetchError",
    "FormatError",
    "ForwardSelectionResult",
    "GenSpec",
    "LearnerError",
    "MetaInfo",
    "PlantedTruth",
    "PreparedData",
    "PreprocessError",
    "RepoConfig",
    "Scenario",
    "ScheduleEntry",
    "SelectionOutput",
    "SelectorError",
    "SelectorModel",
    "SelectorSpec",
    "SubmissionError",
    "aggregate_repetitions",
    "apply_feature_costs",
    "clean_features",
    "cross_validate",
    "evaluate_selection",
    "fetch_scenario",
    "forward_select",
    "gap_closed",
    "generate",
    "load_scenario",
    "normalize_features",
    "parse_selector_spec",
    "read_submission",
    "sbs_baseline",
    "score_submission",
    "select",
    "select_many",
    "train_selector",
    "validate_scenario",
    "vbs_baseline",
    "write_generated",
    "write_scenario",
]
