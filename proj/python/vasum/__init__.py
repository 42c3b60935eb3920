"""Keyshot video summarization with a soft self-attention frame scorer."""

from ._core import (
    ConfigError,
    Dataset,
    DatasetError,
    Model,
    NumericError,
    ParameterError,
    SplitError,
    VasumError,
    VideoRecord,
    cross_validate,
    evaluate_video,
    fscore,
    human_baseline,
    keyshot_ground_truth,
    knapsack_select,
    kts,
    load_dataset,
    make_synthetic_dataset,
    summarize,
    validate_dataset,
    write_dataset,
)

__version__ = "0.1.0"
