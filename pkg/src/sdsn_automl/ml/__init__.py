from .core import (
    ALGORITHMS,
    DEFAULT_HYPERPARAMETERS,
    CostTimer,
    EvaluationResult,
    TrainedModel,
    WallTimer,
    accuracy,
    algorithm_index,
    evaluate,
    predict,
    train,
)

__all__ = [
    "ALGORITHMS",
    "DEFAULT_HYPERPARAMETERS",
    "CostTimer",
    "EvaluationResult",
    "TrainedModel",
    "WallTimer",
    "accuracy",
    "algorithm_index",
    "evaluate",
    "predict",
    "train",
]
