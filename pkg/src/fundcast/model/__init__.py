"""Return classifier: from-scratch MLP plus classical baselines."""

from .baselines import BASELINE_KINDS, BaselineModel, train_baseline
from .evaluate import accuracy_at_threshold, evaluate_accuracy
from .kernels import active_backend, available_backends
from .mlp import ACTIVATIONS, MlpModel, TrainConfig, predict_proba, train_mlp

__all__ = [
    "ACTIVATIONS",
    "BASELINE_KINDS",
    "BaselineModel",
    "MlpModel",
    "TrainConfig",
    "accuracy_at_threshold",
    "active_backend",
    "available_backends",
    "evaluate_accuracy",
    "predict_proba",
    "train_baseline",
    "train_mlp",
]
