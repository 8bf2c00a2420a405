"""Binary provenance classifiers: a fine-tuned code encoder and a linear baseline."""

from .base import (
    BACKENDS,
    DEFAULT_CHECKPOINT,
    FORMAT_VERSION,
    LINEAR_DEFAULTS,
    Hyperparams,
    ModelHandle,
    Prediction,
    default_hyperparams,
    persist,
    predict,
    predict_batch,
    read_meta,
    restore,
    train,
)

__all__ = [
    "BACKENDS",
    "DEFAULT_CHECKPOINT",
    "FORMAT_VERSION",
    "LINEAR_DEFAULTS",
    "Hyperparams",
    "ModelHandle",
    "Prediction",
    "default_hyperparams",
    "persist",
    "predict",
    "predict_batch",
    "read_meta",
    "restore",
    "train",
]
