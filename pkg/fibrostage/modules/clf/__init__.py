from fibrostage.modules.clf.features import feature_matrix, feature_names, featurize
from fibrostage.modules.clf.predictions import load_external_predictions, write_predictions
from fibrostage.modules.clf.schemas import LogRegModel, PatchFeatures, PatchPrediction, TrainingConfig
from fibrostage.modules.clf.service import (
    cross_entropy_loss,
    predict,
    predict_patches,
    predict_proba,
    train,
    train_features,
)

__all__ = [
    "LogRegModel",
    "PatchFeatures",
    "PatchPrediction",
    "TrainingConfig",
    "cross_entropy_loss",
    "feature_matrix",
    "feature_names",
    "featurize",
    "load_external_predictions",
    "predict",
    "predict_patches",
    "predict_proba",
    "train",
    "train_features",
    "write_predictions",
]
