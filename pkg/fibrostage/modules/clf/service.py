"""Training and inference for the logistic-regression patch classifier."""

import numpy as np
from scipy.special import expit

from fibrostage.core.errors import ClassifierError
from fibrostage.core.logger import get_logger
from fibrostage.modules.clf.constants import ERROR_MESSAGES, INIT_SCALE
from fibrostage.modules.clf.features import feature_matrix, featurize
from fibrostage.modules.clf.schemas import LogRegModel, PatchPrediction, TrainingConfig
from fibrostage.modules.patches.schemas import Patch

logger = get_logger("modules.clf.service")


def cross_entropy_loss(
    params: np.ndarray,
    X: np.ndarray,
    y: np.ndarray,
    weight_decay: float,
) -> tuple[float, np.ndarray]:
    """Mean binary cross-entropy with L2 decay on the weights, and its gradient.

    Args:
        params: Weights followed by the bias.
        X: Standardized features, shape (n, d).
        y: Labels in {0, 1}.
        weight_decay: L2 coefficient (the bias is not decayed).

    Returns:
        (loss, gradient with the shape of ``params``).
    """
    w = params[:-1]
    b = params[-1]
    logits = X @ w + b
    # log(1 + e^z) - y z, stable for large |z|
    loss = float(np.mean(np.logaddexp(0.0, logits) - y * logits)) + 0.5 * weight_decay * float(w @ w)
    residual = (expit(logits) - y) / X.shape[0]
    grad = np.empty_like(params)
    grad[:-1] = X.T @ residual + weight_decay * w
    grad[-1] = residual.sum()
    return loss, grad


def train_features(
    X: np.ndarray,
    y: np.ndarray,
    cfg: TrainingConfig,
    channels: tuple[str, ...] = (),
) -> LogRegModel:
    """Full-batch gradient descent on standardized features.

    Raises:
        ClassifierError: On an empty set or a single class.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.shape[0] == 0:
        raise ClassifierError(ERROR_MESSAGES["EMPTY"])
    labels = sorted({int(v) for v in y})
    if labels != [0, 1]:
        raise ClassifierError(ERROR_MESSAGES["SINGLE_CLASS"].format(labels=labels))

    mean = X.mean(axis=0)
    std = X.std(axis=0)
    std[std == 0] = 1.0
    Xs = (X - mean) / std

    rng = np.random.default_rng(cfg.seed)
    params = np.zeros(X.shape[1] + 1, dtype=np.float64)
    params[:-1] = rng.normal(0.0, INIT_SCALE, size=X.shape[1])

    loss = float("nan")
    for epoch in range(cfg.epochs):
        loss, grad = cross_entropy_loss(params, Xs, y, cfg.weight_decay)
        params -= cfg.lr * grad
        if epoch % 100 == 0:
            logger.debug("epoch %d loss %.6f", epoch, loss)
    loss, _ = cross_entropy_loss(params, Xs, y, cfg.weight_decay)
    logger.info("Trained on %d samples x %d features, final loss %.6f", X.shape[0], X.shape[1], loss)

    return LogRegModel(
        weights=params[:-1].tolist(),
        bias=float(params[-1]),
        feature_mean=mean.tolist(),
        feature_std=std.tolist(),
        channels=channels,
        final_loss=loss,
        training=cfg,
    )


def train(patches: list[Patch], cfg: TrainingConfig) -> LogRegModel:
    """Fit the baseline on labeled patches (1 = Stage-4 subject, 0 = Stage-1 subject).

    Raises:
        ClassifierError: If a patch is unlabeled, the set is empty or has one class.
    """
    if not patches:
        raise ClassifierError(ERROR_MESSAGES["EMPTY"])
    for index, p in enumerate(patches):
        if p.label is None:
            raise ClassifierError(ERROR_MESSAGES["UNLABELED"].format(index=index))
    y = np.array([p.label for p in patches], dtype=np.float64)
    return train_features(feature_matrix(patches), y, cfg, channels=patches[0].channels)


def predict_proba(model: LogRegModel, X: np.ndarray) -> np.ndarray:
    """Stage-4 probability for every feature row.

    Raises:
        ClassifierError: On a feature dimension mismatch.
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] != model.n_features:
        raise ClassifierError(ERROR_MESSAGES["DIMENSION"].format(expected=model.n_features, actual=X.shape[1]))
    Xs = (X - np.asarray(model.feature_mean)) / np.asarray(model.feature_std)
    return np.clip(expit(Xs @ np.asarray(model.weights) + model.bias), 0.0, 1.0)


def _prediction(p: Patch, prob: float) -> PatchPrediction:
    return PatchPrediction(subject_id=p.subject_id, z=p.slice_index, y=p.y, x=p.x, prob=prob)


def predict(model: LogRegModel, patch: Patch) -> PatchPrediction:
    prob = float(predict_proba(model, featurize(patch).values)[0])
    return _prediction(patch, prob)


def predict_patches(model: LogRegModel, patches: list[Patch]) -> list[PatchPrediction]:
    """Batch :func:`predict`, in input order."""
    if not patches:
        return []
    probs = predict_proba(model, feature_matrix(patches))
    return [_prediction(p, float(prob)) for p, prob in zip(patches, probs, strict=True)]
