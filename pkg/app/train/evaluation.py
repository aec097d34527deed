from __future__ import annotations

import numpy as np

from app.data import Dataset
from app.model import EncoderParams, classify, encode
from app.types import ContractError, EvalResult, StyleDiagnostic


def predict_logits(params: EncoderParams, x: np.ndarray) -> np.ndarray:
    """Inference path: backbone, semantic head, classifier. No graph."""
    return classify(params.classifier, encode(params, x).c).data


def evaluate(params: EncoderParams, split: Dataset) -> EvalResult:
    """Accuracy and confusion counts; ties go to the lowest class index."""
    if len(split) == 0:
        raise ContractError("cannot evaluate an empty split")
    if not split.labeled.all():
        raise ContractError("evaluation split contains unlabeled samples")
    if not params.is_finite():
        raise ContractError("parameters are not finite")
    n_classes = params.n_classes
    predicted = np.argmax(predict_logits(params, split.x), axis=1)
    confusion = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(confusion, (split.y, predicted), 1)
    correct = int(np.trace(confusion))
    return EvalResult(accuracy=correct / len(split), confusion=confusion.tolist(), total=len(split))


def nearest_centroid_accuracy(features: np.ndarray, labels: np.ndarray) -> float:
    """Accuracy of assigning every row to its nearest group centroid (Euclidean)."""
    groups = np.unique(labels)
    centroids = np.stack([features[labels == g].mean(axis=0) for g in groups])
    distances = ((features[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    predicted = groups[np.argmin(distances, axis=1)]
    return float(np.mean(predicted == labels))


def style_cluster_diagnostic(params: EncoderParams, dataset: Dataset) -> StyleDiagnostic:
    """How well normalized style features separate domains versus classes."""
    if len(dataset) == 0:
        raise ContractError("cannot diagnose an empty dataset")
    style = encode(params, dataset.x).s.data
    style = style / np.maximum(np.linalg.norm(style, axis=1, keepdims=True), 1e-12)
    labeled = dataset.labeled
    return StyleDiagnostic(
        domain_acc=nearest_centroid_accuracy(style, dataset.d),
        class_acc=nearest_centroid_accuracy(style[labeled], dataset.y[labeled]) if labeled.any() else 0.0,
    )
