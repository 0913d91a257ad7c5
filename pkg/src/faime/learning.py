"""Nearest-centroid classification with a background rejection class.

A model holds one centroid per trained label (the arithmetic mean of
that label's samples) plus a distance threshold tau. Classification
picks the nearest centroid under Euclidean distance, breaking exact
ties by lexicographically smaller label; when even the nearest centroid
is farther than tau, the input is rejected into the background label.
Confidence is the softmax of negated distances evaluated at the winning
centroid, and is reported unchanged for background rejections so callers
can still see how marginal the nearest match was.

Models are immutable after training; classify is pure and thread-safe.

Model file schema (JSON):

    {"dim": 2, "tau": 10.0, "background_label": "background",
     "centroids": {"fist": [0.1, 0.9], "open": [0.8, 0.2]}}
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

DEFAULT_BACKGROUND_LABEL = "background"


class LearningError(Exception):
    """Base class for training/classification errors."""


class EmptyDataset(LearningError):
    """No samples were provided."""


class DimensionMismatch(LearningError):
    """Feature vectors disagree on dimension."""


class NonPositiveTau(LearningError):
    """The background threshold must be positive."""


@dataclass(frozen=True, slots=True)
class LabeledSample:
    label: str
    features: tuple[float, ...]


@dataclass(frozen=True, slots=True)
class Classification:
    label: str
    confidence: float


@dataclass(frozen=True)
class CentroidModel:
    dim: int
    centroids: dict[str, tuple[float, ...]]
    tau: float
    background_label: str = DEFAULT_BACKGROUND_LABEL

    def __post_init__(self):
        if self.dim <= 0:
            raise DimensionMismatch(f"dimension must be positive, got {self.dim}")
        if not self.centroids:
            raise EmptyDataset("model has no centroids")
        for label, centroid in self.centroids.items():
            if len(centroid) != self.dim:
                raise DimensionMismatch(
                    f"centroid {label!r} has {len(centroid)} dims, expected {self.dim}"
                )
        if not (self.tau > 0):
            raise NonPositiveTau(f"tau must be positive, got {self.tau}")
        if self.background_label in self.centroids:
            raise ValueError(f"background label {self.background_label!r} collides with a centroid")

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(sorted(self.centroids))


def train_centroids(
    samples: Iterable[LabeledSample],
    tau: float,
    background_label: str = DEFAULT_BACKGROUND_LABEL,
) -> CentroidModel:
    """Compute per-label mean centroids from labeled samples.

    Raises EmptyDataset, DimensionMismatch, or NonPositiveTau; non-finite
    feature values raise ValueError.
    """
    samples = list(samples)
    if not samples:
        raise EmptyDataset("no samples to train on")
    if not (tau > 0):
        raise NonPositiveTau(f"tau must be positive, got {tau}")
    dim = len(samples[0].features)
    sums: dict[str, list[float]] = {}
    counts: dict[str, int] = {}
    for sample in samples:
        if len(sample.features) != dim:
            raise DimensionMismatch(
                f"sample with label {sample.label!r} has {len(sample.features)} dims, expected {dim}"
            )
        if not all(math.isfinite(v) for v in sample.features):
            raise ValueError(f"non-finite feature in sample with label {sample.label!r}")
        acc = sums.setdefault(sample.label, [0.0] * dim)
        for i, v in enumerate(sample.features):
            acc[i] += v
        counts[sample.label] = counts.get(sample.label, 0) + 1
    centroids = {
        label: tuple(v / counts[label] for v in acc) for label, acc in sorted(sums.items())
    }
    return CentroidModel(dim=dim, centroids=centroids, tau=tau, background_label=background_label)


def classify(model: CentroidModel, features: Iterable[float]) -> Classification:
    """Assign the nearest centroid's label, or background beyond tau.

    Iteration is over sorted labels so the result never depends on
    centroid-map insertion order.
    """
    x = tuple(features)
    if len(x) != model.dim:
        raise DimensionMismatch(f"input has {len(x)} dims, model expects {model.dim}")
    distances = [(label, math.dist(x, model.centroids[label])) for label in sorted(model.centroids)]
    winner, d_min = distances[0]
    for label, d in distances[1:]:
        if d < d_min:
            winner, d_min = label, d
    denom = sum(math.exp(-(d - d_min)) for _, d in distances)
    confidence = 1.0 / denom
    label = model.background_label if d_min > model.tau else winner
    return Classification(label=label, confidence=confidence)


def model_to_dict(model: CentroidModel) -> dict:
    return {
        "dim": model.dim,
        "tau": model.tau,
        "background_label": model.background_label,
        "centroids": {label: list(model.centroids[label]) for label in sorted(model.centroids)},
    }


def model_from_dict(obj: dict) -> CentroidModel:
    try:
        dim = obj["dim"]
        tau = obj["tau"]
        centroids_raw = obj["centroids"]
        background = obj.get("background_label", DEFAULT_BACKGROUND_LABEL)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"bad model object: missing {exc}") from None
    if not isinstance(centroids_raw, dict):
        raise ValueError("bad model object: centroids must be an object")
    centroids = {str(label): tuple(float(v) for v in vec) for label, vec in centroids_raw.items()}
    return CentroidModel(dim=int(dim), centroids=centroids, tau=float(tau), background_label=str(background))


def save_model(model: CentroidModel, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_model(path: str | Path) -> CentroidModel:
    with open(path, "r", encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))


__all__ = [
    "DEFAULT_BACKGROUND_LABEL",
    "LearningError",
    "EmptyDataset",
    "DimensionMismatch",
    "NonPositiveTau",
    "LabeledSample",
    "Classification",
    "CentroidModel",
    "train_centroids",
    "classify",
    "model_to_dict",
    "model_from_dict",
    "save_model",
    "load_model",
]
