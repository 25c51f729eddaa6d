"""Annotations, frame labels and probability series.

Frame ``k`` of a series sampled at ``fps`` has timestamp ``k / fps``. Series
carry a ``start_frame`` offset so that models with temporal context (which
cannot predict the first few frames) keep an absolute frame basis.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

logger = logging.getLogger(__name__)

CLAMP_EPS = 1e-7


class Label(str, Enum):
    INTAKE = "intake"
    NON_INTAKE = "non_intake"


def same_fps(a: float, b: float) -> bool:
    """Frame rates equal up to float error (e.g. 24 / 5 / 3 vs 24 / 15)."""
    return math.isclose(a, b, rel_tol=1e-9, abs_tol=0.0)


def _frozen(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class AnnotationInterval:
    """A ground-truth gesture spanning ``[start_s, end_s]`` seconds."""

    start_s: float
    end_s: float
    label: Label = Label.INTAKE

    def __post_init__(self) -> None:
        if not (math.isfinite(self.start_s) and math.isfinite(self.end_s)):
            raise ValueError(f"non-finite interval {self!r}")
        if self.start_s < 0:
            raise ValueError(f"interval starts before 0 s: {self!r}")
        if self.end_s <= self.start_s:
            raise ValueError(f"interval end must be after start: {self!r}")
        object.__setattr__(self, "label", Label(self.label))


@dataclass(frozen=True, eq=False)
class FrameLabelSeries:
    """Per-frame labels stored as a read-only boolean mask (True = intake)."""

    fps: float
    intake: np.ndarray
    start_frame: int = 0

    def __post_init__(self) -> None:
        if not self.fps > 0:
            raise ValueError(f"fps must be positive, got {self.fps}")
        if self.start_frame < 0:
            raise ValueError(f"start_frame must be >= 0, got {self.start_frame}")
        mask = _frozen(self.intake, bool)
        if mask.ndim != 1 or mask.size == 0:
            raise ValueError("label series must be a non-empty 1-D sequence")
        object.__setattr__(self, "intake", mask)

    @classmethod
    def from_labels(cls, labels: Iterable[Label | str], fps: float, start_frame: int = 0) -> FrameLabelSeries:
        return cls(fps, [Label(lab) is Label.INTAKE for lab in labels], start_frame)

    @property
    def labels(self) -> list[Label]:
        return [Label.INTAKE if v else Label.NON_INTAKE for v in self.intake]

    @property
    def frames(self) -> np.ndarray:
        return self.start_frame + np.arange(len(self.intake))

    def __len__(self) -> int:
        return len(self.intake)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FrameLabelSeries):
            return NotImplemented
        return (
            same_fps(self.fps, other.fps)
            and self.start_frame == other.start_frame
            and np.array_equal(self.intake, other.intake)
        )


@dataclass(frozen=True, eq=False)
class ProbabilitySeries:
    """Per-frame intake probabilities, starting at absolute frame ``start_frame``."""

    fps: float
    probs: np.ndarray
    start_frame: int = 0

    def __post_init__(self) -> None:
        if not self.fps > 0:
            raise ValueError(f"fps must be positive, got {self.fps}")
        if self.start_frame < 0:
            raise ValueError(f"start_frame must be >= 0, got {self.start_frame}")
        probs = _frozen(self.probs, float)
        if probs.ndim != 1:
            raise ValueError("probabilities must be a 1-D sequence")
        bad = np.flatnonzero(~((probs >= 0.0) & (probs <= 1.0)))
        if bad.size:
            k = int(bad[0])
            raise ValueError(f"probability at frame {self.start_frame + k} outside [0, 1]: {probs[k]}")
        object.__setattr__(self, "probs", probs)

    @property
    def frames(self) -> np.ndarray:
        return self.start_frame + np.arange(len(self.probs))

    def __len__(self) -> int:
        return len(self.probs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ProbabilitySeries):
            return NotImplemented
        return (
            same_fps(self.fps, other.fps)
            and self.start_frame == other.start_frame
            and np.array_equal(self.probs, other.probs)
        )


@dataclass(frozen=True, eq=False)
class WeightVector:
    """One loss weight per minibatch label."""

    weights: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "weights", _frozen(self.weights, float))

    def __len__(self) -> int:
        return len(self.weights)


def labels_from_annotations(
    intervals: Sequence[AnnotationInterval], fps: float, n_frames: int
) -> FrameLabelSeries:
    """Label each frame as intake if its timestamp lies inside any interval.

    Boundaries are inclusive on both ends. Overlapping intervals are treated
    as their union and logged.
    """
    if n_frames < 1:
        raise ValueError(f"n_frames must be >= 1, got {n_frames}")
    if not fps > 0:
        raise ValueError(f"fps must be positive, got {fps}")
    for iv in intervals:
        if not isinstance(iv, AnnotationInterval):
            raise TypeError(f"expected AnnotationInterval, got {iv!r}")

    ordered = sorted(intervals, key=lambda iv: (iv.start_s, iv.end_s))
    for prev, cur in zip(ordered, ordered[1:]):
        if cur.start_s <= prev.end_s:
            logger.warning("overlapping annotations %r and %r merged", prev, cur)

    t = np.arange(n_frames) / fps
    mask = np.zeros(n_frames, dtype=bool)
    for iv in intervals:
        mask |= (t >= iv.start_s) & (t <= iv.end_s)
    return FrameLabelSeries(fps, mask)


def n_frames_for_duration(duration_s: float, fps: float) -> int:
    """``floor(duration_s * fps)``, tolerant of float error just below an integer."""
    return int(math.floor(duration_s * fps + 1e-9))


def downsample_labels(series: FrameLabelSeries, factor: int) -> FrameLabelSeries:
    """Keep frames 0, factor, 2*factor, ... and divide fps by ``factor``."""
    if int(factor) != factor or factor < 1:
        raise ValueError(f"downsample factor must be an integer >= 1, got {factor}")
    factor = int(factor)
    if series.start_frame % factor:
        raise ValueError(
            f"start_frame {series.start_frame} is not a multiple of the downsample factor {factor}"
        )
    return FrameLabelSeries(series.fps / factor, series.intake[::factor], series.start_frame // factor)


def events_from_labels(series: FrameLabelSeries) -> list[tuple[int, int]]:
    """Maximal runs of intake frames as inclusive absolute ``(first, last)`` frames."""
    padded = np.concatenate(([False], series.intake, [False])).astype(np.int8)
    edges = np.diff(padded)
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1) - 1
    off = series.start_frame
    return [(int(s) + off, int(e) + off) for s, e in zip(starts, ends)]


def class_weights(batch_labels: Sequence[int], n_classes: int) -> WeightVector:
    """Inverse-frequency weights ``w_i = m / (C(i) * n)`` for one minibatch.

    ``m`` is the batch size, ``n`` the number of classes and ``C(i)`` the
    number of labels in the batch equal to label ``i``.
    """
    labels = np.asarray(batch_labels)
    if labels.size == 0:
        raise ValueError("class_weights needs a non-empty batch")
    if n_classes < 1:
        raise ValueError(f"n_classes must be >= 1, got {n_classes}")
    if labels.ndim != 1 or not np.issubdtype(labels.dtype, np.integer):
        raise ValueError("batch labels must be a 1-D sequence of integer class ids")
    if labels.min() < 0 or labels.max() >= n_classes:
        raise ValueError(f"class ids must lie in [0, {n_classes})")
    counts = np.bincount(labels, minlength=n_classes)
    m = labels.size
    return WeightVector(m / (counts[labels] * n_classes))


def weighted_cross_entropy(
    predicted_probs: Sequence[Sequence[float]],
    true_labels: Sequence[int],
    weights: WeightVector | Sequence[float],
) -> float:
    """Mean of ``w_i * -ln(p_i[y_i])`` over the batch, with p clamped to [1e-7, 1]."""
    probs = np.asarray(predicted_probs, dtype=float)
    y = np.asarray(true_labels)
    w = weights.weights if isinstance(weights, WeightVector) else np.asarray(weights, dtype=float)
    if probs.ndim != 2:
        raise ValueError("predicted_probs must be a 2-D array (batch x classes)")
    if not (len(probs) == len(y) == len(w)):
        raise ValueError(
            f"length mismatch: {len(probs)} predictions, {len(y)} labels, {len(w)} weights"
        )
    if len(y) == 0:
        raise ValueError("empty batch")
    if not np.allclose(probs.sum(axis=1), 1.0, atol=1e-6, rtol=0):
        raise ValueError("each probability vector must sum to 1")
    if y.min() < 0 or y.max() >= probs.shape[1]:
        raise ValueError("true label outside the class range")
    p_true = np.clip(probs[np.arange(len(y)), y], CLAMP_EPS, 1.0)
    return float(np.mean(w * -np.log(p_true)))
