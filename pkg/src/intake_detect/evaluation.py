"""Event-level scoring of sparse detections and frame-level UAR.

Each detection is matched against ground-truth events (inclusive frame
spans) in time order:

* the first detection inside an event is a true positive (TP),
* further detections inside the same event are false positives of type 1,
* detections outside every event are false positives of type 2,
* events without any detection are false negatives.
"""

from __future__ import annotations

import bisect
from dataclasses import asdict, dataclass
from typing import Iterable, Sequence

import numpy as np

from .timeline import FrameLabelSeries, same_fps


@dataclass(frozen=True)
class EvalCounts:
    tp: int = 0
    fp1: int = 0
    fp2: int = 0
    fn: int = 0

    def __post_init__(self) -> None:
        for name in ("tp", "fp1", "fp2", "fn"):
            v = getattr(self, name)
            if int(v) != v or v < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {v}")
            object.__setattr__(self, name, int(v))

    def __add__(self, other: EvalCounts) -> EvalCounts:
        if not isinstance(other, EvalCounts):
            return NotImplemented
        return EvalCounts(
            self.tp + other.tp, self.fp1 + other.fp1, self.fp2 + other.fp2, self.fn + other.fn
        )

    @property
    def n_detections(self) -> int:
        return self.tp + self.fp1 + self.fp2

    @property
    def n_events(self) -> int:
        return self.tp + self.fn

    @classmethod
    def total(cls, counts: Iterable[EvalCounts]) -> EvalCounts:
        out = cls()
        for c in counts:
            out = out + c
        return out


@dataclass(frozen=True)
class Metrics:
    precision: float
    recall: float
    f1: float

    def as_dict(self) -> dict[str, float]:
        return asdict(self)


def _check_events(gt_events: Sequence[tuple[int, int]]) -> list[tuple[int, int]]:
    events = sorted((int(a), int(b)) for a, b in gt_events)
    for a, b in events:
        if b < a:
            raise ValueError(f"event ({a}, {b}) ends before it starts")
    for (a0, b0), (a1, b1) in zip(events, events[1:]):
        if a1 <= b0:
            raise ValueError(f"overlapping ground-truth events ({a0}, {b0}) and ({a1}, {b1})")
    return events


def evaluate_detections(detections, gt_events: Sequence[tuple[int, int]]) -> EvalCounts:
    """Count TP / FP1 / FP2 / FN for detections against inclusive event spans.

    Args:
        detections: a ``DetectionList`` or any iterable of frame indices on the
            same frame basis as ``gt_events``.
        gt_events: non-overlapping ``(first_frame, last_frame)`` spans.
    """
    events = _check_events(gt_events)
    starts = [a for a, _ in events]
    frames = sorted(int(f) for f in getattr(detections, "frames", detections))
    hit = [False] * len(events)
    tp = fp1 = fp2 = 0
    for f in frames:
        j = bisect.bisect_right(starts, f) - 1
        if j >= 0 and f <= events[j][1]:
            if hit[j]:
                fp1 += 1
            else:
                hit[j] = True
                tp += 1
        else:
            fp2 += 1
    return EvalCounts(tp, fp1, fp2, len(events) - tp)


def compute_metrics(counts: EvalCounts) -> Metrics:
    """Precision, recall and F1; any zero denominator yields 0."""
    n_det = counts.tp + counts.fp1 + counts.fp2
    n_ev = counts.tp + counts.fn
    precision = counts.tp / n_det if n_det else 0.0
    recall = counts.tp / n_ev if n_ev else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return Metrics(precision, recall, f1)


def uar(predicted: FrameLabelSeries, truth: FrameLabelSeries) -> float:
    """Unweighted average recall over the classes present in ``truth``."""
    if (
        len(predicted) != len(truth)
        or not same_fps(predicted.fps, truth.fps)
        or predicted.start_frame != truth.start_frame
    ):
        raise ValueError(
            "predicted and true label series are misaligned "
            f"(len {len(predicted)} vs {len(truth)}, fps {predicted.fps} vs {truth.fps}, "
            f"start {predicted.start_frame} vs {truth.start_frame})"
        )
    recalls = []
    for cls in (True, False):
        mask = truth.intake == cls
        if mask.any():
            recalls.append(float(np.mean(predicted.intake[mask] == cls)))
    return float(np.mean(recalls))


def report_dict(
    counts: EvalCounts, *, uar_value: float | None = None, threshold: float | None = None
) -> dict:
    """Report JSON payload: counts, metrics and the optional UAR and threshold."""
    out: dict = asdict(counts)
    out.update(compute_metrics(counts).as_dict())
    if uar_value is not None:
        out["uar"] = uar_value
    if threshold is not None:
        out["threshold"] = threshold
    return out
