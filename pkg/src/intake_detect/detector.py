"""Sparse intake-gesture detection from frame-level probabilities.

Probabilities below a threshold are zeroed, then local maxima are picked
greedily (highest first, earliest frame on ties) while enforcing a minimum
distance between picks. The threshold is tuned by grid search on F1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .evaluation import EvalCounts, compute_metrics, evaluate_detections
from .timeline import ProbabilitySeries

DEFAULT_MIN_DIST_S = 2.0


@dataclass(frozen=True)
class DetectorConfig:
    p_t: float
    d_s: float = DEFAULT_MIN_DIST_S

    def __post_init__(self) -> None:
        if not 0.0 <= self.p_t <= 1.0:
            raise ValueError(f"threshold must lie in [0, 1], got {self.p_t}")
        if not self.d_s > 0:
            raise ValueError(f"minimum distance must be positive, got {self.d_s}")


@dataclass(frozen=True)
class GridSpec:
    """Inclusive threshold grid ``lo, lo + step, ..., <= hi``."""

    lo: float = 0.5
    hi: float = 1.0
    step: float = 0.001

    def __post_init__(self) -> None:
        if not self.lo < self.hi:
            raise ValueError(f"grid needs lo < hi, got {self.lo} >= {self.hi}")
        if not self.step > 0:
            raise ValueError(f"grid step must be positive, got {self.step}")
        if self.lo < 0 or self.hi > 1:
            raise ValueError("grid must lie inside [0, 1]")

    def points(self) -> list[float]:
        n = int(math.floor((self.hi - self.lo) / self.step + 1e-9))
        # rounding keeps points like 0.751 exact instead of 0.7510000000000001
        return [round(self.lo + i * self.step, 12) for i in range(n + 1)]


@dataclass(frozen=True)
class DetectionList:
    """Detected gesture frames (absolute, strictly ascending)."""

    frames: tuple[int, ...]
    fps: float

    def __post_init__(self) -> None:
        frames = tuple(int(f) for f in self.frames)
        if any(b <= a for a, b in zip(frames, frames[1:])):
            raise ValueError("detection frames must be strictly ascending")
        object.__setattr__(self, "frames", frames)

    @property
    def times(self) -> list[float]:
        return [f / self.fps for f in self.frames]

    def __len__(self) -> int:
        return len(self.frames)

    def __iter__(self):
        return iter(self.frames)


def min_distance_frames(d_s: float, fps: float) -> int:
    """Minimum distance in frames, ``d_s * fps`` rounded half-up (at least 1)."""
    return max(1, int(math.floor(d_s * fps + 0.5)))


def threshold_probs(series: ProbabilitySeries, p_t: float) -> ProbabilitySeries:
    """Zero every probability strictly below ``p_t``."""
    if not 0.0 <= p_t <= 1.0:
        raise ValueError(f"threshold must lie in [0, 1], got {p_t}")
    p = series.probs
    return ProbabilitySeries(series.fps, np.where(p >= p_t, p, 0.0), series.start_frame)


def local_maxima(p: np.ndarray) -> np.ndarray:
    """Indices of positive local maxima.

    A maximal run of equal values counts as one maximum, located at its first
    frame, when both neighbouring values (zero beyond the ends) are lower.
    """
    p = np.asarray(p, dtype=float)
    if p.size == 0:
        return np.zeros(0, dtype=int)
    run_start = np.flatnonzero(np.concatenate(([True], p[1:] != p[:-1])))
    run_val = p[run_start]
    left = np.concatenate(([0.0], run_val[:-1]))
    right = np.concatenate((run_val[1:], [0.0]))
    keep = (run_val > 0) & (run_val > left) & (run_val > right)
    return run_start[keep]


def detect_maxima(
    thresholded: ProbabilitySeries, d_frames: int, *, local_only: bool = True
) -> DetectionList:
    """Greedy maximum search with a minimum distance of ``d_frames``.

    Candidates are the local maxima of the thresholded series (every non-zero
    frame when ``local_only`` is False). The highest remaining candidate is
    taken first, earliest frame winning ties, and every candidate closer than
    ``d_frames`` to it is discarded.
    """
    if int(d_frames) != d_frames or d_frames < 1:
        raise ValueError(f"d_frames must be an integer >= 1, got {d_frames}")
    d_frames = int(d_frames)
    p = thresholded.probs
    cand = local_maxima(p) if local_only else np.flatnonzero(p > 0)
    order = cand[np.lexsort((cand, -p[cand]))]

    blocked = np.zeros(p.size, dtype=bool)
    picked = []
    for i in order:
        if blocked[i]:
            continue
        picked.append(int(i))
        blocked[max(0, i - d_frames + 1) : i + d_frames] = True
    picked.sort()
    return DetectionList(tuple(thresholded.start_frame + i for i in picked), thresholded.fps)


def detect(series: ProbabilitySeries, config: DetectorConfig, *, local_only: bool = True) -> DetectionList:
    return detect_maxima(
        threshold_probs(series, config.p_t),
        min_distance_frames(config.d_s, series.fps),
        local_only=local_only,
    )


@dataclass(frozen=True)
class TuningResult:
    threshold: float
    f1: float
    counts: EvalCounts
    n_points: int
    curve: list[tuple[float, float]] = field(default_factory=list, repr=False)


Session = tuple[ProbabilitySeries, Sequence[tuple[int, int]]]


def _f1_key(c: EvalCounts) -> Fraction:
    denom = 2 * c.tp + c.fp1 + c.fp2 + c.fn
    return Fraction(2 * c.tp, denom) if denom else Fraction(0)


def tune_threshold(
    sessions: Sequence[Session],
    grid: GridSpec | None = None,
    d_s: float = DEFAULT_MIN_DIST_S,
) -> TuningResult:
    """Pick the grid threshold maximising F1 over counts pooled across sessions.

    Ties go to the smallest threshold.
    """
    grid = grid or GridSpec()
    if not sessions:
        raise ValueError("tune_threshold needs at least one session")
    if sum(len(ev) for _, ev in sessions) == 0:
        raise ValueError("no ground-truth events in any session; F1 is undefined")

    # thresholds keeping the same set of frames give identical detections
    caches: list[tuple[np.ndarray, dict[int, EvalCounts]]] = [
        (np.unique(series.probs), {}) for series, _ in sessions
    ]
    best: tuple[Fraction, float, EvalCounts] | None = None
    curve = []
    points = grid.points()
    for t in points:
        total = EvalCounts()
        for (series, events), (levels, cache) in zip(sessions, caches):
            key = int(np.searchsorted(levels, t, side="left"))
            counts = cache.get(key)
            if counts is None:
                dets = detect(series, DetectorConfig(t, d_s))
                counts = cache[key] = evaluate_detections(dets, events)
            total = total + counts
        key = _f1_key(total)
        curve.append((t, float(key)))
        if best is None or key > best[0]:
            best = (key, t, total)
    assert best is not None
    _, t_best, counts = best
    return TuningResult(t_best, compute_metrics(counts).f1, counts, len(points), curve)
