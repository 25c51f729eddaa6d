"""Seeded synthetic eating sessions: gesture annotations plus probability traces.

Defaults follow the dataset statistics of the original study: sessions of
816.46 s and gesture durations with mean 2.32 s and std 1.02 s. The default
mean gap (14.71 s) is what 4891 gestures over 102 such sessions imply.

Generation, in order of random draws per event: an exponential gap (mean
``mean_gap_s``, floored at ``min_gap_s``), then a normal duration floored at
``min_gesture_s``. Events are emitted until the next one would end after
``duration_s``. The clean trace is 0 outside events and a trapezoid inside:
0.5 on each boundary frame and 1.0 on interior frames. When ``noise_std > 0``
one normal draw per frame is added and the result clipped to [0, 1].
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace
from typing import Sequence

import numpy as np

from .rng import MASK64, SplitMix64
from .timeline import (
    AnnotationInterval,
    FrameLabelSeries,
    ProbabilitySeries,
    events_from_labels,
    labels_from_annotations,
    n_frames_for_duration,
)

REFERENCE_DURATION_S = 816.46
REFERENCE_GESTURE_MEAN_S = 2.32
REFERENCE_GESTURE_STD_S = 1.02
REFERENCE_MEAN_GAP_S = 14.71
RAMP_FRAMES = 2


@dataclass(frozen=True)
class SessionConfig:
    duration_s: float = REFERENCE_DURATION_S
    gesture_mean_s: float = REFERENCE_GESTURE_MEAN_S
    gesture_std_s: float = REFERENCE_GESTURE_STD_S
    mean_gap_s: float = REFERENCE_MEAN_GAP_S
    noise_std: float = 0.1
    fps: float = 8.0
    seed: int = 0
    min_gesture_s: float = 0.5
    min_gap_s: float | None = None
    start_frame: int = 0

    def __post_init__(self) -> None:
        if not self.duration_s > 0:
            raise ValueError(f"duration_s must be positive, got {self.duration_s}")
        if not self.fps > 0:
            raise ValueError(f"fps must be positive, got {self.fps}")
        if not 0 <= self.noise_std < 1:
            raise ValueError(f"noise_std must lie in [0, 1), got {self.noise_std}")
        if self.gesture_std_s < 0:
            raise ValueError(f"gesture_std_s must be >= 0, got {self.gesture_std_s}")
        if not self.min_gesture_s > 0:
            raise ValueError(f"min_gesture_s must be positive, got {self.min_gesture_s}")
        if not self.gesture_mean_s > self.min_gesture_s:
            raise ValueError(
                f"gesture_mean_s ({self.gesture_mean_s}) must exceed min_gesture_s ({self.min_gesture_s})"
            )
        if not self.mean_gap_s > 0:
            raise ValueError(f"mean_gap_s must be positive, got {self.mean_gap_s}")
        if self.min_gap_s is not None and self.min_gap_s < 0:
            raise ValueError(f"min_gap_s must be >= 0, got {self.min_gap_s}")
        if not 0 <= self.start_frame < self.n_frames:
            raise ValueError(f"start_frame must lie in [0, {self.n_frames}), got {self.start_frame}")
        if self.duration_s < self.min_gesture_s:
            raise ValueError(
                f"duration {self.duration_s} s is shorter than the minimum gesture {self.min_gesture_s} s"
            )

    @property
    def n_frames(self) -> int:
        return n_frames_for_duration(self.duration_s, self.fps)

    @property
    def gap_floor_s(self) -> float:
        return 1.0 / self.fps if self.min_gap_s is None else max(self.min_gap_s, 1.0 / self.fps)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class SyntheticSession:
    config: SessionConfig
    events: tuple[AnnotationInterval, ...]
    probs: ProbabilitySeries

    @property
    def labels(self) -> FrameLabelSeries:
        return labels_from_annotations(self.events, self.config.fps, self.config.n_frames)

    @property
    def gt_events(self) -> list[tuple[int, int]]:
        """Inclusive frame spans of the events at the session frame rate."""
        return events_from_labels(self.labels)

    @property
    def clean_probs(self) -> np.ndarray:
        return clean_trace(self.labels)


def _draw_events(cfg: SessionConfig, rng: SplitMix64) -> list[AnnotationInterval]:
    events = []
    t = 0.0
    while True:
        gap = max(rng.exponential(cfg.mean_gap_s), cfg.gap_floor_s)
        dur = max(cfg.gesture_mean_s + cfg.gesture_std_s * rng.normal(), cfg.min_gesture_s)
        start = t + gap
        end = start + dur
        if end > cfg.duration_s:
            return events
        events.append(AnnotationInterval(start, end))
        t = end


def clean_trace(labels: FrameLabelSeries) -> np.ndarray:
    """Noise-free trapezoid profile: 0.5 on boundary frames of each event, 1 inside."""
    p = np.zeros(len(labels))
    off = labels.start_frame
    for a, b in events_from_labels(labels):
        k = np.arange(a, b + 1)
        dist = np.minimum(k - a, b - k)
        p[a - off : b - off + 1] = np.minimum(1.0, (dist + 1) / RAMP_FRAMES)
    return p


def generate_session(config: SessionConfig) -> SyntheticSession:
    rng = SplitMix64(config.seed)
    events = _draw_events(config, rng)
    if not events:
        raise ValueError(
            f"configuration produced no gesture within {config.duration_s} s "
            f"(mean gap {config.mean_gap_s} s, seed {config.seed})"
        )
    labels = labels_from_annotations(events, config.fps, config.n_frames)
    p = clean_trace(labels)
    if config.noise_std > 0:
        p = np.clip(p + config.noise_std * rng.normal_array(len(p)), 0.0, 1.0)
    probs = ProbabilitySeries(config.fps, p[config.start_frame :], config.start_frame)
    return SyntheticSession(config, tuple(events), probs)


def generate_dataset(n_sessions: int, base_seed: int, config: SessionConfig | None = None) -> list[SyntheticSession]:
    """Sessions ``k = 0..n-1`` seeded with ``base_seed + k`` (mod 2**64)."""
    if n_sessions < 1:
        raise ValueError(f"n_sessions must be >= 1, got {n_sessions}")
    config = config or SessionConfig()
    return [
        generate_session(replace(config, seed=(base_seed + k) & MASK64)) for k in range(n_sessions)
    ]


def duration_stats(sessions: Sequence[SyntheticSession]) -> tuple[float, float, int]:
    """Pooled mean, sample std and count of event durations."""
    d = np.array([ev.end_s - ev.start_s for s in sessions for ev in s.events])
    return float(d.mean()), float(d.std(ddof=1)) if d.size > 1 else math.nan, int(d.size)
