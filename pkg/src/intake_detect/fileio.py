"""CSV/JSON readers and writers for annotations, labels, probabilities and detections.

Floats are written with ``repr`` so every writer's output reads back exactly.
All writes go to a temporary file in the target directory and are then
renamed into place.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path
from typing import Iterable

from .detector import DetectionList
from .timeline import AnnotationInterval, FrameLabelSeries, Label, ProbabilitySeries

ANNOTATION_HEADER = ["start_s", "end_s", "label"]
LABEL_HEADER = ["frame", "label"]
PROB_HEADER = ["frame", "p_intake"]
DETECTION_HEADER = ["frame", "time_s"]


class InputError(ValueError):
    """Malformed or inconsistent input file."""


def atomic_write_text(path: str | os.PathLike, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path: str | os.PathLike, payload: dict) -> None:
    atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _csv_text(header: list[str], rows: Iterable[Iterable]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _read_rows(path: str | os.PathLike, header: list[str]) -> list[tuple[int, list[str]]]:
    path = Path(path)
    if not path.is_file():
        raise InputError(f"{path}: no such file")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        first = next(reader, None)
        if first is None:
            raise InputError(f"{path}:1: empty file, expected header {','.join(header)}")
        if [c.strip() for c in first] != header:
            raise InputError(f"{path}:1: expected header {','.join(header)}, got {','.join(first)}")
        rows = []
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise InputError(f"{path}:{line_no}: expected {len(header)} fields, got {len(row)}")
            rows.append((line_no, [c.strip() for c in row]))
    return rows


def _float(path, line_no: int, field: str, text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise InputError(f"{path}:{line_no}: {field} is not a number: {text!r}") from None
    if not math.isfinite(v):
        raise InputError(f"{path}:{line_no}: {field} is not finite: {text!r}")
    return v


def _int(path, line_no: int, field: str, text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise InputError(f"{path}:{line_no}: {field} is not an integer: {text!r}") from None


# -- annotations -------------------------------------------------------------

def write_annotations(path: str | os.PathLike, intervals: Iterable[AnnotationInterval]) -> None:
    rows = ((repr(iv.start_s), repr(iv.end_s), iv.label.value) for iv in intervals)
    atomic_write_text(path, _csv_text(ANNOTATION_HEADER, rows))


def read_annotations(path: str | os.PathLike) -> list[AnnotationInterval]:
    out = []
    for line_no, (start, end, label) in _read_rows(path, ANNOTATION_HEADER):
        s = _float(path, line_no, "start_s", start)
        e = _float(path, line_no, "end_s", end)
        try:
            out.append(AnnotationInterval(s, e, Label(label)))
        except ValueError as exc:
            raise InputError(f"{path}:{line_no}: {exc}") from None
    return out


# -- frame labels ------------------------------------------------------------

def write_labels(path: str | os.PathLike, series: FrameLabelSeries) -> None:
    rows = zip(series.frames.tolist(), (lab.value for lab in series.labels))
    atomic_write_text(path, _csv_text(LABEL_HEADER, rows))


def _contiguous_frames(path, frames: list[tuple[int, int]]) -> int:
    if not frames:
        raise InputError(f"{path}: no data rows")
    first = frames[0][1]
    if first < 0:
        raise InputError(f"{path}:{frames[0][0]}: negative frame index {first}")
    for k, (line_no, f) in enumerate(frames):
        if f != first + k:
            raise InputError(f"{path}:{line_no}: expected frame {first + k}, got {f}")
    return first


def read_labels(path: str | os.PathLike, fps: float) -> FrameLabelSeries:
    rows = _read_rows(path, LABEL_HEADER)
    frames = [(ln, _int(path, ln, "frame", r[0])) for ln, r in rows]
    start = _contiguous_frames(path, frames)
    labels = []
    for ln, r in rows:
        try:
            labels.append(Label(r[1]))
        except ValueError:
            raise InputError(f"{path}:{ln}: label must be intake or non_intake, got {r[1]!r}") from None
    return FrameLabelSeries.from_labels(labels, fps, start)


# -- probabilities -----------------------------------------------------------

def write_probs(path: str | os.PathLike, series: ProbabilitySeries) -> None:
    rows = zip(series.frames.tolist(), map(repr, series.probs.tolist()))
    atomic_write_text(path, _csv_text(PROB_HEADER, rows))


def read_probs(path: str | os.PathLike, fps: float) -> ProbabilitySeries:
    rows = _read_rows(path, PROB_HEADER)
    frames = [(ln, _int(path, ln, "frame", r[0])) for ln, r in rows]
    start = _contiguous_frames(path, frames)
    probs = []
    for ln, r in rows:
        p = _float(path, ln, "p_intake", r[1])
        if not 0.0 <= p <= 1.0:
            raise InputError(f"{path}:{ln}: p_intake {p} outside [0, 1]")
        probs.append(p)
    return ProbabilitySeries(fps, probs, start)


# -- detections --------------------------------------------------------------

def write_detections(path: str | os.PathLike, detections: DetectionList) -> None:
    rows = ((f, repr(f / detections.fps)) for f in detections.frames)
    atomic_write_text(path, _csv_text(DETECTION_HEADER, rows))


def read_detections(path: str | os.PathLike, fps: float) -> DetectionList:
    """Read detections, checking that every ``time_s`` equals ``frame / fps``."""
    frames = []
    for ln, (frame, time_s) in _read_rows(path, DETECTION_HEADER):
        f = _int(path, ln, "frame", frame)
        t = _float(path, ln, "time_s", time_s)
        if not math.isclose(t, f / fps, rel_tol=1e-9, abs_tol=1e-9):
            raise InputError(
                f"{path}:{ln}: time_s {t} does not match frame {f} at {fps} fps "
                f"(expected {f / fps}); inputs use different frame rates"
            )
        frames.append((ln, f))
    for (_, a), (ln, b) in zip(frames, frames[1:]):
        if b <= a:
            raise InputError(f"{path}:{ln}: detection frames must be strictly ascending")
    return DetectionList(tuple(f for _, f in frames), fps)
