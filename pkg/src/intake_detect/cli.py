"""Command-line front end.

Exit codes: 0 on success, 2 for invalid input or arguments, 1 for internal
errors. Every command that writes files also writes a run manifest
(``<output>.manifest.json``; ``manifest.json`` for ``simulate``) holding the
arguments needed to reproduce the run.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

from . import __version__
from .archspec import builtin_arch, count_params, propagate_shapes
from .archspec.builtin import ARCH_NAMES
from .detector import DEFAULT_MIN_DIST_S, DetectionList, DetectorConfig, GridSpec, detect, tune_threshold
from .evaluation import compute_metrics, evaluate_detections, report_dict, uar
from .fileio import (
    InputError,
    atomic_write_text,
    read_annotations,
    read_detections,
    read_probs,
    write_annotations,
    write_detections,
    write_json,
    write_labels,
    write_probs,
)
from .report import render_timeline_svg
from .synth import (
    REFERENCE_DURATION_S,
    REFERENCE_GESTURE_MEAN_S,
    REFERENCE_GESTURE_STD_S,
    REFERENCE_MEAN_GAP_S,
    SessionConfig,
    generate_dataset,
)
from .timeline import (
    FrameLabelSeries,
    downsample_labels,
    events_from_labels,
    labels_from_annotations,
    n_frames_for_duration,
)

LOG_ENV = "INTAKE_DETECT_LOG_LEVEL"
log = logging.getLogger("intake_detect")


@dataclass
class RunManifest:
    command: str
    argv: list[str]
    inputs: dict[str, str] = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    seeds: list[int] = field(default_factory=list)
    tool_version: str = __version__

    def write(self, path: Path, **extra) -> None:
        payload = asdict(self)
        payload.update(extra)
        write_json(path, payload)


class UsageError(ValueError):
    pass


def _manifest_path(out: Path) -> Path:
    return out.with_name(out.name + ".manifest.json")


def _gt_events(annotations_path: Path, fps: float, n_frames: int) -> list[tuple[int, int]]:
    """Ground-truth frame spans; scoring needs distinct events, so overlaps are rejected."""
    intervals = sorted(read_annotations(annotations_path), key=lambda iv: iv.start_s)
    for a, b in zip(intervals, intervals[1:]):
        if b.start_s <= a.end_s:
            raise InputError(
                f"{annotations_path}: overlapping ground-truth events "
                f"[{a.start_s}, {a.end_s}] and [{b.start_s}, {b.end_s}]"
            )
    return events_from_labels(labels_from_annotations(intervals, fps, n_frames))


def _frames_to_cover(annotations_path: Path, fps: float, *extra: int) -> int:
    intervals = read_annotations(annotations_path)
    last = max([int(iv.end_s * fps) for iv in intervals] + list(extra), default=0)
    return last + 1


# -- commands ------------------------------------------------------------------

def cmd_label(args: argparse.Namespace) -> int:
    src_fps = args.source_fps or args.fps
    factor = src_fps / args.fps
    if abs(factor - round(factor)) > 1e-9 or factor < 1:
        raise UsageError(f"--source-fps {src_fps} must be an integer multiple of --fps {args.fps}")
    factor = int(round(factor))
    if args.n_frames is not None:
        n_frames = args.n_frames
    elif args.duration is not None:
        n_frames = n_frames_for_duration(args.duration, src_fps)
    else:
        raise UsageError("give either --n-frames or --duration")
    intervals = read_annotations(args.annotations)
    series = labels_from_annotations(intervals, src_fps, n_frames)
    if factor > 1:
        series = downsample_labels(series, factor)
    write_labels(args.out, series)
    RunManifest(
        "label",
        args.argv,
        {"annotations": str(args.annotations)},
        {"fps": args.fps, "source_fps": src_fps, "n_frames": n_frames},
    ).write(_manifest_path(args.out))
    n_events = len(events_from_labels(series))
    print(f"{len(series)} frames at {series.fps:g} fps, {n_events} intake events -> {args.out}")
    return 0


def cmd_detect(args: argparse.Namespace) -> int:
    probs = read_probs(args.probs, args.fps)
    config = DetectorConfig(args.threshold, args.min_dist)
    dets = detect(probs, config)
    write_detections(args.out, dets)
    RunManifest(
        "detect", args.argv, {"probs": str(args.probs)}, {"fps": args.fps, **asdict(config)}
    ).write(_manifest_path(args.out))
    print(f"{len(dets)} detections -> {args.out}")
    return 0


def _match_sessions(probs_dir: Path, ann_dir: Path) -> list[str]:
    for d in (probs_dir, ann_dir):
        if not d.is_dir():
            raise InputError(f"{d}: not a directory")
    p = {f.stem for f in probs_dir.glob("*.csv")}
    a = {f.stem for f in ann_dir.glob("*.csv")}
    if p != a:
        parts = []
        if p - a:
            parts.append("probabilities without annotations: " + ", ".join(sorted(p - a)))
        if a - p:
            parts.append("annotations without probabilities: " + ", ".join(sorted(a - p)))
        raise InputError("unmatched session files; " + "; ".join(parts))
    if not p:
        raise InputError(f"{probs_dir}: no session CSV files")
    return sorted(p)


def cmd_tune(args: argparse.Namespace) -> int:
    stems = _match_sessions(args.probs_dir, args.annotations_dir)
    sessions = []
    for stem in stems:
        probs = read_probs(args.probs_dir / f"{stem}.csv", args.fps)
        n_frames = probs.start_frame + len(probs)
        sessions.append((probs, _gt_events(args.annotations_dir / f"{stem}.csv", args.fps, n_frames)))
    grid = GridSpec(args.grid_lo, args.grid_hi, args.grid_step)
    result = tune_threshold(sessions, grid, args.min_dist)
    report = report_dict(result.counts, threshold=result.threshold)
    print(f"threshold {result.threshold:.3f}  F1 {result.f1:.3f}  ({result.n_points} grid points, {len(stems)} sessions)")
    if args.out:
        write_json(args.out, report)
        RunManifest(
            "tune",
            args.argv,
            {"probs_dir": str(args.probs_dir), "annotations_dir": str(args.annotations_dir)},
            {"fps": args.fps, "min_dist": args.min_dist, **asdict(grid), "sessions": stems},
        ).write(_manifest_path(args.out))
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    dets = read_detections(args.detections, args.fps)
    probs = read_probs(args.probs, args.fps) if args.probs else None
    extra = [probs.start_frame + len(probs) - 1] if probs is not None else []
    n_frames = _frames_to_cover(args.annotations, args.fps, *dets.frames, *extra)
    events = _gt_events(args.annotations, args.fps, n_frames)
    counts = evaluate_detections(dets, events)
    uar_value = None
    if probs is not None:
        truth_all = labels_from_annotations(read_annotations(args.annotations), args.fps, n_frames).intake
        lo = probs.start_frame
        truth = FrameLabelSeries(args.fps, truth_all[lo : lo + len(probs)], lo)
        pred = FrameLabelSeries(args.fps, probs.probs >= 0.5, lo)
        uar_value = uar(pred, truth)
    report = report_dict(counts, uar_value=uar_value, threshold=args.threshold)
    m = compute_metrics(counts)
    print(f"TP {counts.tp}  FP1 {counts.fp1}  FP2 {counts.fp2}  FN {counts.fn}")
    print(f"precision {m.precision:.3f}  recall {m.recall:.3f}  F1 {m.f1:.3f}")
    if uar_value is not None:
        print(f"UAR {uar_value:.4f}")
    if args.out:
        write_json(args.out, report)
        inputs = {"detections": str(args.detections), "annotations": str(args.annotations)}
        if args.probs:
            inputs["probs"] = str(args.probs)
        RunManifest("eval", args.argv, inputs, {"fps": args.fps}).write(_manifest_path(args.out))
    return 0


def cmd_params(args: argparse.Namespace) -> int:
    if args.arch not in ARCH_NAMES:
        raise UsageError(f"unknown architecture {args.arch!r}; valid names: {', '.join(ARCH_NAMES)}")
    spec = builtin_arch(args.arch)
    rows = propagate_shapes(spec)
    total = count_params(spec)
    ref = spec.reference_params
    rel = total / ref - 1.0 if ref else None
    print(f"{spec.name}: {spec.description}")
    print(f"{'pathway':<8} {'layer':<16} {'kernel':<28} {'output':<18} {'params':>12}")
    for r in rows:
        print(f"{r.pathway:<8} {r.name:<16} {r.kernel:<28} {str(r.shape):<18} {r.params:>12,d}")
    print(f"total {total:,d} ({total / 1e6:.2f}M)")
    if ref:
        print(f"reference {ref / 1e6:.2f}M  relative error {rel:+.2%}  tolerance {spec.tolerance:.0%}")
    if args.json:
        payload = {
            "name": spec.name,
            "layers": [
                {
                    "pathway": r.pathway,
                    "name": r.name,
                    "kind": r.kind,
                    "kernel": r.kernel,
                    "output": [r.shape.t, r.shape.h, r.shape.w, r.shape.c],
                    "in_channels": r.in_channels,
                    "params": r.params,
                }
                for r in rows
            ],
            "total_params": total,
            "reference_params": ref,
            "relative_error": rel,
        }
        write_json(args.json, payload)
        RunManifest("params", args.argv, {}, {"arch": args.arch}).write(_manifest_path(args.json))
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    if args.n < 1:
        raise UsageError(f"--n must be >= 1, got {args.n}")
    base = SessionConfig(
        duration_s=args.duration,
        gesture_mean_s=args.gesture_mean,
        gesture_std_s=args.gesture_std,
        mean_gap_s=args.mean_gap,
        noise_std=args.noise,
        fps=args.fps,
        seed=args.seed,
        min_gap_s=args.min_gap,
        start_frame=args.start_frame,
    )
    sessions = generate_dataset(args.n, args.seed, base)
    out: Path = args.out
    entries = []
    for k, s in enumerate(sessions):
        stem = f"session_{k:03d}"
        write_probs(out / "probs" / f"{stem}.csv", s.probs)
        write_annotations(out / "annotations" / f"{stem}.csv", s.events)
        entries.append({"name": stem, "seed": s.config.seed, "n_events": len(s.events), "n_frames": s.config.n_frames})
    config = base.to_dict()
    config.pop("seed")
    RunManifest("simulate", args.argv, {}, config, [s.config.seed for s in sessions]).write(
        out / "manifest.json",
        sessions=entries,
        reference_statistics={
            "session_duration_mean_s": REFERENCE_DURATION_S,
            "gesture_duration_mean_s": REFERENCE_GESTURE_MEAN_S,
            "gesture_duration_std_s": REFERENCE_GESTURE_STD_S,
        },
    )
    print(f"{len(sessions)} sessions, {sum(e['n_events'] for e in entries)} events -> {out}")
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    probs = read_probs(args.probs, args.fps)
    dets: DetectionList = read_detections(args.detections, args.fps)
    n_frames = _frames_to_cover(args.annotations, args.fps, probs.start_frame + len(probs) - 1, *dets.frames)
    events = _gt_events(args.annotations, args.fps, n_frames)
    svg = render_timeline_svg(probs, dets, events, args.threshold, title=Path(args.probs).stem)
    atomic_write_text(args.out, svg)
    RunManifest(
        "report",
        args.argv,
        {"probs": str(args.probs), "detections": str(args.detections), "annotations": str(args.annotations)},
        {"fps": args.fps, "threshold": args.threshold},
    ).write(_manifest_path(args.out))
    print(f"report -> {args.out}")
    return 0


# -- parser --------------------------------------------------------------------

def _prob(text: str) -> float:
    v = float(text)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"{v} is outside [0, 1]")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="intake-detect", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, out_required: bool = True) -> None:
        p.add_argument("--fps", type=float, default=8.0, help="frame rate of the inputs (default 8)")
        p.add_argument("--out", type=Path, required=out_required)

    p = sub.add_parser("label", help="frame labels from an annotation CSV")
    p.add_argument("--annotations", type=Path, required=True)
    p.add_argument("--n-frames", type=int)
    p.add_argument("--duration", type=float, help="session length in seconds")
    p.add_argument("--source-fps", type=float, help="label at this rate, then downsample to --fps")
    common(p)
    p.set_defaults(func=cmd_label)

    p = sub.add_parser("detect", help="sparse detections from a probability CSV")
    p.add_argument("--probs", type=Path, required=True)
    p.add_argument("--threshold", type=_prob, required=True)
    p.add_argument("--min-dist", type=float, default=DEFAULT_MIN_DIST_S, help="seconds (default 2.0)")
    common(p)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("tune", help="grid-search the detection threshold")
    p.add_argument("--probs-dir", type=Path, required=True)
    p.add_argument("--annotations-dir", type=Path, required=True)
    p.add_argument("--grid-lo", type=float, default=0.5)
    p.add_argument("--grid-hi", type=float, default=1.0)
    p.add_argument("--grid-step", type=float, default=0.001)
    p.add_argument("--min-dist", type=float, default=DEFAULT_MIN_DIST_S)
    common(p, out_required=False)
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("eval", help="score detections against annotations")
    p.add_argument("--detections", type=Path, required=True)
    p.add_argument("--annotations", type=Path, required=True)
    p.add_argument("--probs", type=Path, help="also report frame-level UAR (p >= 0.5 is intake)")
    p.add_argument("--threshold", type=_prob, help="echoed into the report")
    common(p, out_required=False)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("params", help="layer shapes and parameter count of a built-in model")
    p.add_argument("arch", help="one of: " + ", ".join(ARCH_NAMES))
    p.add_argument("--json", type=Path, help="also write the table as JSON")
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("simulate", help="write synthetic sessions")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--duration", type=float, default=REFERENCE_DURATION_S)
    p.add_argument("--gesture-mean", type=float, default=REFERENCE_GESTURE_MEAN_S)
    p.add_argument("--gesture-std", type=float, default=REFERENCE_GESTURE_STD_S)
    p.add_argument("--mean-gap", type=float, default=REFERENCE_MEAN_GAP_S)
    p.add_argument("--min-gap", type=float)
    p.add_argument("--noise", type=float, default=0.1)
    p.add_argument("--start-frame", type=int, default=0, help="first predicted frame, e.g. 15 for 16-frame context")
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("report", help="render an SVG timeline")
    p.add_argument("--probs", type=Path, required=True)
    p.add_argument("--detections", type=Path, required=True)
    p.add_argument("--annotations", type=Path, required=True)
    p.add_argument("--threshold", type=_prob)
    common(p)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    logging.basicConfig(level=os.environ.get(LOG_ENV, "WARNING").upper(), format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.argv = argv
    try:
        return args.func(args)
    except (InputError, UsageError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception:
        log.exception("internal error")
        return 1


if __name__ == "__main__":
    sys.exit(main())
