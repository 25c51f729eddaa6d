"""Static SVG timeline: probability curve, threshold, ground truth and detections."""

from __future__ import annotations

from typing import Sequence
from xml.sax.saxutils import escape

from .detector import DetectionList
from .timeline import ProbabilitySeries

WIDTH = 1200
HEIGHT = 240
MARGIN = 40


def render_timeline_svg(
    probs: ProbabilitySeries,
    detections: DetectionList,
    gt_events: Sequence[tuple[int, int]],
    threshold: float | None = None,
    title: str = "",
) -> str:
    """Render one session as an SVG document.

    Ground-truth events are shaded bands, the probability trace is a single
    polyline and each detection is a circle on the trace.
    """
    fps = probs.fps
    first = probs.start_frame
    last = max([first + len(probs) - 1, *detections.frames, *(b for _, b in gt_events)], default=first)
    span = max(last - first, 1)
    plot_w = WIDTH - 2 * MARGIN
    plot_h = HEIGHT - 2 * MARGIN

    def x(frame: float) -> float:
        return MARGIN + (frame - first) / span * plot_w

    def y(p: float) -> float:
        return MARGIN + (1.0 - p) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f"<title>{escape(title or 'intake detection timeline')}</title>",
        f'<rect class="frame" x="{MARGIN}" y="{MARGIN}" width="{plot_w}" height="{plot_h}" '
        'fill="none" stroke="#888"/>',
    ]
    for a, b in gt_events:
        x0, x1 = x(a), x(b)
        parts.append(
            f'<rect class="gt" x="{x0:.2f}" y="{MARGIN}" width="{max(x1 - x0, 1.0):.2f}" '
            f'height="{plot_h}" fill="#2ca02c" fill-opacity="0.25"/>'
        )
    pts = " ".join(f"{x(f):.2f},{y(p):.2f}" for f, p in zip(probs.frames.tolist(), probs.probs.tolist()))
    parts.append(f'<polyline class="prob" points="{pts}" fill="none" stroke="#1f77b4" stroke-width="1"/>')
    if threshold is not None:
        parts.append(
            f'<line class="threshold" x1="{MARGIN}" x2="{WIDTH - MARGIN}" y1="{y(threshold):.2f}" '
            f'y2="{y(threshold):.2f}" stroke="#d62728" stroke-dasharray="4 3"/>'
        )
    p_at = dict(zip(probs.frames.tolist(), probs.probs.tolist()))
    for f in detections.frames:
        parts.append(
            f'<circle class="detection" cx="{x(f):.2f}" cy="{y(p_at.get(f, 1.0)):.2f}" r="3" '
            f'fill="#ff7f0e"><title>{f / fps:.3f} s</title></circle>'
        )
    parts.append(
        f'<text x="{MARGIN}" y="{HEIGHT - 10}" font-size="11">{first / fps:.1f} s</text>'
        f'<text x="{WIDTH - MARGIN}" y="{HEIGHT - 10}" font-size="11" text-anchor="end">{last / fps:.1f} s</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
