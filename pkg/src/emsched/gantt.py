"""Deterministic SVG Gantt charts."""
from __future__ import annotations

from typing import Optional
from xml.sax.saxutils import escape

from .instance import Instance
from .schedule import Schedule

#: Pixels per tenth of the makespan, so the time axis is always 1000 px wide.
PX_PER_TENTH = 100
LANE_HEIGHT = 30
LANE_GAP = 6
MARGIN_LEFT = 48
MARGIN_TOP = 24
CHAR_WIDTH = 7.0
PALETTE = (
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
    "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac",
)


def _fmt(v: float) -> str:
    return f"{v:.3f}".rstrip("0").rstrip(".")


def render_svg(s: Schedule, inst: Optional[Instance] = None, title: Optional[str] = None) -> str:
    """Render ``s`` with one lane per processor and one rectangle per segment.

    The x axis maps ``[0, makespan]`` onto 1000 px.  A task's label (its
    instance label when ``inst`` is given, else its id) is centered in the
    rectangle when it fits.  Output depends only on the inputs.
    """
    width = 10 * PX_PER_TENTH
    procs = sorted({seg.processor for seg in s.segments})
    lane = {p: k for k, p in enumerate(procs)}
    span = s.makespan if s.makespan > 0 else 1.0
    scale = width / span
    height = MARGIN_TOP + len(procs) * (LANE_HEIGHT + LANE_GAP) + 24
    total_w = MARGIN_LEFT + width + 16
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{total_w}" height="{height}" '
        f'viewBox="0 0 {total_w} {height}" font-family="monospace" font-size="12">'
    ]
    if title:
        out.append(f'<title>{escape(title)}</title>')
    for p in procs:
        y = MARGIN_TOP + lane[p] * (LANE_HEIGHT + LANE_GAP)
        out.append(
            f'<text class="lane" x="4" y="{_fmt(y + LANE_HEIGHT / 2 + 4)}">P{p}</text>'
        )
    for seg in s.segments:
        x = MARGIN_LEFT + seg.start * scale
        w = seg.length * scale
        y = MARGIN_TOP + lane[seg.processor] * (LANE_HEIGHT + LANE_GAP)
        colour = PALETTE[seg.task % len(PALETTE)]
        out.append(
            f'<rect x="{_fmt(x)}" y="{y}" width="{_fmt(w)}" height="{LANE_HEIGHT}" '
            f'fill="{colour}" stroke="#333333" stroke-width="0.5">'
            f'<title>task {seg.task} [{_fmt(seg.start)}, {_fmt(seg.end)})</title></rect>'
        )
        label = inst.tasks[seg.task].name if inst is not None else str(seg.task)
        if len(label) * CHAR_WIDTH + 4 <= w:
            out.append(
                f'<text x="{_fmt(x + w / 2)}" y="{_fmt(y + LANE_HEIGHT / 2 + 4)}" '
                f'text-anchor="middle">{escape(label)}</text>'
            )
    axis_y = MARGIN_TOP + len(procs) * (LANE_HEIGHT + LANE_GAP) + 14
    for k in range(11):
        x = MARGIN_LEFT + k * PX_PER_TENTH
        out.append(f'<text class="tick" x="{x}" y="{axis_y}" text-anchor="middle">{_fmt(span * k / 10)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
