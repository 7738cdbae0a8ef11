"""Deterministic string-diagram rendering of morphisms.

Layout is computed from the canonical form, never from the input order, so
equal morphisms render identically byte for byte.  Columns are Foata
layers; every strand gets its own horizontal lane assigned during a replay
of the canonical events, so resource wires are straight solid lines and
never cross.  Device wires are dashed, live on a layer beneath the boxes,
thread through every box that carries them, and are x-monotone, which
realizes the rule that a device string appears at most once in every
vertical slice.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .graphs import Word
from .freecat import (
    PremonoidalMorphism,
    canonical_form,
    canonical_morphism,
    dependence_relation,
    threading,
)

__all__ = [
    "BoxPlacement",
    "StrandSegment",
    "Layout",
    "layout",
    "check_layout",
    "render_svg",
    "render_text",
]


@dataclass(frozen=True)
class BoxPlacement:
    label: str
    column: int
    lane_lo: int
    lane_hi: int
    devices: tuple[str, ...]


@dataclass(frozen=True)
class StrandSegment:
    obj: str
    lane: int
    col_from: int  # 0 = source boundary, otherwise producing layer
    col_to: int  # consuming layer, or columns+1 for the target boundary
    from_source: bool
    to_target: bool


@dataclass(frozen=True)
class Layout:
    columns: int
    lanes: int
    boxes: tuple[BoxPlacement, ...]
    strands: tuple[StrandSegment, ...]
    devices: tuple[str, ...]
    device_boxes: Mapping[str, tuple[int, ...]]
    source: Word
    target: Word

    def __post_init__(self):
        object.__setattr__(self, "device_boxes", dict(self.device_boxes))


def layout(f: PremonoidalMorphism) -> Layout:
    """Geometry plan for a morphism, derived from its canonical form."""
    cm = canonical_morphism(f)
    cf = canonical_form(f)
    thr = threading(cm)
    n = len(cm.events)
    columns = max(cf.heights) if n else 0

    slots: list[object] = list(thr.boundaries[0])

    def insert_after(anchor: object, items: list[object]) -> None:
        at = slots.index(anchor) + 1
        slots[at:at] = items

    def insert_at_gap(position: int, boundary: tuple[int, ...], items: list[object]) -> None:
        if position > 0:
            insert_after(boundary[position - 1], items)
        elif boundary:
            # left of everything alive: take fresh top lanes so the new
            # slots cannot land inside an earlier box's lane span
            slots[0:0] = items
        else:
            slots.extend(items)

    for i in range(n):
        cons = thr.consumed[i]
        prod = list(thr.produced[i])
        boundary = thr.boundaries[i]
        if cons:
            if prod:
                insert_after(cons[-1], prod)
        elif prod:
            insert_at_gap(thr.spans[i], boundary, prod)
        else:
            insert_at_gap(thr.spans[i], boundary, [("box", i)])

    lane = {slot: k for k, slot in enumerate(slots)}

    spans = []
    for i in range(n):
        ids = list(thr.consumed[i]) + list(thr.produced[i])
        if ids:
            spans.append((min(lane[s] for s in ids), max(lane[s] for s in ids)))
        else:
            spans.append((lane[("box", i)], lane[("box", i)]))

    # a box goes one column right of every earlier box it depends on, and
    # of every earlier box whose lane range meets its own, so wires stay
    # x-monotone and boxes in a column never overlap vertically
    deps = dependence_relation(cm).edges
    col: list[int] = []
    for i in range(n):
        c = 1
        for j in range(i):
            ordered = (j, i) in deps or not (
                spans[i][1] < spans[j][0] or spans[j][1] < spans[i][0]
            )
            if ordered:
                c = max(c, col[j] + 1)
        col.append(c)
    columns = max(col) if n else 0

    boxes = [
        BoxPlacement(
            cm.events[i].gen,
            col[i],
            spans[i][0],
            spans[i][1],
            tuple(sorted(cm.graph.devices_of(cm.events[i].gen))),
        )
        for i in range(n)
    ]
    box_order = sorted(range(n), key=lambda i: (boxes[i].column, boxes[i].lane_lo, boxes[i].label))
    boxes_sorted = tuple(boxes[i] for i in box_order)

    strands = []
    for sid in range(len(thr.labels)):
        p = thr.producer(sid)
        k = thr.consumer(sid)
        strands.append(
            StrandSegment(
                thr.labels[sid],
                lane[sid],
                0 if p == -1 else col[p],
                columns + 1 if k is None else col[k],
                p == -1,
                k is None,
            )
        )
    strands_sorted = tuple(sorted(strands, key=lambda s: s.lane))

    devices = sorted({d for b in boxes_sorted for d in b.devices})
    device_boxes = {
        d: tuple(i for i, b in enumerate(boxes_sorted) if d in b.devices) for d in devices
    }
    return Layout(
        columns,
        len(slots),
        boxes_sorted,
        strands_sorted,
        tuple(devices),
        device_boxes,
        cm.source,
        cm.target,
    )


def check_layout(l: Layout) -> list[str]:
    """Machine checks: device wires are x-monotone and thread through all
    their carriers; lanes are unique; same-column boxes do not overlap."""
    out = []
    for d, idxs in sorted(l.device_boxes.items()):
        cols = [l.boxes[i].column for i in idxs]
        if any(a >= b for a, b in zip(cols, cols[1:])):
            out.append(f"device {d!r} appears twice in one vertical slice")
        carriers = {i for i, b in enumerate(l.boxes) if d in b.devices}
        if carriers != set(idxs):
            out.append(f"device {d!r} does not thread through all its boxes")
    lanes = [s.lane for s in l.strands]
    if len(lanes) != len(set(lanes)):
        out.append("two strands share a lane")
    by_col: dict[int, list[BoxPlacement]] = {}
    for b in l.boxes:
        by_col.setdefault(b.column, []).append(b)
    for col, bs in sorted(by_col.items()):
        bs = sorted(bs, key=lambda b: b.lane_lo)
        for a, b in zip(bs, bs[1:]):
            if a.lane_hi >= b.lane_lo:
                out.append(f"boxes overlap in column {col}")
    for s in l.strands:
        if not s.from_source and s.col_from < 1:
            out.append("strand produced before the first layer")
        if s.col_from > (s.col_to if not s.to_target else l.columns + 1):
            out.append("strand consumed before it is produced")
    return out


_DASHES = ("6,3", "2,2", "9,3", "4,2,1,2", "12,4", "1,3")

_CW = 110.0  # column width
_LH = 26.0  # lane height
_PAD = 14.0  # box inset from its column's stations
_ML = 46.0  # left margin (strand labels)
_MR = 46.0
_MT = 20.0


def _geometry(l: Layout):
    def station_x(t: int) -> float:
        return _ML + t * _CW

    def lane_y(lane: float) -> float:
        return _MT + (lane + 0.5) * _LH

    dev_y0 = _MT + (l.lanes + 1) * _LH
    width = _ML + max(l.columns, 1) * _CW + _MR
    height = dev_y0 + (len(l.devices) + 1) * _LH
    return station_x, lane_y, dev_y0, width, height


def _box_rect(b: BoxPlacement, station_x, lane_y):
    x0 = station_x(b.column - 1) + _PAD
    x1 = station_x(b.column) - _PAD
    y0 = lane_y(b.lane_lo) - 0.42 * _LH
    y1 = lane_y(b.lane_hi) + 0.42 * _LH
    return x0, y0, x1, y1


def render_svg(l: Layout) -> bytes:
    """Byte-stable SVG: fixed element order, two-decimal coordinates."""
    station_x, lane_y, dev_y0, width, height = _geometry(l)
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>\n',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.2f}" '
        f'height="{height:.2f}" viewBox="0 0 {width:.2f} {height:.2f}">\n',
        f'<rect x="0" y="0" width="{width:.2f}" height="{height:.2f}" fill="white"/>\n',
    ]

    # device wires first: they sit on a layer beneath boxes and wires
    for di, d in enumerate(l.devices):
        dash = _DASHES[di % len(_DASHES)]
        y_base = dev_y0 + (di + 0.5) * _LH
        points = [(0.0, y_base)]
        for bi in l.device_boxes[d]:
            b = l.boxes[bi]
            x0, y0, x1, y1 = _box_rect(b, station_x, lane_y)
            k = b.devices.index(d)
            y_pass = y0 + (k + 1) * (y1 - y0) / (len(b.devices) + 1)
            points.append((x0, y_pass))
            points.append((x1, y_pass))
        points.append((width, y_base))
        pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in points)
        parts.append(
            f'<polyline fill="none" stroke="#555555" stroke-dasharray="{dash}" points="{pts}"/>\n'
        )
        parts.append(
            f'<text x="4.00" y="{y_base - 4.0:.2f}" font-family="monospace" font-size="11">{_esc(d)}</text>\n'
        )

    for s in l.strands:
        y = lane_y(s.lane)
        if s.from_source:
            x0 = 0.0
        else:
            x0 = station_x(s.col_from) - _PAD
        x1 = width if s.to_target else station_x(s.col_to - 1) + _PAD
        parts.append(
            f'<line x1="{x0:.2f}" y1="{y:.2f}" x2="{x1:.2f}" y2="{y:.2f}" stroke="black" stroke-width="1.4"/>\n'
        )
        if s.from_source:
            parts.append(
                f'<text x="4.00" y="{y - 4.0:.2f}" font-family="monospace" font-size="11">{_esc(s.obj)}</text>\n'
            )

    for b in l.boxes:
        x0, y0, x1, y1 = _box_rect(b, station_x, lane_y)
        parts.append(
            f'<rect x="{x0:.2f}" y="{y0:.2f}" width="{x1 - x0:.2f}" height="{y1 - y0:.2f}" '
            f'fill="#f5f5f5" stroke="black" stroke-width="1.2"/>\n'
        )
        cx = (x0 + x1) / 2
        cy = (y0 + y1) / 2 + 4.0
        parts.append(
            f'<text x="{cx:.2f}" y="{cy:.2f}" text-anchor="middle" font-family="monospace" '
            f'font-size="12">{_esc(b.label)}</text>\n'
        )

    parts.append("</svg>\n")
    return "".join(parts).encode("utf-8")


def _esc(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def render_text(l: Layout) -> str:
    """Monospaced grid: one row per lane, one column block per layer,
    device rows at the bottom (``~`` dashed, ``o`` where they enter a box)."""
    ncols = max(l.columns, 1)
    labels = [b.label for b in l.boxes] + ["id"]
    w = max(max(len(x) for x in labels) + 4, 8)

    def alive_at(s: StrandSegment, station: int) -> bool:
        last = l.columns if s.to_target else s.col_to - 1
        return s.col_from <= station <= last

    by_lane = {s.lane: s for s in l.strands}
    box_at: dict[tuple[int, int], tuple[BoxPlacement, bool]] = {}
    for b in l.boxes:
        for lane in range(b.lane_lo, b.lane_hi + 1):
            box_at[(lane, b.column)] = (b, lane == b.lane_lo)

    rows = []
    for lane in range(l.lanes):
        s = by_lane.get(lane)
        prefix = (s.obj if s and s.from_source else "").ljust(6)
        cells = []
        for col in range(1, ncols + 1):
            hit = box_at.get((lane, col))
            if hit is not None:
                b, is_top = hit
                inner = b.label.center(w - 2) if is_top else " " * (w - 2)
                cells.append("[" + inner + "]")
            elif s is not None and alive_at(s, col - 1) and alive_at(s, col):
                cells.append("-" * w)
            elif s is not None and alive_at(s, col - 1):
                cells.append(("-" * (w // 3)).ljust(w))
            elif s is not None and alive_at(s, col):
                cells.append(("-" * (w // 3)).rjust(w))
            else:
                cells.append(" " * w)
        rows.append(prefix + "".join(cells).rstrip())

    if l.devices:
        rows.append("")
    for d in l.devices:
        idxs = l.device_boxes[d]
        cols = [l.boxes[i].column for i in idxs]
        first, last = (min(cols), max(cols)) if cols else (1, 0)
        cells = []
        for col in range(1, ncols + 1):
            if col in cols:
                cells.append(("o".center(w, "~")))
            elif first <= col <= last:
                cells.append("~" * w)
            else:
                cells.append(" " * w)
        rows.append(d.ljust(6) + "".join(cells).rstrip())
    return "\n".join(rows) + "\n"
