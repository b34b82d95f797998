"""Report rendering: CSV text, aligned tables, and standalone SVG diagrams.

Everything here is a pure string producer with fixed number formatting and
no clocks, so rerunning a stage rewrites byte-identical files.
"""

from __future__ import annotations

import io
import csv as _csv
from typing import Sequence

GROUP_COLORS = {"high": "#ff7f0e", "mid": "#1f77b4", "low": "#d62728"}


def fmt(value, digits: int = 2) -> str:
    """Fixed-point rendering used across all tables."""
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, int):
        return str(value)
    return f"{value:.{digits}f}"


def csv_text(headers: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    writer = _csv.writer(buf, lineterminator="\n")
    writer.writerow(headers)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def text_table(headers: Sequence[str], rows: Sequence[Sequence]) -> str:
    """Monospace table with a dashed rule, numbers right-aligned."""
    rendered = [[fmt(v) for v in row] for row in rows]
    widths = [len(h) for h in headers]
    for row in rendered:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    numeric = [
        all(not isinstance(row[i], str) for row in rows) if rows else False
        for i in range(len(headers))
    ]

    def line(cells, pads):
        parts = []
        for cell, width, right in zip(cells, pads, numeric):
            parts.append(cell.rjust(width) if right else cell.ljust(width))
        return "  ".join(parts).rstrip()

    out = [line(list(headers), widths), "  ".join("-" * w for w in widths)]
    for row in rendered:
        out.append(line(row, widths))
    return "\n".join(out) + "\n"


def _svg_header(width: int, height: int, title: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="Helvetica, Arial, sans-serif">',
        f'<title>{title}</title>',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]


def cd_diagram_svg(data: dict, subtitle: str = "") -> str:
    """Critical distance diagram: rank axis, CD ruler, tied-group bars.

    ``data`` comes from statcompare.cd_diagram_data; best ranks sit on the
    left.  Output is a standalone SVG document.
    """
    entries = data["entries"]
    m = len(entries)
    lo, hi = data["axis"]["low"], data["axis"]["high"]
    width = 640
    pad = 70
    axis_y = 78
    span = max(hi - lo, 1e-9)

    def x_at(rank: float) -> float:
        return pad + (rank - lo) / span * (width - 2 * pad)

    n_left = (m + 1) // 2
    label_step = 22
    height = axis_y + 40 + max(n_left, m - n_left) * label_step + 16
    parts = _svg_header(width, height, "Critical distance diagram")
    if subtitle:
        parts.append(
            f'<text x="{width / 2:.1f}" y="18" font-size="12" text-anchor="middle" '
            f'fill="#444">{subtitle}</text>'
        )

    # CD ruler above the axis
    cd = data["cd"]
    ruler_y = 40
    x0, x1 = x_at(lo), x_at(min(lo + cd, hi))
    parts.append(
        f'<line x1="{x0:.1f}" y1="{ruler_y}" x2="{x1:.1f}" y2="{ruler_y}" '
        f'stroke="black" stroke-width="1.5"/>'
    )
    for xv in (x0, x1):
        parts.append(
            f'<line x1="{xv:.1f}" y1="{ruler_y - 4}" x2="{xv:.1f}" y2="{ruler_y + 4}" '
            f'stroke="black" stroke-width="1.5"/>'
        )
    parts.append(
        f'<text x="{(x0 + x1) / 2:.1f}" y="{ruler_y - 8}" font-size="11" '
        f'text-anchor="middle">CD = {cd:.3f}</text>'
    )

    # rank axis with integer ticks
    parts.append(
        f'<line x1="{x_at(lo):.1f}" y1="{axis_y}" x2="{x_at(hi):.1f}" y2="{axis_y}" '
        f'stroke="black" stroke-width="1.5"/>'
    )
    tick = int(lo)
    while tick <= hi:
        xv = x_at(tick)
        parts.append(
            f'<line x1="{xv:.1f}" y1="{axis_y - 5}" x2="{xv:.1f}" y2="{axis_y}" '
            f'stroke="black" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{xv:.1f}" y="{axis_y - 9}" font-size="11" text-anchor="middle">{tick}</text>'
        )
        tick += 1

    # tied-group bars just under the axis
    for gi, (first, last) in enumerate(data["groups"]):
        gx0 = x_at(entries[first]["rank"]) - 4
        gx1 = x_at(entries[last]["rank"]) + 4
        gy = axis_y + 7 + gi * 6
        parts.append(
            f'<line x1="{gx0:.1f}" y1="{gy}" x2="{gx1:.1f}" y2="{gy}" '
            f'stroke="black" stroke-width="3.5"/>'
        )

    # labels: best half on the left, the rest on the right (worst topmost)
    group_rows = len(data["groups"])
    label_y0 = axis_y + 16 + group_rows * 6
    for i, entry in enumerate(entries):
        ex = x_at(entry["rank"])
        if i < n_left:
            ly = label_y0 + i * label_step
            tx = pad - 58
            parts.append(
                f'<path d="M {ex:.1f} {axis_y} V {ly} H {tx + 54}" fill="none" '
                f'stroke="black" stroke-width="1"/>'
            )
            parts.append(
                f'<text x="{tx + 50}" y="{ly - 3}" font-size="11" text-anchor="end">'
                f'{entry["name"]} ({entry["rank"]:.2f})</text>'
            )
        else:
            ly = label_y0 + (m - 1 - i) * label_step
            tx = width - pad + 58
            parts.append(
                f'<path d="M {ex:.1f} {axis_y} V {ly} H {tx - 54}" fill="none" '
                f'stroke="black" stroke-width="1"/>'
            )
            parts.append(
                f'<text x="{tx - 50}" y="{ly - 3}" font-size="11" text-anchor="start">'
                f'{entry["name"]} ({entry["rank"]:.2f})</text>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def importance_svg(rows: Sequence[tuple[str, float, float, str]], subtitle: str = "") -> str:
    """Horizontal importance bars, one per feature, colored by band.

    ``rows`` are (name, raw drop, percent, group) sorted as they should be
    drawn (normally descending percent); orange/blue/red map to
    high/mid/low.
    """
    width = 640
    left = 200
    right = 60
    row_h = 18
    top = 34 if subtitle else 22
    height = top + row_h * len(rows) + 14
    max_pct = max((r[2] for r in rows), default=0.0)
    scale = (width - left - right) / max_pct if max_pct > 0 else 0.0
    parts = _svg_header(width, height, "Permutation feature importance")
    if subtitle:
        parts.append(
            f'<text x="{width / 2:.1f}" y="16" font-size="12" text-anchor="middle" '
            f'fill="#444">{subtitle}</text>'
        )
    for i, (name, _drop, pct, group) in enumerate(rows):
        y = top + i * row_h
        bar = pct * scale
        color = GROUP_COLORS.get(group, "#777777")
        parts.append(
            f'<text x="{left - 8}" y="{y + 12}" font-size="10" text-anchor="end">{name}</text>'
        )
        parts.append(
            f'<rect x="{left}" y="{y + 3}" width="{bar:.2f}" height="{row_h - 6}" '
            f'fill="{color}"/>'
        )
        parts.append(
            f'<text x="{left + bar + 4:.2f}" y="{y + 12}" font-size="10" '
            f'text-anchor="start">{pct:.2f}%</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
