from __future__ import annotations

from dataclasses import dataclass
from html import escape
from pathlib import Path
from typing import List, Literal, Optional, Sequence, Tuple


LineStyle = Literal["solid", "dashed", "dotted"]

DASH_PATTERNS = {"solid": "", "dashed": "8,6", "dotted": "2,4"}
PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"]


@dataclass
class LineSeries:
    name: str
    xs: Sequence[float]
    ys: Sequence[float]
    style: LineStyle = "solid"
    color: Optional[str] = None
    # Start a new polyline wherever |dy| between neighbours exceeds this
    break_threshold: Optional[float] = None


def split_at_jumps(
    xs: Sequence[float],
    ys: Sequence[float],
    threshold: Optional[float],
) -> List[List[Tuple[float, float]]]:
    segments: List[List[Tuple[float, float]]] = []
    current: List[Tuple[float, float]] = []
    for x, y in zip(xs, ys):
        if current and threshold is not None and abs(y - current[-1][1]) > threshold:
            segments.append(current)
            current = []
        current.append((float(x), float(y)))
    if current:
        segments.append(current)
    return segments


def _nice_range(values: Sequence[float]) -> Tuple[float, float]:
    low, high = min(values), max(values)
    if high == low:
        return low - 0.5, high + 0.5
    pad = 0.05 * (high - low)
    return low - pad, high + pad


def _ticks(low: float, high: float, count: int = 5) -> List[float]:
    return [low + i * (high - low) / count for i in range(count + 1)]


def render_line_chart_svg(
    title: str,
    x_label: str,
    y_label: str,
    series: Sequence[LineSeries],
    width: int = 800,
    height: int = 600,
    y_range: Optional[Tuple[float, float]] = None,
) -> str:
    if not series or any(len(s.xs) != len(s.ys) or not s.xs for s in series):
        raise ValueError("invalid chart data")

    margin_left, margin_right, margin_top, margin_bottom = 80, 30, 60, 70
    left, right = margin_left, width - margin_right
    top, bottom = margin_top, height - margin_bottom

    all_x = [float(x) for s in series for x in s.xs]
    all_y = [float(y) for s in series for y in s.ys]
    x_low, x_high = min(all_x), max(all_x)
    if x_high == x_low:
        x_high = x_low + 1.0
    y_low, y_high = y_range or _nice_range(all_y)

    def sx(x: float) -> float:
        return left + (x - x_low) / (x_high - x_low) * (right - left)

    def sy(y: float) -> float:
        return bottom - (y - y_low) / (y_high - y_low) * (bottom - top)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'  <rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
        f'  <text x="{width / 2:.1f}" y="32" text-anchor="middle" font-size="18" font-family="sans-serif">{escape(title)}</text>',
        f'  <line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}" stroke="#333333" stroke-width="1"/>',
        f'  <line x1="{left}" y1="{top}" x2="{left}" y2="{bottom}" stroke="#333333" stroke-width="1"/>',
    ]
    for tx in _ticks(x_low, x_high):
        parts.append(
            f'  <text x="{sx(tx):.2f}" y="{bottom + 20}" text-anchor="middle" font-size="12" '
            f'font-family="sans-serif">{tx:.2f}</text>'
        )
    for ty in _ticks(y_low, y_high):
        parts.append(
            f'  <text x="{left - 8}" y="{sy(ty) + 4:.2f}" text-anchor="end" font-size="12" '
            f'font-family="sans-serif">{ty:.3f}</text>'
        )
    parts.append(
        f'  <text x="{(left + right) / 2:.1f}" y="{height - 20}" text-anchor="middle" font-size="14" '
        f'font-family="sans-serif">{escape(x_label)}</text>'
    )
    parts.append(
        f'  <text x="20" y="{(top + bottom) / 2:.1f}" text-anchor="middle" font-size="14" font-family="sans-serif" '
        f'transform="rotate(-90 20 {(top + bottom) / 2:.1f})">{escape(y_label)}</text>'
    )

    for idx, s in enumerate(series):
        color = s.color or PALETTE[idx % len(PALETTE)]
        dash = DASH_PATTERNS[s.style]
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        for seg_idx, segment in enumerate(split_at_jumps(s.xs, s.ys, s.break_threshold)):
            points = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in segment)
            parts.append(
                f'  <polyline data-series="{escape(s.name)}" data-segment="{seg_idx}" points="{points}" '
                f'fill="none" stroke="{color}" stroke-width="2"{dash_attr}/>'
            )
        legend_y = top + 18 * (idx + 1)
        parts.append(
            f'  <line x1="{right - 170}" y1="{legend_y}" x2="{right - 140}" y2="{legend_y}" '
            f'stroke="{color}" stroke-width="2"{dash_attr}/>'
        )
        parts.append(
            f'  <text x="{right - 132}" y="{legend_y + 4}" font-size="12" font-family="sans-serif">{escape(s.name)}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_line_chart_svg(path: Path, title: str, x_label: str, y_label: str, series: Sequence[LineSeries], **kwargs) -> None:
    path.write_text(render_line_chart_svg(title, x_label, y_label, series, **kwargs), encoding="utf-8", newline="\n")
