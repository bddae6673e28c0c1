"""Standalone SVG 1.1 renderers for the report figures: trajectory map,
chosen-vs-alternate reward heatmap, factual/counterfactual bars and the
action distribution. No graphics dependencies; output is deterministic."""

from __future__ import annotations

import math

import numpy as np

from .env import ACTION_NAMES, N_ACTIONS
from .evaluate import EpisodeLog
from .explain import BarData, HeatmapMatrix


def _f(v: float) -> str:
    return f"{v:.2f}"


class SvgBuilder:
    """Accumulates vector primitives and serializes a standalone SVG."""

    def __init__(self, width: float, height: float):
        self.width = width
        self.height = height
        self.parts: list[str] = []
        self.defs: list[str] = []

    def rect(self, x, y, w, h, fill, stroke="none", stroke_width=1.0, extra=""):
        self.parts.append(
            f'<rect x="{_f(x)}" y="{_f(y)}" width="{_f(w)}" height="{_f(h)}" '
            f'fill="{fill}" stroke="{stroke}" stroke-width="{_f(stroke_width)}"{extra}/>')

    def line(self, x1, y1, x2, y2, stroke="#000", stroke_width=1.0):
        self.parts.append(
            f'<line x1="{_f(x1)}" y1="{_f(y1)}" x2="{_f(x2)}" y2="{_f(y2)}" '
            f'stroke="{stroke}" stroke-width="{_f(stroke_width)}"/>')

    def polyline(self, points: list[tuple[float, float]], stroke="#000",
                 stroke_width=1.0, opacity=1.0):
        pts = " ".join(f"{_f(x)},{_f(y)}" for x, y in points)
        self.parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{stroke}" '
            f'stroke-width="{_f(stroke_width)}" stroke-opacity="{_f(opacity)}"/>')

    def circle(self, cx, cy, r, fill, stroke="none"):
        self.parts.append(
            f'<circle cx="{_f(cx)}" cy="{_f(cy)}" r="{_f(r)}" fill="{fill}" '
            f'stroke="{stroke}"/>')

    def text(self, x, y, content, size=12, anchor="start", fill="#000", rotate=None):
        transform = f' transform="rotate({rotate} {_f(x)} {_f(y)})"' if rotate else ""
        self.parts.append(
            f'<text x="{_f(x)}" y="{_f(y)}" font-size="{size}" '
            f'font-family="sans-serif" text-anchor="{anchor}" '
            f'fill="{fill}"{transform}>{content}</text>')

    def to_string(self) -> str:
        defs = f"<defs>{''.join(self.defs)}</defs>" if self.defs else ""
        body = "\n".join(self.parts)
        return (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
            f'width="{_f(self.width)}" height="{_f(self.height)}" '
            f'viewBox="0 0 {_f(self.width)} {_f(self.height)}">\n'
            f'{defs}\n{body}\n</svg>\n')

    def write(self, path: str) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_string())


def _heat_color(t: float) -> str:
    """Linear light-to-dark blue ramp; t in [0, 1], 1 = darkest = highest."""
    lo = (247, 251, 255)
    hi = (8, 48, 107)
    r, g, b = (round(l + (h - l) * t) for l, h in zip(lo, hi))
    return f"#{r:02x}{g:02x}{b:02x}"


def render_heatmap_svg(matrix: HeatmapMatrix, path: str) -> None:
    """6x6 grid, darker cells = higher mean reward, absent rows hatched."""
    cell = 70.0
    margin_left, margin_top = 110.0, 60.0
    legend_w = 90.0
    width = margin_left + N_ACTIONS * cell + legend_w + 40.0
    height = margin_top + N_ACTIONS * cell + 60.0
    svg = SvgBuilder(width, height)

    svg.defs.append(
        '<pattern id="hatch" width="8" height="8" patternUnits="userSpaceOnUse" '
        'patternTransform="rotate(45)">'
        '<rect width="8" height="8" fill="#eeeeee"/>'
        '<line x1="0" y1="0" x2="0" y2="8" stroke="#999999" stroke-width="2"/>'
        '</pattern>')

    present = matrix.counts > 0
    finite = matrix.values[present]
    vmin = float(np.nanmin(finite)) if present.any() else 0.0
    vmax = float(np.nanmax(finite)) if present.any() else 1.0
    span = vmax - vmin if vmax > vmin else 1.0

    svg.text(width / 2, 24, "Mean one-step reward: chosen vs alternate action",
             size=15, anchor="middle")
    for j in range(N_ACTIONS):
        svg.text(margin_left + (j + 0.5) * cell, margin_top - 8,
                 ACTION_NAMES[j], size=11, anchor="middle")
    for i in range(N_ACTIONS):
        y = margin_top + i * cell
        svg.text(margin_left - 8, y + cell / 2 + 4, ACTION_NAMES[i],
                 size=11, anchor="end")
        for j in range(N_ACTIONS):
            x = margin_left + j * cell
            if not present[i]:
                svg.rect(x, y, cell, cell, "url(#hatch)", stroke="#ffffff")
                continue
            v = float(matrix.values[i, j])
            t = (v - vmin) / span
            svg.rect(x, y, cell, cell, _heat_color(t), stroke="#ffffff")
            label_fill = "#ffffff" if t > 0.55 else "#1a1a1a"
            svg.text(x + cell / 2, y + cell / 2 + 4, f"{v:.2f}",
                     size=10, anchor="middle", fill=label_fill)

    # color scale legend
    lx = margin_left + N_ACTIONS * cell + 30.0
    lh = N_ACTIONS * cell
    steps = 40
    for k in range(steps):
        t = 1.0 - k / (steps - 1)
        svg.rect(lx, margin_top + k * lh / steps, 18, lh / steps + 0.5,
                 _heat_color(t))
    svg.text(lx + 24, margin_top + 10, f"{vmax:.1f}", size=10)
    svg.text(lx + 24, margin_top + lh, f"{vmin:.1f}", size=10)
    svg.text(width / 2, height - 16, "alternate action", size=12, anchor="middle")
    svg.text(24, margin_top + lh / 2, "chosen action", size=12,
             anchor="middle", rotate=-90)
    svg.write(path)


def render_trajectories_svg(logs: list[EpisodeLog], path: str,
                            world_width: float = 800.0,
                            world_height: float = 800.0) -> None:
    """Agent path per episode (blue) with target markers (red), to scale."""
    if not logs:
        raise ValueError("no episode logs to render")
    episodes = [{"episode": lg.episode,
                 "points": [(s.x, s.y) for s in lg.steps]} for lg in logs]
    targets = {lg.episode: (lg.target_pos.x, lg.target_pos.y) for lg in logs}
    render_trajectory_paths_svg(episodes, targets, path, world_width, world_height)


def render_trajectory_paths_svg(episodes: list[dict],
                                targets: dict[int, tuple[float, float]],
                                path: str,
                                world_width: float = 800.0,
                                world_height: float = 800.0) -> None:
    margin = 50.0
    scale = 600.0 / max(world_width, world_height)
    plot_w, plot_h = world_width * scale, world_height * scale
    width = plot_w + 2 * margin + 150.0
    height = plot_h + 2 * margin
    svg = SvgBuilder(width, height)

    def to_px(x: float, y: float) -> tuple[float, float]:
        # world is y-up, SVG y-down
        return margin + x * scale, margin + (world_height - y) * scale

    svg.rect(margin, margin, plot_w, plot_h, "none", stroke="#333333")
    for ep in episodes:
        pts = [to_px(x, y) for x, y in ep["points"]]
        if len(pts) == 1:
            pts = pts * 2
        svg.polyline(pts, stroke="#1f77b4", stroke_width=1.2, opacity=0.6)
    for _, (tx, ty) in sorted(targets.items()):
        px, py = to_px(tx, ty)
        svg.circle(px, py, 5.0, "#d62728")

    lx = margin + plot_w + 20.0
    svg.line(lx, margin + 12, lx + 26, margin + 12, stroke="#1f77b4", stroke_width=2)
    svg.text(lx + 32, margin + 16, "agent path", size=12)
    svg.circle(lx + 13, margin + 38, 5.0, "#d62728")
    svg.text(lx + 32, margin + 42, "target", size=12)
    svg.write(path)


_FACTUAL_COLOR = "#1f77b4"
_CF_COLOR = "#ff7f0e"


def _bar_chart(path: str, title: str, series: list[tuple[str, np.ndarray]],
               y_label: str) -> None:
    """Grouped bar chart; values may be negative (bars hang below zero)."""
    margin_left, margin_top, margin_bottom = 80.0, 50.0, 60.0
    plot_w, plot_h = 520.0, 320.0
    width = plot_w + margin_left + 160.0
    height = plot_h + margin_top + margin_bottom
    svg = SvgBuilder(width, height)

    all_vals = np.concatenate([np.nan_to_num(v, nan=0.0) for _, v in series])
    vmax = max(float(all_vals.max()), 0.0)
    vmin = min(float(all_vals.min()), 0.0)
    if vmax == vmin:
        vmax = vmin + 1.0
    span = vmax - vmin

    def y_px(v: float) -> float:
        return margin_top + (vmax - v) / span * plot_h

    svg.text(margin_left + plot_w / 2, 26, title, size=15, anchor="middle")
    svg.line(margin_left, margin_top, margin_left, margin_top + plot_h, stroke="#333")
    zero_y = y_px(0.0)
    svg.line(margin_left, zero_y, margin_left + plot_w, zero_y, stroke="#333")
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        v = vmin + frac * span
        svg.text(margin_left - 8, y_px(v) + 4, f"{v:.1f}", size=10, anchor="end")
        svg.line(margin_left - 4, y_px(v), margin_left, y_px(v), stroke="#333")

    group_w = plot_w / N_ACTIONS
    n_series = len(series)
    bar_w = group_w * 0.7 / n_series
    colors = [_FACTUAL_COLOR, _CF_COLOR]
    for i in range(N_ACTIONS):
        gx = margin_left + i * group_w
        for k, (_, values) in enumerate(series):
            v = float(values[i])
            if math.isnan(v):
                continue
            x = gx + group_w * 0.15 + k * bar_w
            top = y_px(max(v, 0.0))
            h = abs(v) / span * plot_h
            svg.rect(x, top, bar_w, h, colors[k % len(colors)],
                     extra=f' data-value="{v!r}"')
        svg.text(gx + group_w / 2, margin_top + plot_h + 18, ACTION_NAMES[i],
                 size=11, anchor="middle")

    svg.text(24, margin_top + plot_h / 2, y_label, size=12, anchor="middle", rotate=-90)
    lx = margin_left + plot_w + 24.0
    for k, (name, _) in enumerate(series):
        ly = margin_top + 12 + k * 22
        svg.rect(lx, ly - 10, 14, 14, colors[k % len(colors)])
        svg.text(lx + 20, ly + 2, name, size=12)
    svg.write(path)


def render_bars_svg(bars: BarData, path: str) -> None:
    """Factual vs mean counterfactual reward, grouped per action."""
    _bar_chart(path, "Factual vs mean counterfactual reward",
               [("factual", bars.mean_factual),
                ("counterfactual", bars.mean_cf_other)],
               "mean reward")


def render_distribution_svg(counts: list[int], path: str) -> None:
    """How often each action was chosen."""
    _bar_chart(path, "Chosen action distribution",
               [("count", np.asarray(counts, dtype=float))],
               "decisions")
