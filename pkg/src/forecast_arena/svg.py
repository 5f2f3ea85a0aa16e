"""Minimal hand-rolled SVG renderings of the report analyses.

Deliberately dependency-free and free of timestamps, random ids, and
environment-dependent layout, so a rerun over the same data produces
byte-identical files. These are quick-look charts; the CSV/JSON files
are the source of truth.
"""

from __future__ import annotations

from typing import Sequence

WIDTH, HEIGHT = 640, 420
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 60, 20, 36, 44
PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#7f7f7f")


def _num(x: float) -> str:
    return f"{x:.2f}"


def _label(x: float) -> str:
    return f"{x:.4g}"


class _Canvas:
    def __init__(self, title: str, x_range: tuple[float, float], y_range: tuple[float, float],
                 x_title: str, y_title: str):
        x_lo, x_hi = x_range
        y_lo, y_hi = y_range
        if x_hi <= x_lo:
            x_hi = x_lo + 1.0
        if y_hi <= y_lo:
            y_hi = y_lo + 1.0
        self.x_lo, self.x_hi, self.y_lo, self.y_hi = x_lo, x_hi, y_lo, y_hi
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
            f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
            f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
            f'<text x="{WIDTH / 2:.0f}" y="20" text-anchor="middle" font-size="14">{title}</text>',
        ]
        self._axes(x_title, y_title)

    def x(self, value: float) -> float:
        span = WIDTH - MARGIN_L - MARGIN_R
        return MARGIN_L + span * (value - self.x_lo) / (self.x_hi - self.x_lo)

    def y(self, value: float) -> float:
        span = HEIGHT - MARGIN_T - MARGIN_B
        return HEIGHT - MARGIN_B - span * (value - self.y_lo) / (self.y_hi - self.y_lo)

    def _axes(self, x_title: str, y_title: str) -> None:
        x0, x1 = MARGIN_L, WIDTH - MARGIN_R
        y0, y1 = HEIGHT - MARGIN_B, MARGIN_T
        self.parts.append(f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>')
        self.parts.append(f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>')
        for i in range(5):
            fx = self.x_lo + (self.x_hi - self.x_lo) * i / 4
            fy = self.y_lo + (self.y_hi - self.y_lo) * i / 4
            px, py = self.x(fx), self.y(fy)
            self.parts.append(f'<line x1="{_num(px)}" y1="{y0}" x2="{_num(px)}" y2="{y0 + 4}" stroke="black"/>')
            self.parts.append(f'<text x="{_num(px)}" y="{y0 + 16}" text-anchor="middle">{_label(fx)}</text>')
            self.parts.append(f'<line x1="{x0 - 4}" y1="{_num(py)}" x2="{x0}" y2="{_num(py)}" stroke="black"/>')
            self.parts.append(f'<text x="{x0 - 6}" y="{_num(py + 4)}" text-anchor="end">{_label(fy)}</text>')
        self.parts.append(f'<text x="{(x0 + x1) / 2:.0f}" y="{HEIGHT - 8}" text-anchor="middle">{x_title}</text>')
        self.parts.append(f'<text x="14" y="{(y0 + y1) / 2:.0f}" text-anchor="middle" '
                          f'transform="rotate(-90 14 {(y0 + y1) / 2:.0f})">{y_title}</text>')

    def legend(self, labels: Sequence[str]) -> None:
        for i, label in enumerate(labels):
            color = PALETTE[i % len(PALETTE)]
            ly = MARGIN_T + 14 * i
            self.parts.append(f'<rect x="{WIDTH - MARGIN_R - 130}" y="{ly}" width="10" height="10" fill="{color}"/>')
            self.parts.append(f'<text x="{WIDTH - MARGIN_R - 116}" y="{ly + 9}">{label}</text>')

    def finish(self) -> str:
        return "\n".join(self.parts) + "\n</svg>\n"


def render_cdf(curve, title: str) -> str:
    """Step plot of an empirical CDF."""
    xs = [t for t, _ in curve.points]
    canvas = _Canvas(title, (min(0.0, xs[0]), max(xs[-1], 1e-9)), (0.0, 1.0),
                     "WAPE threshold", "fraction of series")
    coords = [(canvas.x(canvas.x_lo), canvas.y(0.0))]
    prev = 0.0
    for threshold, fraction in curve.points:
        coords.append((canvas.x(threshold), canvas.y(prev)))
        coords.append((canvas.x(threshold), canvas.y(fraction)))
        prev = fraction
    coords.append((canvas.x(canvas.x_hi), canvas.y(1.0)))
    path = " ".join(f"{_num(px)},{_num(py)}" for px, py in coords)
    canvas.parts.append(f'<polyline points="{path}" fill="none" stroke="{PALETTE[0]}" stroke-width="1.5"/>')
    return canvas.finish()


def render_scatter(scatter, title: str) -> str:
    """Metric-vs-rank points per model with their first-order trend lines."""
    models = sorted({model for _, model, _ in scatter.points})
    ranks = [rank for rank, _, _ in scatter.points]
    values = [value for _, _, value in scatter.points]
    canvas = _Canvas(title, (0.0, max(ranks) + 1.0), (0.0, max(values) * 1.05 or 1.0),
                     "importance rank", "WAPE")
    for i, model in enumerate(models):
        color = PALETTE[i % len(PALETTE)]
        for rank, m, value in scatter.points:
            if m == model:
                canvas.parts.append(f'<circle cx="{_num(canvas.x(rank))}" cy="{_num(canvas.y(value))}" '
                                    f'r="2.5" fill="{color}" fill-opacity="0.6"/>')
        slope, intercept = scatter.trends[model]
        y_at = lambda r: min(max(slope * r + intercept, canvas.y_lo), canvas.y_hi)
        canvas.parts.append(f'<line x1="{_num(canvas.x(canvas.x_lo))}" y1="{_num(canvas.y(y_at(canvas.x_lo)))}" '
                            f'x2="{_num(canvas.x(canvas.x_hi))}" y2="{_num(canvas.y(y_at(canvas.x_hi)))}" '
                            f'stroke="{color}" stroke-width="1.5"/>')
    canvas.legend(models)
    return canvas.finish()


def render_stacked_shares(shares, title: str) -> str:
    """Stacked bars: winner share per model for each importance prefix."""
    models = sorted({model for s in shares for model in s.shares})
    canvas = _Canvas(title, (0.0, float(len(shares))), (0.0, 1.0),
                     "importance prefix (top-k)", "share of wins")
    bar_width = (WIDTH - MARGIN_L - MARGIN_R) / max(len(shares), 1) * 0.6
    for b, share in enumerate(shares):
        x_center = canvas.x(b + 0.5)
        base = 0.0
        for i, model in enumerate(models):
            fraction = share.shares.get(model, 0.0)
            if fraction <= 0:
                continue
            top, bottom = canvas.y(base + fraction), canvas.y(base)
            canvas.parts.append(f'<rect x="{_num(x_center - bar_width / 2)}" y="{_num(top)}" '
                                f'width="{_num(bar_width)}" height="{_num(bottom - top)}" '
                                f'fill="{PALETTE[i % len(PALETTE)]}"/>')
            base += fraction
        canvas.parts.append(f'<text x="{_num(x_center)}" y="{HEIGHT - MARGIN_B + 16}" '
                            f'text-anchor="middle">k={share.top_k}</text>')
    canvas.legend(models)
    return canvas.finish()


def render_window_bars(rows, title: str) -> str:
    """Paired bars per model: aggregate WAPE in window A vs window B."""
    values = [v for _, a, b, _ in rows for v in (a, b) if v is not None]
    top = max(values) * 1.1 if values else 1.0
    canvas = _Canvas(title, (0.0, float(len(rows))), (0.0, top), "model", "pooled WAPE")
    slot = (WIDTH - MARGIN_L - MARGIN_R) / max(len(rows), 1)
    for i, (model, a, b, _) in enumerate(rows):
        x_center = canvas.x(i + 0.5)
        for j, value in enumerate((a, b)):
            if value is None:
                continue
            x_left = x_center - slot * 0.25 + j * slot * 0.25
            canvas.parts.append(f'<rect x="{_num(x_left)}" y="{_num(canvas.y(value))}" '
                                f'width="{_num(slot * 0.22)}" '
                                f'height="{_num(canvas.y(0.0) - canvas.y(value))}" '
                                f'fill="{PALETTE[j]}"/>')
        canvas.parts.append(f'<text x="{_num(x_center)}" y="{HEIGHT - MARGIN_B + 16}" '
                            f'text-anchor="middle">{model}</text>')
    canvas.legend(["window a", "window b"])
    return canvas.finish()


__all__ = ["render_cdf", "render_scatter", "render_stacked_shares", "render_window_bars"]
