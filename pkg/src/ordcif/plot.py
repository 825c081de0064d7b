"""Static SVG rendering of step-function estimates.

One polyline trace per cause over data-unit axes with ticks and a legend;
no other polyline elements are emitted, so a k-cause plot contains exactly
k polylines.
"""

from __future__ import annotations

import numpy as np

from .core import StepFunction

__all__ = ["svg_step_plot"]

_PALETTE = [
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#9467bd",
    "#ff7f0e",
    "#8c564b",
    "#e377c2",
    "#7f7f7f",
]

_WIDTH, _HEIGHT = 640, 440
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 64, 20, 28, 48


def _step_points(f: StepFunction, x_max: float) -> list[tuple[float, float]]:
    pts = [(0.0, f.initial_value)]
    prev = f.initial_value
    for x, v in zip(f.knots, f.values):
        if x > x_max:
            break
        pts.append((float(x), prev))
        pts.append((float(x), float(v)))
        prev = float(v)
    pts.append((x_max, prev))
    return pts


def svg_step_plot(
    labelled_curves: list[tuple[str, StepFunction]],
    title: str = "",
    xlabel: str = "time",
    ylabel: str = "cumulative incidence",
) -> str:
    """Render labelled step functions as an SVG document string."""
    if not labelled_curves:
        raise ValueError("nothing to plot")
    x_max = max(
        (float(f.knots[-1]) for _, f in labelled_curves if f.knots.size), default=1.0
    )
    x_max *= 1.05
    y_max = max(
        max((f.final_value() for _, f in labelled_curves), default=1.0), 1e-9
    )
    y_max = min(1.0, y_max * 1.15)

    inner_w = _WIDTH - _MARGIN_L - _MARGIN_R
    inner_h = _HEIGHT - _MARGIN_T - _MARGIN_B

    def px(x: float) -> float:
        return _MARGIN_L + inner_w * (x / x_max if x_max else 0.0)

    def py(y: float) -> float:
        return _MARGIN_T + inner_h * (1.0 - y / y_max)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
    ]
    if title:
        parts.append(
            f'<text x="{_WIDTH / 2:.1f}" y="18" text-anchor="middle" '
            f'font-family="sans-serif" font-size="14">{title}</text>'
        )
    # Axes.
    x0, y0 = px(0.0), py(0.0)
    parts.append(
        f'<line x1="{x0:.1f}" y1="{y0:.1f}" x2="{px(x_max):.1f}" y2="{y0:.1f}" '
        f'stroke="black" stroke-width="1"/>'
    )
    parts.append(
        f'<line x1="{x0:.1f}" y1="{y0:.1f}" x2="{x0:.1f}" y2="{py(y_max):.1f}" '
        f'stroke="black" stroke-width="1"/>'
    )
    for frac in np.linspace(0.0, 1.0, 6):
        xv = frac * x_max
        parts.append(
            f'<line x1="{px(xv):.1f}" y1="{y0:.1f}" x2="{px(xv):.1f}" y2="{y0 + 5:.1f}" '
            f'stroke="black" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{px(xv):.1f}" y="{y0 + 18:.1f}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{xv:.3g}</text>'
        )
        yv = frac * y_max
        parts.append(
            f'<line x1="{x0 - 5:.1f}" y1="{py(yv):.1f}" x2="{x0:.1f}" y2="{py(yv):.1f}" '
            f'stroke="black" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{x0 - 8:.1f}" y="{py(yv) + 4:.1f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{yv:.3g}</text>'
        )
    parts.append(
        f'<text x="{_MARGIN_L + inner_w / 2:.1f}" y="{_HEIGHT - 10}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12">{xlabel}</text>'
    )
    parts.append(
        f'<text x="16" y="{_MARGIN_T + inner_h / 2:.1f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 16 {_MARGIN_T + inner_h / 2:.1f})">{ylabel}</text>'
    )
    # Traces.
    for idx, (label, f) in enumerate(labelled_curves):
        color = _PALETTE[idx % len(_PALETTE)]
        points = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in _step_points(f, x_max))
        parts.append(
            f'<polyline points="{points}" fill="none" stroke="{color}" stroke-width="1.6"/>'
        )
    # Legend.
    for idx, (label, _) in enumerate(labelled_curves):
        color = _PALETTE[idx % len(_PALETTE)]
        ly = _MARGIN_T + 14 + 16 * idx
        lx = _MARGIN_L + 12
        parts.append(
            f'<line x1="{lx}" y1="{ly}" x2="{lx + 22}" y2="{ly}" '
            f'stroke="{color}" stroke-width="1.6"/>'
        )
        parts.append(
            f'<text x="{lx + 28}" y="{ly + 4}" font-family="sans-serif" '
            f'font-size="12">{label}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts)
