"""Hand-emitted SVG learning curves (polyline-based, no plotting library)."""

from __future__ import annotations

import numpy as np

_WIDTH, _HEIGHT = 860, 520
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 70, 20, 40, 50
_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")
_Y_FLOOR = -1200.0  # curves are clipped here so early failures stay readable


class _Scale:
    def __init__(self, episodes: int, y_lo: float, y_hi: float):
        self.episodes = max(episodes, 1)
        self.y_lo, self.y_hi = y_lo, y_hi
        self.plot_w = _WIDTH - _MARGIN_L - _MARGIN_R
        self.plot_h = _HEIGHT - _MARGIN_T - _MARGIN_B

    def x(self, episode: float) -> float:
        return _MARGIN_L + self.plot_w * (episode - 1) / max(self.episodes - 1, 1)

    def y(self, value: float) -> float:
        value = min(max(value, self.y_lo), self.y_hi)
        frac = (value - self.y_lo) / (self.y_hi - self.y_lo)
        return _MARGIN_T + self.plot_h * (1.0 - frac)


def _polyline(scale: _Scale, values, color: str, width: float, opacity: float) -> str:
    pts = " ".join(f"{scale.x(i + 1):.1f},{scale.y(v):.1f}" for i, v in enumerate(values))
    return (f'<polyline fill="none" stroke="{color}" stroke-width="{width}" '
            f'stroke-opacity="{opacity}" points="{pts}"/>')


def _y_ticks(lo: float, hi: float, n: int = 6) -> list[float]:
    return list(np.linspace(lo, hi, n))


def write_learning_curve_svg(path, curves: dict, threshold: float,
                             title: str = "learning curves") -> None:
    """Write a self-contained SVG of per-seed return curves and medians.

    `curves` maps a label (agent name) to a list of per-episode return
    arrays, one per seed; the per-episode median across seeds is drawn bold.
    A dashed line marks the convergence threshold.
    """
    episodes = max(len(r) for runs in curves.values() for r in runs)
    all_vals = np.concatenate([np.asarray(r) for runs in curves.values() for r in runs])
    y_lo = max(float(all_vals.min()), _Y_FLOOR)
    y_hi = max(float(all_vals.max()), threshold) + 10.0
    y_lo = min(y_lo, threshold - 50.0)
    scale = _Scale(episodes, y_lo, y_hi)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}" font-family="sans-serif" font-size="13">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<text x="{_WIDTH / 2:.0f}" y="24" text-anchor="middle" '
        f'font-size="16">{title}</text>',
    ]
    # axes
    x0, y0 = _MARGIN_L, _HEIGHT - _MARGIN_B
    x1, y1 = _WIDTH - _MARGIN_R, _MARGIN_T
    parts.append(f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>')
    parts.append(f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>')
    parts.append(f'<text x="{(x0 + x1) / 2:.0f}" y="{_HEIGHT - 12}" '
                 f'text-anchor="middle">episode</text>')
    parts.append(f'<text x="16" y="{(y0 + y1) / 2:.0f}" text-anchor="middle" '
                 f'transform="rotate(-90 16 {(y0 + y1) / 2:.0f})">return</text>')
    for tick in _y_ticks(y_lo, y_hi):
        ty = scale.y(tick)
        parts.append(f'<line x1="{x0 - 4}" y1="{ty:.1f}" x2="{x0}" y2="{ty:.1f}" '
                     f'stroke="black"/>')
        parts.append(f'<text x="{x0 - 8}" y="{ty + 4:.1f}" '
                     f'text-anchor="end">{tick:.0f}</text>')
    for tick in np.linspace(1, episodes, 6):
        tx = scale.x(tick)
        parts.append(f'<line x1="{tx:.1f}" y1="{y0}" x2="{tx:.1f}" y2="{y0 + 4}" '
                     f'stroke="black"/>')
        parts.append(f'<text x="{tx:.1f}" y="{y0 + 18}" '
                     f'text-anchor="middle">{tick:.0f}</text>')
    # threshold line
    ty = scale.y(threshold)
    parts.append(f'<line x1="{x0}" y1="{ty:.1f}" x2="{x1}" y2="{ty:.1f}" '
                 f'stroke="#888" stroke-dasharray="6,4"/>')
    parts.append(f'<text x="{x1 - 4}" y="{ty - 5:.1f}" text-anchor="end" '
                 f'fill="#555">threshold {threshold:.0f}</text>')

    for idx, (label, runs) in enumerate(curves.items()):
        color = _COLORS[idx % len(_COLORS)]
        for r in runs:
            parts.append(_polyline(scale, r, color, 1.0, 0.3))
        shortest = min(len(r) for r in runs)
        median = np.median(np.stack([np.asarray(r)[:shortest] for r in runs]), axis=0)
        parts.append(_polyline(scale, median, color, 2.5, 1.0))
        ly = _MARGIN_T + 16 * (idx + 1)
        parts.append(f'<line x1="{x1 - 150}" y1="{ly - 4}" x2="{x1 - 120}" '
                     f'y2="{ly - 4}" stroke="{color}" stroke-width="2.5"/>')
        parts.append(f'<text x="{x1 - 114}" y="{ly}">{label}</text>')

    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")
