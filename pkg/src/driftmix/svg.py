"""Dependency-free SVG line charts for drift series."""

from __future__ import annotations

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")

_MARGIN_L = 60
_MARGIN_R = 20
_MARGIN_T = 30
_MARGIN_B = 50


def line_chart_svg(
    x_labels: list[str],
    series: dict[str, list[float]],
    title: str = "",
    width: int = 640,
    height: int = 360,
) -> str:
    """Render one polyline per named series over categorical x positions."""
    if not series:
        raise ValueError("no series to plot")
    n = len(x_labels)
    for name, values in series.items():
        if len(values) != n:
            raise ValueError(f"series {name!r} has {len(values)} points, expected {n}")

    ys = [v for values in series.values() for v in values]
    y_lo = min(0.0, min(ys))
    y_hi = max(ys) or 1.0
    y_hi *= 1.05

    plot_w = width - _MARGIN_L - _MARGIN_R
    plot_h = height - _MARGIN_T - _MARGIN_B

    def px(i: int) -> float:
        frac = 0.5 if n == 1 else i / (n - 1)
        return _MARGIN_L + frac * plot_w

    def py(v: float) -> float:
        frac = (v - y_lo) / (y_hi - y_lo)
        return _MARGIN_T + (1.0 - frac) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    if title:
        parts.append(
            f'<text x="{width / 2:.1f}" y="18" text-anchor="middle" '
            f'font-family="sans-serif" font-size="13">{title}</text>'
        )
    # axes
    x0, y0 = _MARGIN_L, _MARGIN_T + plot_h
    parts.append(
        f'<line x1="{x0}" y1="{_MARGIN_T}" x2="{x0}" y2="{y0}" stroke="black"/>'
    )
    parts.append(
        f'<line x1="{x0}" y1="{y0}" x2="{x0 + plot_w}" y2="{y0}" stroke="black"/>'
    )
    for k in range(5):
        v = y_lo + (y_hi - y_lo) * k / 4
        y = py(v)
        parts.append(
            f'<line x1="{x0 - 4}" y1="{y:.1f}" x2="{x0}" y2="{y:.1f}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{x0 - 8}" y="{y + 4:.1f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="10">{v:.3g}</text>'
        )
    for i, label in enumerate(x_labels):
        parts.append(
            f'<text x="{px(i):.1f}" y="{y0 + 16}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="10">{label}</text>'
        )
    for (name, values), color in zip(series.items(), _COLORS):
        points = " ".join(f"{px(i):.2f},{py(v):.2f}" for i, v in enumerate(values))
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{points}"/>'
        )
    for k, ((name, _), color) in enumerate(zip(series.items(), _COLORS)):
        lx = _MARGIN_L + 10 + 130 * k
        parts.append(
            f'<line x1="{lx}" y1="{_MARGIN_T + 8}" x2="{lx + 18}" y2="{_MARGIN_T + 8}" '
            f'stroke="{color}" stroke-width="1.5"/>'
        )
        parts.append(
            f'<text x="{lx + 24}" y="{_MARGIN_T + 12}" font-family="sans-serif" '
            f'font-size="11">{name}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
