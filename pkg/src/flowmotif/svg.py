"""Minimal static SVG writers for the CLI's convenience plots.

The CSV/JSON files are the canonical outputs; these scatter and
dendrogram renderings exist so results can be eyeballed without any
plotting toolkit or display server. All coordinates are formatted with
fixed precision, so output bytes are stable across reruns.
"""

from __future__ import annotations

from xml.sax.saxutils import escape

from .analytics import Dendrogram, DendrogramNode

PALETTE = (
    "#1f77b4",
    "#ff7f0e",
    "#2ca02c",
    "#d62728",
    "#9467bd",
    "#8c564b",
    "#e377c2",
    "#7f7f7f",
    "#bcbd22",
    "#17becf",
)


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _svg_doc(width: int, height: int, body: list[str]) -> str:
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">'
    )
    return "\n".join([head, *body, "</svg>"]) + "\n"


def _axis_range(values: list[float]) -> tuple[float, float]:
    lo, hi = min(values), max(values)
    if hi <= lo:
        lo, hi = lo - 1.0, hi + 1.0
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def scatter_svg(
    points: list[tuple[float, float, str, int]],
    title: str = "",
    x_label: str = "pc1",
    y_label: str = "pc2",
    width: int = 720,
    height: int = 540,
) -> str:
    """Labeled scatter plot; the int in each point picks the palette color."""
    margin = 50
    plot_w, plot_h = width - 2 * margin, height - 2 * margin
    xs = [p[0] for p in points] or [0.0]
    ys = [p[1] for p in points] or [0.0]
    x_lo, x_hi = _axis_range(xs)
    y_lo, y_hi = _axis_range(ys)

    def px(x: float) -> float:
        return margin + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y: float) -> float:
        return margin + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h

    body = [
        f'<rect x="{margin}" y="{margin}" width="{plot_w}" height="{plot_h}" '
        'fill="none" stroke="#333"/>'
    ]
    if title:
        body.append(
            f'<text x="{width // 2}" y="24" text-anchor="middle" font-size="14">'
            f"{escape(title)}</text>"
        )
    for i in range(5):
        fx = x_lo + (x_hi - x_lo) * i / 4
        fy = y_lo + (y_hi - y_lo) * i / 4
        body.append(
            f'<text x="{_fmt(px(fx))}" y="{height - margin + 16}" text-anchor="middle">'
            f"{fx:.3g}</text>"
        )
        body.append(
            f'<text x="{margin - 6}" y="{_fmt(py(fy) + 4)}" text-anchor="end">{fy:.3g}</text>'
        )
    body.append(
        f'<text x="{width // 2}" y="{height - 10}" text-anchor="middle">{escape(x_label)}</text>'
    )
    body.append(
        f'<text x="14" y="{height // 2}" text-anchor="middle" '
        f'transform="rotate(-90 14 {height // 2})">{escape(y_label)}</text>'
    )
    for x, y, label, color in points:
        cx, cy = px(x), py(y)
        fill = PALETTE[color % len(PALETTE)]
        body.append(f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="4" fill="{fill}"/>')
        body.append(
            f'<text x="{_fmt(cx + 6)}" y="{_fmt(cy - 6)}">{escape(label)}</text>'
        )
    return _svg_doc(width, height, body)


def dendrogram_svg(dendrogram: Dendrogram, width: int = 720, height: int = 540) -> str:
    """Bottom-up dendrogram; merge bar y-positions scale with merge height."""
    margin = 50
    label_space = 90
    plot_w = width - 2 * margin
    plot_h = height - 2 * margin - label_space
    leaves = dendrogram.root.leaves()
    n = len(leaves)
    max_h = max(dendrogram.merge_heights) if dendrogram.merge_heights else 1.0
    if max_h <= 0.0:
        max_h = 1.0
    slot = plot_w / n
    x_of = {team: margin + slot * (i + 0.5) for i, team in enumerate(leaves)}
    base_y = margin + plot_h

    def py(h: float) -> float:
        return base_y - h / max_h * plot_h

    body = []

    def draw(node: DendrogramNode) -> float:
        if node.team_id is not None:
            return x_of[node.team_id]
        assert node.left is not None and node.right is not None
        xl, xr = draw(node.left), draw(node.right)
        y = py(node.height)
        yl, yr = py(node.left.height), py(node.right.height)
        body.append(
            f'<polyline points="{_fmt(xl)},{_fmt(yl)} {_fmt(xl)},{_fmt(y)} '
            f'{_fmt(xr)},{_fmt(y)} {_fmt(xr)},{_fmt(yr)}" fill="none" stroke="#1f77b4"/>'
        )
        return (xl + xr) / 2.0

    draw(dendrogram.root)
    for team, x in x_of.items():
        body.append(
            f'<text x="{_fmt(x)}" y="{_fmt(base_y + 12)}" text-anchor="end" '
            f'transform="rotate(-60 {_fmt(x)} {_fmt(base_y + 12)})">{escape(team)}</text>'
        )
    for i in range(5):
        h = max_h * i / 4
        body.append(
            f'<text x="{margin - 6}" y="{_fmt(py(h) + 4)}" text-anchor="end">{h:.3g}</text>'
        )
    body.append(
        f'<text x="14" y="{margin + plot_h // 2}" text-anchor="middle" '
        f'transform="rotate(-90 14 {margin + plot_h // 2})">merge height (ESS increase)</text>'
    )
    return _svg_doc(width, height, body)
