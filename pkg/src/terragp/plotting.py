"""Deterministic SVG rendering of cost fields and trajectories.

The renderer emits plain SVG text with repr()-formatted coordinates so the
same field and paths produce byte-identical files everywhere. No plotting
framework is involved.
"""

from __future__ import annotations

import numpy as np

from .terrain import CellId, TerrainGrid

# compact viridis-style ramp, dark blue -> green -> yellow
_STOPS = (
    (0.0, (68, 1, 84)),
    (0.25, (59, 82, 139)),
    (0.5, (33, 145, 140)),
    (0.75, (94, 201, 98)),
    (1.0, (253, 231, 37)),
)

_PATH_COLORS = ("#ff4d4d", "#ffffff", "#ff9900", "#00c8ff")


def _ramp(t: float) -> str:
    t = min(max(t, 0.0), 1.0)
    for (t0, c0), (t1, c1) in zip(_STOPS, _STOPS[1:]):
        if t <= t1:
            f = 0.0 if t1 == t0 else (t - t0) / (t1 - t0)
            r = round(c0[0] + f * (c1[0] - c0[0]))
            g = round(c0[1] + f * (c1[1] - c0[1]))
            b = round(c0[2] + f * (c1[2] - c0[2]))
            return f"#{r:02x}{g:02x}{b:02x}"
    return "#fde725"


def _fmt(x: float) -> str:
    return repr(round(float(x), 3))


def render_field_svg(
    grid: TerrainGrid,
    values: np.ndarray,
    paths: list[tuple[str, list[CellId]]] | None = None,
    start: CellId | None = None,
    goal: CellId | None = None,
    cell_px: float = 12.0,
    title: str = "",
) -> str:
    """Render a per-cell scalar field with optional labelled trajectories."""
    values = np.asarray(values, dtype=np.float64).ravel()
    if values.shape[0] != grid.n_cells:
        raise ValueError("field length must match the grid")
    paths = paths or []
    vmin = float(values.min())
    vmax = float(values.max())
    span = vmax - vmin
    legend_h = 22.0 + 16.0 * len(paths)
    w = grid.width * cell_px
    h = grid.height * cell_px + (26.0 if title else 0.0) + legend_h
    top = 26.0 if title else 0.0

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(w)}" height="{_fmt(h)}" '
        f'viewBox="0 0 {_fmt(w)} {_fmt(h)}">',
        f'<rect width="{_fmt(w)}" height="{_fmt(h)}" fill="#1a1a2e"/>',
    ]
    if title:
        out.append(
            f'<text x="{_fmt(w / 2)}" y="17" fill="#eeeeee" font-family="monospace" '
            f'font-size="13" text-anchor="middle">{title}</text>'
        )
    for row in range(grid.height):
        for col in range(grid.width):
            v = values[row * grid.width + col]
            t = 0.5 if span == 0 else (v - vmin) / span
            out.append(
                f'<rect x="{_fmt(col * cell_px)}" y="{_fmt(top + row * cell_px)}" '
                f'width="{_fmt(cell_px)}" height="{_fmt(cell_px)}" fill="{_ramp(t)}"/>'
            )

    def center(cell: CellId) -> tuple[float, float]:
        return (cell.col + 0.5) * cell_px, top + (cell.row + 0.5) * cell_px

    for i, (_, cells) in enumerate(paths):
        pts = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in map(center, cells))
        color = _PATH_COLORS[i % len(_PATH_COLORS)]
        out.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" '
            f'stroke-width="{_fmt(cell_px / 5)}" stroke-linejoin="round" stroke-linecap="round"/>'
        )
    if start is not None:
        x, y = center(start)
        out.append(
            f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{_fmt(cell_px / 2.4)}" '
            f'fill="#ffffff" stroke="#000000" stroke-width="1.5"/>'
        )
    if goal is not None:
        x, y = center(goal)
        r = cell_px / 2.4
        pts = f"{_fmt(x)},{_fmt(y - r)} {_fmt(x + r)},{_fmt(y + r)} {_fmt(x - r)},{_fmt(y + r)}"
        out.append(
            f'<polygon points="{pts}" fill="#ffff66" stroke="#000000" stroke-width="1.5"/>'
        )

    ly = top + grid.height * cell_px + 15.0
    out.append(
        f'<text x="6" y="{_fmt(ly)}" fill="#bbbbbb" font-family="monospace" font-size="11">'
        f"min={_fmt(vmin)} max={_fmt(vmax)}</text>"
    )
    for i, (label, _) in enumerate(paths):
        yy = ly + 16.0 * (i + 1)
        color = _PATH_COLORS[i % len(_PATH_COLORS)]
        out.append(
            f'<line x1="6" y1="{_fmt(yy - 4)}" x2="30" y2="{_fmt(yy - 4)}" '
            f'stroke="{color}" stroke-width="3"/>'
        )
        out.append(
            f'<text x="36" y="{_fmt(yy)}" fill="#bbbbbb" font-family="monospace" '
            f'font-size="11">{label}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def save_field_svg(path, grid: TerrainGrid, values: np.ndarray, **kwargs) -> None:
    svg = render_field_svg(grid, values, **kwargs)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(svg)
