"""Minimal SVG scatter plots, written without a plotting library."""

import numpy as np

PANEL_SIZE = 200
MARGIN = 10
TITLE_HEIGHT = 20
PANEL_TITLES = ("given data", "KDE", "local PCA", "Lie PCA", "fresh draws")


def _coords_to_px(P, half_width):
    # origin at the panel centre, y axis pointing up
    scale = (PANEL_SIZE / 2 - MARGIN) / half_width
    return PANEL_SIZE / 2 + scale * P[:, 0], PANEL_SIZE / 2 - scale * P[:, 1]


def _panel(P, x0, y0, half_width, title, radius):
    parts = [f'<g transform="translate({x0},{y0})">',
             f'<rect x="0" y="0" width="{PANEL_SIZE}" height="{PANEL_SIZE}" '
             'fill="white" stroke="black"/>',
             f'<text x="{PANEL_SIZE / 2}" y="-6" text-anchor="middle" '
             f'font-size="12">{title}</text>']
    if P is not None and len(P):
        px, py = _coords_to_px(P, half_width)
        parts.extend(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="{radius}"/>'
                     for x, y in zip(px, py))
    parts.append("</g>")
    return parts


def scatter_panels(panels, titles=PANEL_TITLES, projections=None):
    """SVG text for a row of scatter panels per projection.

    Parameters
    ----------
    panels : list of (n_i, d) arrays or None
        One point set per panel; None leaves the panel empty.
    projections : list of (i, j) coordinate pairs, optional
        One row of panels per pair. Defaults to ``[(0, 1)]``.

    All panels share one square window centred at the origin.
    """
    projections = projections or [(0, 1)]
    present = [np.asarray(P, dtype=np.float64) for P in panels if P is not None and len(P)]
    half_width = 1.0
    if present:
        half_width = max(float(np.max(np.abs(np.vstack(present)))), 1e-12) * 1.05
    width = len(panels) * (PANEL_SIZE + MARGIN) + MARGIN
    row_height = PANEL_SIZE + TITLE_HEIGHT + MARGIN
    height = len(projections) * row_height + MARGIN
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           '<g font-family="sans-serif" fill="black">']
    for row, (i, j) in enumerate(projections):
        y0 = MARGIN + TITLE_HEIGHT + row * row_height
        for col, P in enumerate(panels):
            x0 = MARGIN + col * (PANEL_SIZE + MARGIN)
            proj = None if P is None else np.asarray(P, dtype=np.float64)[:, [i, j]]
            title = titles[col] if len(projections) == 1 else f"{titles[col]} (x{i + 1}, x{j + 1})"
            radius = 2.0 if col == 0 else 1.2
            out.extend(_panel(proj, x0, y0, half_width, title, radius))
    out.extend(["</g>", "</svg>"])
    return "\n".join(out) + "\n"


def write_scatter_panels(path, panels, titles=PANEL_TITLES, projections=None):
    with open(path, "w") as fh:
        fh.write(scatter_panels(panels, titles, projections))
