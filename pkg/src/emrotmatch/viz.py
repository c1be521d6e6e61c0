"""SVG diagrams: arrow fields, sign bar charts and sign pie charts.

Arrow fields draw one compass arrow per element (directions snapped to the
eight compass points) and a dot on every pixel without an element.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .analysis import SignDistribution
from .edgecurrent import CurrentSet, quantize_direction

CELL = 12


def _svg(width: float, height: float, body: Sequence[str]) -> str:
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:g}" height="{height:g}" '
        f'viewBox="0 0 {width:g} {height:g}">'
    )
    return "\n".join([head, f'<rect width="{width:g}" height="{height:g}" fill="white"/>', *body, "</svg>"]) + "\n"


def arrow_field_svg(dims, positions: np.ndarray, vectors: np.ndarray, path, cell: int = CELL) -> None:
    """Compass-arrow plot of ``vectors`` at ``positions`` on a dims[0] x dims[1] grid."""
    w, h = dims
    occupied = np.zeros((h, w), dtype=bool)
    body = []
    snapped = quantize_direction(vectors) if len(vectors) else np.zeros((0, 2))
    for p, v in zip(positions, snapped):
        x, y = int(round(p[0])), int(round(p[1]))
        occupied[y, x] = True
        n = np.hypot(*v)
        if n == 0:
            continue
        ux, uy = v / n
        cx, cy = (x + 0.5) * cell, (y + 0.5) * cell
        half = 0.4 * cell
        x0, y0 = cx - ux * half, cy - uy * half
        x1, y1 = cx + ux * half, cy + uy * half
        # two barbs at +/- 150 degrees from the shaft
        barbs = []
        for sgn in (1, -1):
            a = math.atan2(uy, ux) + sgn * math.radians(150)
            barbs.append(f"{x1 + 0.3 * cell * math.cos(a):.2f},{y1 + 0.3 * cell * math.sin(a):.2f}")
        body.append(
            f'<polyline points="{x0:.2f},{y0:.2f} {x1:.2f},{y1:.2f}" stroke="black" fill="none"/>'
            f'<polyline points="{barbs[0]} {x1:.2f},{y1:.2f} {barbs[1]}" stroke="black" fill="none"/>'
        )
    ys, xs = np.nonzero(~occupied)
    for x, y in zip(xs, ys):
        body.append(f'<circle cx="{(x + 0.5) * cell:g}" cy="{(y + 0.5) * cell:g}" r="1" fill="black"/>')
    Path(path).write_text(_svg(w * cell, h * cell, body))


def current_field_svg(currents: CurrentSet, path) -> None:
    arrow_field_svg(currents.dims, currents.positions, currents.vectors, path)


def force_field_svg(currents: CurrentSet, forces: np.ndarray, path) -> None:
    arrow_field_svg(currents.dims, currents.positions, forces, path)


def arrow_field_ppm(dims, positions: np.ndarray, vectors: np.ndarray, path, cell: int = 9) -> None:
    """Raster version of the arrow field (binary P6)."""
    from .raster import save_ppm

    w, h = dims
    img = np.full((h * cell, w * cell, 3), 255.0)
    occupied = np.zeros((h, w), dtype=bool)
    snapped = quantize_direction(vectors) if len(vectors) else np.zeros((0, 2))
    mid = cell // 2
    for p, v in zip(positions, snapped):
        x, y = int(round(p[0])), int(round(p[1]))
        occupied[y, x] = True
        n = np.hypot(*v)
        if n == 0:
            continue
        ux, uy = v / n
        for t in np.linspace(-mid, mid, 4 * cell):
            px, py = int(round(mid + ux * t)), int(round(mid + uy * t))
            img[y * cell + py, x * cell + px] = (0, 0, 0)
        # head: a red pixel block at the tip
        tx, ty = int(round(mid + ux * mid)), int(round(mid + uy * mid))
        img[y * cell + max(ty - 1, 0): y * cell + ty + 1, x * cell + max(tx - 1, 0): x * cell + tx + 1] = (200, 0, 0)
    ys, xs = np.nonzero(~occupied)
    img[ys * cell + mid, xs * cell + mid] = (0, 0, 0)
    save_ppm(img, path)


def sign_bar_svg(dist: SignDistribution, path, title: Optional[str] = None) -> None:
    """Sign versus interval index, one bar per sampled angle."""
    n = len(dist.angles)
    bw = 6
    margin = 40
    half = 60
    width = margin * 2 + n * bw
    height = margin * 2 + 2 * half
    zero_y = margin + half
    body = [
        f'<line x1="{margin}" y1="{zero_y}" x2="{margin + n * bw}" y2="{zero_y}" stroke="black"/>',
        f'<text x="{margin - 8}" y="{margin + 4}" text-anchor="end" font-size="10">+1</text>',
        f'<text x="{margin - 8}" y="{margin + 2 * half + 4}" text-anchor="end" font-size="10">-1</text>',
    ]
    for i, s in enumerate(dist.signs):
        x = margin + i * bw
        if s > 0:
            body.append(f'<rect x="{x}" y="{zero_y - half}" width="{bw - 1}" height="{half}" fill="#444"/>')
        elif s < 0:
            body.append(f'<rect x="{x}" y="{zero_y}" width="{bw - 1}" height="{half}" fill="#999"/>')
    for k in range(0, n + 1, max(1, n // 12)):
        x = margin + k * bw
        body.append(f'<text x="{x}" y="{height - margin / 2}" text-anchor="middle" font-size="9">{k}</text>')
    if title:
        body.append(f'<text x="{width / 2}" y="16" text-anchor="middle" font-size="12">{title}</text>')
    Path(path).write_text(_svg(width, height, body))


def _polar(cx, cy, r, angle_deg):
    # 0 deg at the top, growing clockwise as on a clock face
    t = math.radians(angle_deg)
    return cx + r * math.sin(t), cy - r * math.cos(t)


def sign_pie_svg(dist: SignDistribution, path, title: Optional[str] = None) -> None:
    """Circular section chart with turning-direction arrows and valid/invalid labels."""
    size = 420
    cx = cy = size / 2
    r = 150
    body = []
    step = dist.step
    shades = ("#d0d0d0", "#909090")
    valid = {n for n, s in enumerate(dist.sections) if any(rg.contains(s.start_angle) for rg in dist.convergence)}
    for n, sec in enumerate(dist.sections):
        a0 = sec.start_angle - step / 2
        a1 = sec.end_angle + step / 2
        if a1 - a0 >= 360.0 - 1e-9:
            body.append(f'<circle cx="{cx:g}" cy="{cy:g}" r="{r}" fill="{shades[0]}" stroke="white"/>')
        else:
            x0, y0 = _polar(cx, cy, r, a0)
            x1, y1 = _polar(cx, cy, r, a1)
            large = 1 if a1 - a0 > 180 else 0
            body.append(
                f'<path d="M{cx:g},{cy:g} L{x0:.2f},{y0:.2f} A{r},{r} 0 {large} 1 {x1:.2f},{y1:.2f} Z" '
                f'fill="{shades[n % 2]}" stroke="white"/>'
            )
        mid = (a0 + a1) / 2
        # arrow along the rim: negative turns counterclockwise, positive clockwise
        ra = r * 0.7
        span = min(20.0, (a1 - a0) / 3)
        b0, b1 = (mid + span, mid - span) if sec.sign < 0 else (mid - span, mid + span)
        ax0, ay0 = _polar(cx, cy, ra, b0)
        ax1, ay1 = _polar(cx, cy, ra, b1)
        sweep = 0 if sec.sign < 0 else 1
        body.append(
            f'<path d="M{ax0:.2f},{ay0:.2f} A{ra},{ra} 0 0 {sweep} {ax1:.2f},{ay1:.2f}" '
            f'stroke="black" fill="none" marker-end="url(#head)"/>'
        )
        lx, ly = _polar(cx, cy, r * 0.45, mid)
        label = "valid" if n in valid else "invalid"
        body.append(f'<text x="{lx:.2f}" y="{ly:.2f}" text-anchor="middle" font-size="11">{label}</text>')
    for osc in dist.oscillating_angles:
        x0, y0 = _polar(cx, cy, r, osc)
        x1, y1 = _polar(cx, cy, r + 25, osc)
        body.append(f'<line x1="{x0:.2f}" y1="{y0:.2f}" x2="{x1:.2f}" y2="{y1:.2f}" stroke="red"/>')
        body.append(f'<text x="{x1:.2f}" y="{y1:.2f}" font-size="10" fill="red">oscillating {osc:g}°</text>')
    tx, ty = _polar(cx, cy, r + 12, 0)
    body.append(f'<text x="{tx:.2f}" y="{ty:.2f}" text-anchor="middle" font-size="10">0°</text>')
    if title:
        body.append(f'<text x="{cx}" y="16" text-anchor="middle" font-size="12">{title}</text>')
    defs = (
        '<defs><marker id="head" markerWidth="8" markerHeight="8" refX="6" refY="3" orient="auto">'
        '<path d="M0,0 L6,3 L0,6 Z" fill="black"/></marker></defs>'
    )
    Path(path).write_text(_svg(size, size, [defs, *body]))


def export_sign_diagram(dist: SignDistribution, path, style: str = "bar", title: Optional[str] = None) -> None:
    """Write the SVG diagram at ``path`` and the CSV dump next to it."""
    if style == "bar":
        sign_bar_svg(dist, path, title)
    elif style == "pie":
        sign_pie_svg(dist, path, title)
    else:
        raise ValueError(f"unknown style {style!r}")
    dist.write_csv(Path(path).with_suffix(".csv"))
