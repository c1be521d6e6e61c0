"""Synthetic test images rendered with area coverage (supersampled).

Sharp, pixel-aligned steps give a two-pixel plateau of equal Sobel magnitude
that strict non-maximum suppression removes entirely, so every shape here is
anti-aliased: boundary pixels carry their fractional coverage.
"""

from __future__ import annotations

import math
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .raster import GrayImage

SUPERSAMPLE = 8


def _render(width: int, height: int, inside: Callable[[np.ndarray, np.ndarray], np.ndarray],
            fg: float, bg: float, ss: int = SUPERSAMPLE) -> GrayImage:
    # pixel (x, y) covers [x - 0.5, x + 0.5] x [y - 0.5, y + 0.5]
    offs = (np.arange(ss) + 0.5) / ss - 0.5
    ys = np.arange(height)[:, None] + offs[None, :]
    xs = np.arange(width)[:, None] + offs[None, :]
    Y = ys.reshape(-1)[:, None]
    X = xs.reshape(-1)[None, :]
    hit = inside(X, Y).astype(np.float64)
    cover = hit.reshape(height, ss, width, ss).mean(axis=(1, 3))
    return GrayImage(bg + (fg - bg) * cover)


def rectangle(
    size: int = 32,
    half_width: float = 8.0,
    half_height: float = 5.0,
    offset: Tuple[float, float] = (0.0, 0.0),
    angle: float = 0.0,
    fg: float = 255.0,
    bg: float = 0.0,
    height: Optional[int] = None,
) -> GrayImage:
    """Bright rectangle on a dark background.

    The rectangle is centered at the grid center plus ``offset`` and turned
    visually clockwise by ``angle`` degrees. Half extents that are integers
    plus 0.5 put the sides on pixel centers, which keeps edges one pixel
    thin after NMS.
    """
    h = height or size
    cx = (size - 1) / 2.0 + offset[0]
    cy = (h - 1) / 2.0 + offset[1]
    c, s = math.cos(math.radians(angle)), math.sin(math.radians(angle))

    def inside(X, Y):
        dx, dy = X - cx, Y - cy
        u = c * dx + s * dy
        v = -s * dx + c * dy
        return (np.abs(u) <= half_width) & (np.abs(v) <= half_height)

    return _render(size, h, inside, fg, bg)


def ellipse(size: int = 32, a: float = 10.0, b: float = 6.0, offset=(0.0, 0.0), angle: float = 0.0,
            fg: float = 255.0, bg: float = 0.0) -> GrayImage:
    cx = (size - 1) / 2.0 + offset[0]
    cy = (size - 1) / 2.0 + offset[1]
    c, s = math.cos(math.radians(angle)), math.sin(math.radians(angle))

    def inside(X, Y):
        dx, dy = X - cx, Y - cy
        u = c * dx + s * dy
        v = -s * dx + c * dy
        return (u / a) ** 2 + (v / b) ** 2 <= 1.0

    return _render(size, size, inside, fg, bg)


def polygon(size: int, vertices: Sequence[Tuple[float, float]], fg: float = 255.0, bg: float = 0.0) -> GrayImage:
    """Filled polygon, vertices in pixel coordinates (even-odd rule)."""
    vx = np.array([v[0] for v in vertices], dtype=float)
    vy = np.array([v[1] for v in vertices], dtype=float)

    def inside(X, Y):
        X, Y = np.broadcast_arrays(X, Y)
        res = np.zeros(X.shape, dtype=bool)
        n = len(vx)
        for i in range(n):
            x0, y0, x1, y1 = vx[i], vy[i], vx[(i + 1) % n], vy[(i + 1) % n]
            crosses = (y0 > Y) != (y1 > Y)
            with np.errstate(divide="ignore", invalid="ignore"):
                xint = x0 + (Y - y0) * (x1 - x0) / (y1 - y0)
            res ^= crosses & (X < xint)
        return res

    return _render(size, size, inside, fg, bg)


def composite(*images: GrayImage) -> GrayImage:
    """Pixelwise maximum of several renders on a common background."""
    return GrayImage(np.maximum.reduce([im.pixels for im in images]))


def blurred_step(size: int = 32, position: float = 15.3, width: float = 2.0, vertical: bool = True,
                 lo: float = 0.0, hi: float = 255.0) -> GrayImage:
    """Smooth (logistic) step edge across x, or across y when ``vertical`` is false."""
    t = np.arange(size, dtype=float)
    profile = lo + (hi - lo) / (1.0 + np.exp(-(t - position) / width))
    grid = np.tile(profile, (size, 1))
    return GrayImage(grid if vertical else grid.T)

