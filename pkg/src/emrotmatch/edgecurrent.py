"""Significant edge extraction and the virtual edge current.

Pipeline: Sobel gradient -> percent-of-max threshold -> pair-direction
non-maximum suppression -> rotate each surviving gradient by 90 degrees
(visually counterclockwise on screen) to get a current element.

Rotation convention: in screen coordinates (x right, y down) a gradient
(gx, gy) becomes the current (gy, -gx). A gradient pointing east therefore
yields a current pointing up-screen. Both images of a matching problem go
through the same mapping, which is all the force computation relies on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, List, NamedTuple, Optional, Set, Tuple

import numpy as np

from .raster import GrayImage, circle_mask

SOBEL_X = np.array([[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]])
SOBEL_Y = SOBEL_X.T

# (dy, dx) offsets of the four neighbor pairs: W/E, N/S, NW/SE, NE/SW
NMS_PAIRS = (
    ((0, -1), (0, 1)),
    ((-1, 0), (1, 0)),
    ((-1, -1), (1, 1)),
    ((-1, 1), (1, -1)),
)

_R = math.sqrt(0.5)
# unit vectors in screen coordinates for visual angles 0, 45, ..., 315 (CCW from east)
COMPASS = np.array(
    [
        [1.0, 0.0],  # E
        [_R, -_R],  # NE
        [0.0, -1.0],  # N
        [-_R, -_R],  # NW
        [-1.0, 0.0],  # W
        [-_R, _R],  # SW
        [0.0, 1.0],  # S
        [_R, _R],  # SE
    ]
)
COMPASS_NAMES = ("E", "NE", "N", "NW", "W", "SW", "S", "SE")


class EmptyCurrentSetError(ValueError):
    """An image produced no current elements (blank or degenerate input)."""

    def __init__(self, message: str = "empty current set", angle: Optional[float] = None):
        if angle is not None:
            message = f"{message} at rotation angle {angle:g} deg"
        super().__init__(message)
        self.angle = angle


@dataclass(frozen=True, eq=False)
class GradientField:
    """Per-pixel Sobel response; arrays have shape (height, width)."""

    gx: np.ndarray
    gy: np.ndarray

    @property
    def width(self) -> int:
        return self.gx.shape[1]

    @property
    def height(self) -> int:
        return self.gx.shape[0]

    @property
    def magnitude(self) -> np.ndarray:
        return np.hypot(self.gx, self.gy)


@dataclass(frozen=True)
class EdgeParams:
    threshold_percent: float = 0.10
    quantize_directions: bool = True

    def __post_init__(self):
        if not 0.0 < self.threshold_percent < 1.0:
            raise ValueError("threshold_percent must lie in (0, 1)")


class CurrentElement(NamedTuple):
    pos: Tuple[float, float]
    vec: Tuple[float, float]

    @property
    def magnitude(self) -> float:
        return math.hypot(*self.vec)


@dataclass(frozen=True, eq=False)
class CurrentSet:
    """All current elements of one image on the plane z, with the moment origin.

    ``positions`` and ``vectors`` are (N, 2) float arrays in canonical
    row-major order (by y, then x).
    """

    positions: np.ndarray
    vectors: np.ndarray
    z: float = 0.0
    center: Tuple[float, float] = (0.0, 0.0)
    dims: Tuple[int, int] = (0, 0)

    def __post_init__(self):
        pos = np.array(self.positions, dtype=np.float64).reshape(-1, 2)
        vec = np.array(self.vectors, dtype=np.float64).reshape(-1, 2)
        if pos.shape != vec.shape:
            raise ValueError("positions and vectors must have the same length")
        pos.setflags(write=False)
        vec.setflags(write=False)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "vectors", vec)
        object.__setattr__(self, "z", float(self.z))
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))

    def __len__(self) -> int:
        return self.positions.shape[0]

    def __iter__(self) -> Iterator[CurrentElement]:
        for p, v in zip(self.positions, self.vectors):
            yield CurrentElement((float(p[0]), float(p[1])), (float(v[0]), float(v[1])))

    @property
    def elements(self) -> List[CurrentElement]:
        return list(self)

    def with_z(self, z: float) -> "CurrentSet":
        return CurrentSet(self.positions, self.vectors, z, self.center, self.dims)

    def scaled(self, factor: float) -> "CurrentSet":
        return CurrentSet(self.positions, self.vectors * factor, self.z, self.center, self.dims)

    def mirrored(self) -> "CurrentSet":
        """Reflect x about the center line; current vectors reflect with it."""
        cx = self.center[0]
        pos = self.positions.copy()
        pos[:, 0] = 2.0 * cx - pos[:, 0]
        vec = self.vectors.copy()
        vec[:, 0] = -vec[:, 0]
        return CurrentSet(pos, vec, self.z, self.center, self.dims)

    def subset(self, index) -> "CurrentSet":
        return CurrentSet(self.positions[index], self.vectors[index], self.z, self.center, self.dims)


def sobel_gradient(img: GrayImage) -> GradientField:
    """3x3 Sobel responses, unnormalized. The one-pixel border ring is zero."""
    p = img.pixels
    h, w = p.shape
    if h < 3 or w < 3:
        raise ValueError("image too small for Sobel")
    gx = np.zeros_like(p)
    gy = np.zeros_like(p)
    for dy in range(3):
        for dx in range(3):
            win = p[dy : h - 2 + dy, dx : w - 2 + dx]
            if SOBEL_X[dy, dx]:
                gx[1:-1, 1:-1] += SOBEL_X[dy, dx] * win
            if SOBEL_Y[dy, dx]:
                gy[1:-1, 1:-1] += SOBEL_Y[dy, dx] * win
    return GradientField(gx, gy)


def significant_edge_mask(grad: GradientField, params: EdgeParams = EdgeParams()) -> np.ndarray:
    """Boolean (height, width) map of significant edge pixels."""
    mag = grad.magnitude
    h, w = mag.shape
    out = np.zeros((h, w), dtype=bool)
    if h < 3 or w < 3:
        return out
    peak = mag.max()
    center = mag[1:-1, 1:-1]
    strong = center >= params.threshold_percent * peak
    wins = np.zeros(center.shape, dtype=np.int8)
    for (ay, ax), (by, bx) in NMS_PAIRS:
        a = mag[1 + ay : h - 1 + ay, 1 + ax : w - 1 + ax]
        b = mag[1 + by : h - 1 + by, 1 + bx : w - 1 + bx]
        wins += (center > a) & (center > b)
    out[1:-1, 1:-1] = strong & (wins >= 2)
    return out


def extract_significant_edges(grad: GradientField, params: EdgeParams = EdgeParams()) -> Set[Tuple[int, int]]:
    """Significant edge pixels as a set of (x, y) positions."""
    ys, xs = np.nonzero(significant_edge_mask(grad, params))
    return {(int(x), int(y)) for x, y in zip(xs, ys)}


def quantize_direction(vectors: np.ndarray) -> np.ndarray:
    """Snap each vector to the nearest compass direction, keeping its length.

    Sectors are 45 degrees wide; an exact tie goes to the visually
    counterclockwise neighbor.
    """
    vectors = np.asarray(vectors, dtype=np.float64).reshape(-1, 2)
    # visual angle measured counterclockwise with y pointing up
    theta = np.degrees(np.arctan2(-vectors[:, 1], vectors[:, 0]))
    k = np.floor(theta / 45.0 + 0.5).astype(np.intp) % 8
    mag = np.hypot(vectors[:, 0], vectors[:, 1])
    return COMPASS[k] * mag[:, None]


def gradient_to_current(
    grad: GradientField,
    edges,
    params: EdgeParams = EdgeParams(),
    z: float = 0.0,
    center: Optional[Tuple[float, float]] = None,
) -> CurrentSet:
    """Turn the gradients on ``edges`` into current elements.

    ``edges`` is either a boolean mask shaped like the field or an iterable
    of (x, y) pixel positions. Pixels with zero gradient are dropped.
    """
    h, w = grad.gx.shape
    if isinstance(edges, np.ndarray) and edges.dtype == bool:
        mask = edges
    else:
        mask = np.zeros((h, w), dtype=bool)
        for x, y in edges:
            mask[y, x] = True
    mask = mask & ((grad.gx != 0) | (grad.gy != 0))
    ys, xs = np.nonzero(mask)  # row-major order
    gx = grad.gx[ys, xs]
    gy = grad.gy[ys, xs]
    vec = np.column_stack([gy, -gx])
    if params.quantize_directions:
        vec = quantize_direction(vec)
    pos = np.column_stack([xs, ys]).astype(np.float64)
    if center is None:
        center = ((w - 1) / 2.0, (h - 1) / 2.0)
    return CurrentSet(pos, vec, z=z, center=center, dims=(w, h))


def image_edges(img: GrayImage, params: EdgeParams = EdgeParams(), mask_circle: bool = False):
    """Sobel field and significant-edge mask of ``img``.

    With ``mask_circle`` an edge is kept only if its whole 3x3 Sobel window
    lies inside the inscribed circle, which drops the frame corners that
    rotation fills in.
    """
    grad = sobel_gradient(img)
    edges = significant_edge_mask(grad, params)
    if mask_circle:
        inner = circle_mask(img.width, img.height)
        h, w = inner.shape
        shrunk = np.zeros_like(inner)
        shrunk[1:-1, 1:-1] = np.logical_and.reduce(
            [inner[1 + dy : h - 1 + dy, 1 + dx : w - 1 + dx] for dy in (-1, 0, 1) for dx in (-1, 0, 1)]
        )
        edges = edges & shrunk
    return grad, edges


def extract_currents(
    img: GrayImage,
    params: EdgeParams = EdgeParams(),
    z: float = 0.0,
    mask_circle: bool = False,
) -> CurrentSet:
    """Full pipeline from a raster to its virtual current on plane ``z``."""
    grad, edges = image_edges(img, params, mask_circle)
    return gradient_to_current(grad, edges, params, z=z, center=img.center)


def edge_map_image(mask: np.ndarray) -> GrayImage:
    """Edge map for export: 255 on edges, 0 elsewhere."""
    return GrayImage(np.where(mask, 255.0, 0.0))
