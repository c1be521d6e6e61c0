"""Grayscale rasters, Netpbm I/O and rotation about the image center.

Images live in screen coordinates: x grows to the right, y grows downward,
pixel (x, y) is stored at ``pixels[y, x]``. Intensities are kept as float64
internally and quantized (round-half-up) only when written to disk.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np

PathLike = Union[str, Path]

LUMA_WEIGHTS = (0.299, 0.587, 0.114)


class ImageFormatError(ValueError):
    """Raised for unreadable, malformed or unsupported image files."""


@dataclass(frozen=True, eq=False)
class GrayImage:
    """Row-major grid of real-valued intensities (nominal range 0..255)."""

    pixels: np.ndarray

    def __post_init__(self):
        arr = np.array(self.pixels, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError(f"pixels must be 2-D, got shape {arr.shape}")
        h, w = arr.shape
        if w < 1 or h < 1:
            raise ValueError(f"zero-dimension image {w}x{h}")
        arr.setflags(write=False)
        object.__setattr__(self, "pixels", arr)

    @classmethod
    def from_list(cls, width: int, height: int, values) -> "GrayImage":
        values = np.asarray(values, dtype=np.float64)
        if values.size != width * height:
            raise ValueError("pixel count does not match width * height")
        return cls(values.reshape(height, width))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.pixels.shape

    @property
    def center(self) -> Tuple[float, float]:
        """Geometric center of the pixel grid, ((w-1)/2, (h-1)/2)."""
        return ((self.width - 1) / 2.0, (self.height - 1) / 2.0)

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.pixels, other.pixels))

    __hash__ = None


@dataclass(frozen=True)
class RotationSpec:
    """Rotation request: ``angle`` in degrees, positive is visually clockwise."""

    angle: float
    center: Optional[Tuple[float, float]] = None
    fill: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "angle", float(self.angle) % 360.0)


# ---------------------------------------------------------------------------
# Netpbm I/O
# ---------------------------------------------------------------------------

_MAGICS = {b"P2": (1, False), b"P3": (3, False), b"P5": (1, True), b"P6": (3, True)}


def _read_header(data: bytes):
    """Parse magic, width, height, maxval. Returns them plus the raster offset."""
    tokens = []
    pos = 0
    n = len(data)
    while len(tokens) < 4:
        while pos < n and data[pos : pos + 1].isspace():
            pos += 1
        if pos >= n:
            raise ImageFormatError("truncated header")
        if data[pos : pos + 1] == b"#":
            while pos < n and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos : pos + 1].isspace() and data[pos : pos + 1] != b"#":
            pos += 1
        tokens.append(data[start:pos])
    # exactly one whitespace byte separates maxval from a binary raster
    pos += 1
    magic = tokens[0]
    if magic not in _MAGICS:
        raise ImageFormatError(f"unsupported format {magic!r}")
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError as exc:
        raise ImageFormatError("malformed header") from exc
    return magic, width, height, maxval, pos


def _strip_comments(text: bytes) -> bytes:
    return b"\n".join(line.split(b"#", 1)[0] for line in text.splitlines())


def load_image(path: PathLike) -> GrayImage:
    """Read a PGM (P2/P5) or PPM (P3/P6) file.

    Color images are converted to luminance with the Rec. 601 weights.
    Samples are rescaled to the 0..255 range when maxval differs from 255.
    """
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise ImageFormatError(f"cannot read {path}: {exc}") from exc
    magic, width, height, maxval, offset = _read_header(data)
    if width <= 0 or height <= 0:
        raise ImageFormatError(f"zero-dimension image {width}x{height}")
    if not 0 < maxval < 65536:
        raise ImageFormatError(f"invalid maxval {maxval}")
    channels, binary = _MAGICS[magic]
    count = width * height * channels
    if binary:
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        raw = np.frombuffer(data, dtype=dtype, count=-1, offset=offset)
        if raw.size < count:
            raise ImageFormatError("truncated raster")
        samples = raw[:count].astype(np.float64)
    else:
        try:
            samples = np.array(_strip_comments(data[offset:]).split(), dtype=np.float64)
        except ValueError as exc:
            raise ImageFormatError("non-numeric sample in ASCII raster") from exc
        if samples.size < count:
            raise ImageFormatError("truncated raster")
        samples = samples[:count]
    if maxval != 255:
        samples = samples * (255.0 / maxval)
    if channels == 3:
        rgb = samples.reshape(height, width, 3)
        pixels = rgb @ np.array(LUMA_WEIGHTS)
    else:
        pixels = samples.reshape(height, width)
    try:
        return GrayImage(pixels)
    except ValueError as exc:
        raise ImageFormatError(str(exc)) from exc


def quantize(pixels: np.ndarray) -> np.ndarray:
    """Round half up and clip to 0..255 as uint8."""
    return np.clip(np.floor(np.asarray(pixels, dtype=np.float64) + 0.5), 0, 255).astype(np.uint8)


def save_image(img: GrayImage, path: PathLike, plain: bool = False) -> None:
    """Write ``img`` as a P5 PGM, or plain-text P2 when ``plain`` is set."""
    q = quantize(img.pixels)
    header = f"{'P2' if plain else 'P5'}\n{img.width} {img.height}\n255\n".encode()
    if plain:
        rows = [" ".join(str(v) for v in row) for row in q]
        body = ("\n".join(rows) + "\n").encode()
    else:
        body = q.tobytes()
    Path(path).write_bytes(header + body)


def save_ppm(rgb: np.ndarray, path: PathLike) -> None:
    """Write an (h, w, 3) array as binary P6."""
    q = quantize(rgb)
    h, w, _ = q.shape
    Path(path).write_bytes(f"P6\n{w} {h}\n255\n".encode() + q.tobytes())


# ---------------------------------------------------------------------------
# Geometry
# ---------------------------------------------------------------------------


def _cos_sin(angle_deg: float) -> Tuple[float, float]:
    # exact values on the quarter turns so 90/180/270 are pure permutations
    a = angle_deg % 360.0
    exact = {0.0: (1.0, 0.0), 90.0: (0.0, 1.0), 180.0: (-1.0, 0.0), 270.0: (0.0, -1.0)}
    if a in exact:
        return exact[a]
    t = math.radians(a)
    return math.cos(t), math.sin(t)


def bilinear_sample(pixels: np.ndarray, xs: np.ndarray, ys: np.ndarray, fill: float = 0.0) -> np.ndarray:
    """Sample ``pixels`` at real coordinates; points outside the grid get ``fill``."""
    h, w = pixels.shape
    eps = 1e-9
    inside = (xs >= -eps) & (xs <= w - 1 + eps) & (ys >= -eps) & (ys <= h - 1 + eps)
    xc = np.clip(xs, 0.0, w - 1.0)
    yc = np.clip(ys, 0.0, h - 1.0)
    x0 = np.minimum(np.floor(xc).astype(np.intp), max(w - 2, 0))
    y0 = np.minimum(np.floor(yc).astype(np.intp), max(h - 2, 0))
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = xc - x0
    fy = yc - y0
    p00 = pixels[y0, x0]
    p01 = pixels[y0, x1]
    p10 = pixels[y1, x0]
    p11 = pixels[y1, x1]
    top = p00 + (p01 - p00) * fx
    bottom = p10 + (p11 - p10) * fx
    out = top + (bottom - top) * fy
    return np.where(inside, out, fill)


def rotate_image(img: GrayImage, spec: RotationSpec) -> GrayImage:
    """Rotate ``img`` visually clockwise by ``spec.angle`` about ``spec.center``.

    Inverse mapping with bilinear interpolation: every output pixel p is read
    from the source at center + R(-angle) (p - center).
    """
    if spec.angle == 0.0:
        return img
    cx, cy = spec.center if spec.center is not None else img.center
    c, s = _cos_sin(spec.angle)
    ys, xs = np.mgrid[0 : img.height, 0 : img.width].astype(np.float64)
    dx = xs - cx
    dy = ys - cy
    # forward clockwise (screen, y down): (x, y) -> (c x - s y, s x + c y); invert it
    src_x = cx + c * dx + s * dy
    src_y = cy - s * dx + c * dy
    return GrayImage(bilinear_sample(img.pixels, src_x, src_y, spec.fill))


def rotate(img: GrayImage, angle: float, fill: float = 0.0) -> GrayImage:
    """Shorthand for a clockwise rotation about the grid center."""
    return rotate_image(img, RotationSpec(angle, fill=fill))


def circle_mask(width: int, height: int, center: Optional[Tuple[float, float]] = None) -> np.ndarray:
    """Boolean mask of the inscribed circle."""
    cx, cy = center if center is not None else ((width - 1) / 2.0, (height - 1) / 2.0)
    radius = min(width, height) / 2.0
    ys, xs = np.mgrid[0:height, 0:width]
    return (xs - cx) ** 2 + (ys - cy) ** 2 <= radius**2


def apply_circle_mask(img: GrayImage, fill: float = 0.0) -> GrayImage:
    """Replace everything outside the inscribed circle with ``fill``."""
    mask = circle_mask(img.width, img.height)
    return GrayImage(np.where(mask, img.pixels, fill))


def mirror_horizontal(img: GrayImage) -> GrayImage:
    """Mirror x about the vertical center line."""
    return GrayImage(img.pixels[:, ::-1])
