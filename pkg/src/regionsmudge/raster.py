"""Pixel-grid primitives: RGBA canvas, point sets, blending, distances.

Coordinates are (x, y) with x as column and y as row; masks and pixel
arrays are indexed [y, x]. Distances are measured between pixel centers,
which sit at integer coordinates; sub-pixel positions are rounded to the
nearest center before any set query.
"""

from __future__ import annotations

import math
from typing import Iterable, NamedTuple

import numpy as np
from PIL import Image

from . import kernels

RGBA = tuple[int, int, int, int]

MAX_DIM = 8192


class PixelPos(NamedTuple):
    x: int
    y: int


class PointSet:
    """Membership bitmap over a pixel grid with a cached cardinality.

    Instances are treated as immutable values; set operations return new
    sets and are exact.
    """

    __slots__ = ("mask", "_count")

    def __init__(self, mask: np.ndarray):
        mask = np.asarray(mask, dtype=bool)
        if mask.ndim != 2:
            raise ValueError("point set mask must be 2-D")
        self.mask = mask
        self._count = int(np.count_nonzero(mask))

    @classmethod
    def empty(cls, shape: tuple[int, int]) -> "PointSet":
        return cls(np.zeros(shape, dtype=bool))

    @classmethod
    def full(cls, shape: tuple[int, int]) -> "PointSet":
        return cls(np.ones(shape, dtype=bool))

    @classmethod
    def from_points(cls, shape: tuple[int, int], points: Iterable[tuple[int, int]]) -> "PointSet":
        m = np.zeros(shape, dtype=bool)
        for x, y in points:
            m[y, x] = True
        return cls(m)

    @property
    def shape(self) -> tuple[int, int]:
        return self.mask.shape

    @property
    def cardinality(self) -> int:
        return self._count

    def __len__(self) -> int:
        return self._count

    def __bool__(self) -> bool:
        return self._count > 0

    def __contains__(self, pos: tuple[int, int]) -> bool:
        x, y = pos
        h, w = self.mask.shape
        return 0 <= x < w and 0 <= y < h and bool(self.mask[y, x])

    def __and__(self, other: "PointSet") -> "PointSet":
        return PointSet(self.mask & other.mask)

    def __or__(self, other: "PointSet") -> "PointSet":
        return PointSet(self.mask | other.mask)

    def __sub__(self, other: "PointSet") -> "PointSet":
        return PointSet(self.mask & ~other.mask)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PointSet):
            return NotImplemented
        return self.mask.shape == other.mask.shape and bool(np.array_equal(self.mask, other.mask))

    def __hash__(self):  # pragma: no cover - sets are not meant as dict keys
        raise TypeError("PointSet is unhashable")

    def issubset(self, other: "PointSet") -> bool:
        return not np.any(self.mask & ~other.mask)

    def points(self) -> list[PixelPos]:
        ys, xs = np.nonzero(self.mask)
        return [PixelPos(int(x), int(y)) for x, y in zip(xs, ys)]

    def __repr__(self) -> str:
        h, w = self.mask.shape
        return f"PointSet({w}x{h}, {self._count} px)"


class RasterImage:
    """RGBA pixel grid, 8 bits per channel, row-major.

    Single-writer contract: at most one mutator at a time; `snapshot()`
    copies may be shared freely across threads.
    """

    __slots__ = ("pixels",)

    def __init__(self, pixels: np.ndarray):
        pixels = np.asarray(pixels)
        if pixels.ndim != 3 or pixels.shape[2] != 4 or pixels.dtype != np.uint8:
            raise ValueError("expected (h, w, 4) uint8 pixels")
        h, w = pixels.shape[:2]
        if not (1 <= w <= MAX_DIM and 1 <= h <= MAX_DIM):
            raise ValueError(f"image dimensions must be within 1..{MAX_DIM}")
        self.pixels = pixels

    @classmethod
    def filled(cls, width: int, height: int, color: RGBA = (0, 0, 0, 255)) -> "RasterImage":
        px = np.empty((height, width, 4), dtype=np.uint8)
        px[:] = np.asarray(color, dtype=np.uint8)
        return cls(px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.pixels.shape[:2]

    def get(self, x: int, y: int) -> RGBA:
        r, g, b, a = self.pixels[y, x]
        return (int(r), int(g), int(b), int(a))

    def put(self, x: int, y: int, color: RGBA) -> None:
        self.pixels[y, x] = color

    def snapshot(self) -> "RasterImage":
        return RasterImage(self.pixels.copy())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RasterImage):
            return NotImplemented
        return bool(np.array_equal(self.pixels, other.pixels))

    def __repr__(self) -> str:
        return f"RasterImage({self.width}x{self.height})"


def lerp_color(a: RGBA, b: RGBA, t: float) -> RGBA:
    """Blend two RGBA colors; each channel rounds half-up.

    t must lie in [0, 1]; out-of-range values are rejected, not clamped.
    """
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"blend fraction {t} outside [0, 1]")
    return tuple(int(math.floor(ca * (1.0 - t) + cb * t + 0.5)) for ca, cb in zip(a, b))


def distance_transform(points: PointSet) -> np.ndarray:
    """Exact Euclidean distance from every pixel to the nearest set pixel.

    Set pixels map to 0. Raises on an empty set.
    """
    if not points:
        raise ValueError("no boundary pixels")
    return np.sqrt(kernels.edt_sq(points.mask).astype(np.float64))


def dilate(points: PointSet, radius: float) -> PointSet:
    """Grow a point set by a Euclidean disk of the given radius.

    Defined as {p : distance_transform(points)(p) <= radius}, so the two
    operations agree exactly by construction. The empty set stays empty.
    """
    if radius < 0:
        raise ValueError("dilation radius must be >= 0")
    if not points:
        return PointSet.empty(points.shape)
    return PointSet(distance_transform(points) <= radius)


def load_png(path) -> RasterImage:
    """Load a PNG as 8-bit RGBA."""
    with Image.open(path) as im:
        return RasterImage(np.asarray(im.convert("RGBA"), dtype=np.uint8).copy())


def save_png(image: RasterImage, path) -> None:
    """Write 8-bit RGBA PNG; identical pixels produce identical bytes."""
    Image.fromarray(image.pixels, mode="RGBA").save(path, format="PNG")
