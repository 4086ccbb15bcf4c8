import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from regionsmudge.raster import RasterImage


FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


@pytest.fixture
def halves_64():
    """64x64 canvas, red left half, blue right half."""
    img = RasterImage.filled(64, 64, (200, 40, 40, 255))
    img.pixels[:, 32:] = (40, 40, 200, 255)
    return img


@pytest.fixture
def three_bands_96():
    """96x96 canvas with three vertical color bands of width 32."""
    img = RasterImage.filled(96, 96, (220, 60, 40, 255))
    img.pixels[:, 32:64] = (60, 200, 80, 255)
    img.pixels[:, 64:] = (50, 60, 220, 255)
    return img


def random_partition(rng, w, h, kind="rects"):
    """Random flat-color partition for fixture canvases.

    rects: recursive axis-aligned splits. blobs: nearest-seed cells
    (4-connected pieces become separate regions downstream).
    """
    colors = rng.integers(30, 226, size=(12, 3))
    img = np.zeros((h, w, 4), dtype=np.uint8)
    img[..., 3] = 255
    if kind == "rects":
        cells = [(0, 0, w, h)]
        for _ in range(int(rng.integers(2, 6))):
            idx = int(rng.integers(0, len(cells)))
            x, y, cw, ch = cells.pop(idx)
            if cw >= ch and cw >= 8:
                cut = int(rng.integers(4, cw - 3))
                cells += [(x, y, cut, ch), (x + cut, y, cw - cut, ch)]
            elif ch >= 8:
                cut = int(rng.integers(4, ch - 3))
                cells += [(x, y, cw, cut), (x, y + cut, cw, ch - cut)]
            else:
                cells.append((x, y, cw, ch))
        for i, (x, y, cw, ch) in enumerate(cells):
            img[y : y + ch, x : x + cw, :3] = colors[i % len(colors)]
    else:
        k = int(rng.integers(3, 7))
        seeds = np.stack(
            [rng.integers(0, w, size=k), rng.integers(0, h, size=k)], axis=1
        )
        xs, ys = np.meshgrid(np.arange(w), np.arange(h))
        d = (xs[..., None] - seeds[:, 0]) ** 2 + (ys[..., None] - seeds[:, 1]) ** 2
        owner = np.argmin(d, axis=2)
        for i in range(k):
            img[owner == i, :3] = colors[i % len(colors)]
    return RasterImage(img)


def random_window(rng, w, h, max_samples=8):
    """Random stroke window staying within the grid."""
    from regionsmudge.stroke import StrokeSample

    n = int(rng.integers(1, max_samples + 1))
    x = float(rng.uniform(4, w - 4))
    y = float(rng.uniform(4, h - 4))
    samples = [StrokeSample(x, y, 0.0)]
    for i in range(1, n):
        x = float(np.clip(x + rng.uniform(-10, 10), 0, w - 1))
        y = float(np.clip(y + rng.uniform(-10, 10), 0, h - 1))
        samples.append(StrokeSample(x, y, i * 8.0))
    return samples
