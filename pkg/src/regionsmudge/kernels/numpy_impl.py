"""Pure-numpy kernel implementations.

Reference path for the numba kernels in :mod:`numba_impl`. Every function
here must produce bit-identical output to its numba twin; the twins keep
the same arithmetic, the same accumulation order and the same rounding
(half-up via floor(x + 0.5)) so that replay results do not depend on the
selected backend.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "numpy"


def edt_sq(mask: np.ndarray) -> np.ndarray:
    """Exact squared Euclidean distance to the nearest True pixel.

    Two-pass transform: exact per-column distances, then a per-row
    minimisation over columns. All distances are between pixel centers,
    so the squared values are exact integers.
    """
    h, w = mask.shape
    big = h + w
    g = np.where(mask, 0, big).astype(np.int64)
    for y in range(1, h):
        np.minimum(g[y], g[y - 1] + 1, out=g[y])
    for y in range(h - 2, -1, -1):
        np.minimum(g[y], g[y + 1] + 1, out=g[y])
    f = g * g
    xs = np.arange(w, dtype=np.int64)
    # (x - x')^2 lookup shared by every row; w <= 8192 keeps this bounded
    sq = (xs[None, :] - xs[:, None]) ** 2
    d2 = np.empty((h, w), dtype=np.int64)
    for y in range(h):
        d2[y] = np.min(sq + f[y][:, None], axis=0)
    return d2


def label_from_adjacency(join_w: np.ndarray, join_n: np.ndarray) -> np.ndarray:
    """4-connected component labels from neighbor-join predicates.

    join_w[y, x] joins (y, x) with (y, x-1); join_n[y, x] joins with
    (y-1, x). Labels are consecutive from 0 in row-major first-occurrence
    order, which makes the result identical across backends.
    """
    h, w = join_w.shape
    n = h * w
    idx = np.arange(n, dtype=np.int64).reshape(h, w)
    ea = np.concatenate([idx[:, 1:][join_w[:, 1:]], idx[1:, :][join_n[1:, :]]])
    eb = np.concatenate([idx[:, :-1][join_w[:, 1:]], idx[:-1, :][join_n[1:, :]]])
    lab = np.arange(n, dtype=np.int64)
    while True:
        before = lab.copy()
        m = np.minimum(lab[ea], lab[eb])
        np.minimum.at(lab, ea, m)
        np.minimum.at(lab, eb, m)
        while True:
            nxt = lab[lab]
            if np.array_equal(nxt, lab):
                break
            lab = nxt
        if np.array_equal(lab, before):
            break
    return _canonical_labels(lab.reshape(h, w))


def _canonical_labels(roots: np.ndarray) -> np.ndarray:
    # min-propagation roots are the minimum flat index of each component,
    # so sorted root order equals row-major first-occurrence order
    _, inv = np.unique(roots.ravel(), return_inverse=True)
    return inv.astype(np.int32).reshape(roots.shape)


def stadium_mask(pts: np.ndarray, radius: float, h: int, w: int) -> np.ndarray:
    """Pixels whose center lies within `radius` of the polyline `pts`.

    pts is (n, 2) float64 in (x, y) pixel-center coordinates. Single
    point degenerates to a disk; the result is clipped to the grid.
    """
    out = np.zeros((h, w), dtype=bool)
    r2 = radius * radius
    n = pts.shape[0]
    for i in range(max(1, n - 1)):
        ax, ay = pts[i, 0], pts[i, 1]
        if n == 1:
            bx, by = ax, ay
        else:
            bx, by = pts[i + 1, 0], pts[i + 1, 1]
        x0 = max(0, int(np.ceil(min(ax, bx) - radius)))
        x1 = min(w - 1, int(np.floor(max(ax, bx) + radius)))
        y0 = max(0, int(np.ceil(min(ay, by) - radius)))
        y1 = min(h - 1, int(np.floor(max(ay, by) + radius)))
        if x0 > x1 or y0 > y1:
            continue
        px = np.arange(x0, x1 + 1, dtype=np.float64)[None, :]
        py = np.arange(y0, y1 + 1, dtype=np.float64)[:, None]
        dx = bx - ax
        dy = by - ay
        l2 = dx * dx + dy * dy
        if l2 == 0.0:
            d2 = (px - ax) ** 2 + (py - ay) ** 2
        else:
            t = ((px - ax) * dx + (py - ay) * dy) / l2
            t = np.minimum(1.0, np.maximum(0.0, t))
            cx = ax + t * dx
            cy = ay + t * dy
            d2 = (px - cx) ** 2 + (py - cy) ** 2
        out[y0 : y1 + 1, x0 : x1 + 1] |= d2 <= r2
    return out


def stamp(
    canvas: np.ndarray,
    mask: np.ndarray,
    data: np.ndarray,
    valid: np.ndarray,
    ax: int,
    ay: int,
    rbuf: int,
    cx: float,
    cy: float,
    radius: float,
    strength: float,
    pickup_rate: float,
) -> np.ndarray:
    """One smudge stamp at continuous center (cx, cy).

    For every masked pixel inside the brush disk: blend the canvas toward
    the pickup buffer by `strength`, then refresh the pickup cell from
    the blended pixel by `pickup_rate`. Invalid cells write nothing and
    are seeded from the (masked) canvas instead, so colors outside the
    mask can never enter the buffer. Returns the inclusive bounding box
    [y0, x0, y1, x1] of canvas writes, or all -1 if nothing was written.

    The buffer is anchored at integer canvas position (ax, ay); cell
    (rbuf, rbuf) corresponds to that pixel.
    """
    h, w = mask.shape
    x0 = max(0, int(np.ceil(cx - radius)))
    x1 = min(w - 1, int(np.floor(cx + radius)))
    y0 = max(0, int(np.ceil(cy - radius)))
    y1 = min(h - 1, int(np.floor(cy + radius)))
    bbox = np.full(4, -1, dtype=np.int64)
    if x0 > x1 or y0 > y1:
        return bbox
    px = np.arange(x0, x1 + 1, dtype=np.float64)[None, :]
    py = np.arange(y0, y1 + 1, dtype=np.float64)[:, None]
    inside = (px - cx) ** 2 + (py - cy) ** 2 <= radius * radius
    inside &= mask[y0 : y1 + 1, x0 : x1 + 1]
    if not inside.any():
        return bbox
    yy, xx = np.nonzero(inside)
    yy = yy + y0
    xx = xx + x0
    iy = yy - ay + rbuf
    ix = xx - ax + rbuf
    ok = (iy >= 0) & (iy < valid.shape[0]) & (ix >= 0) & (ix < valid.shape[1])
    yy, xx, iy, ix = yy[ok], xx[ok], iy[ok], ix[ok]
    if yy.size == 0:
        return bbox
    isvalid = valid[iy, ix] != 0
    wy, wx, wiy, wix = yy[isvalid], xx[isvalid], iy[isvalid], ix[isvalid]
    if wy.size:
        c = canvas[wy, wx].astype(np.float64)
        p = data[wiy, wix].astype(np.float64)
        blended = np.floor(c * (1.0 - strength) + p * strength + 0.5).astype(np.uint8)
        canvas[wy, wx] = blended
        refreshed = np.floor(
            p * (1.0 - pickup_rate) + blended.astype(np.float64) * pickup_rate + 0.5
        ).astype(np.uint8)
        data[wiy, wix] = refreshed
        bbox[0] = wy.min()
        bbox[1] = wx.min()
        bbox[2] = wy.max()
        bbox[3] = wx.max()
    sy, sx, siy, six = yy[~isvalid], xx[~isvalid], iy[~isvalid], ix[~isvalid]
    if sy.size:
        data[siy, six] = canvas[sy, sx]
        valid[siy, six] = 1
    return bbox


def mean_shift_modes(
    img: np.ndarray, hs: float, hc: float, max_iter: int, tol: float
) -> np.ndarray:
    """Per-pixel mean-shift modes over joint scaled (x, y, r, g, b) space.

    Flat kernel on the unit ball after scaling spatial axes by 1/hs and
    color axes by 1/hc. Each pixel iterates independently, so the result
    does not depend on pixel order. Returns (h, w, 3) mode colors in
    channel units.
    """
    h, w = img.shape[:2]
    wr = int(np.floor(hs)) + 1
    ys_x = (np.arange(w, dtype=np.float64)[None, :] / hs).repeat(h, axis=0)
    ys_y = (np.arange(h, dtype=np.float64)[:, None] / hs).repeat(w, axis=1)
    ys_c = img.astype(np.float64) / hc
    f0_c = img.astype(np.float64) / hc
    active = np.ones((h, w), dtype=bool)
    tol2 = tol * tol
    for _ in range(max_iter):
        if not active.any():
            break
        cx = np.floor(ys_x * hs + 0.5).astype(np.int64)
        cy = np.floor(ys_y * hs + 0.5).astype(np.int64)
        acc_x = np.zeros((h, w), dtype=np.float64)
        acc_y = np.zeros((h, w), dtype=np.float64)
        acc_c = np.zeros((h, w, 3), dtype=np.float64)
        cnt = np.zeros((h, w), dtype=np.int64)
        for dy in range(-wr, wr + 1):
            ny = cy + dy
            oky = (ny >= 0) & (ny < h)
            nyc = np.clip(ny, 0, h - 1)
            for dx in range(-wr, wr + 1):
                nx = cx + dx
                ok = oky & (nx >= 0) & (nx < w) & active
                nxc = np.clip(nx, 0, w - 1)
                fx = nxc.astype(np.float64) / hs
                fy = nyc.astype(np.float64) / hs
                fc = f0_c[nyc, nxc]
                d2 = (fx - ys_x) ** 2 + (fy - ys_y) ** 2
                d2 = d2 + ((fc - ys_c) ** 2).sum(axis=2)
                sel = ok & (d2 <= 1.0)
                acc_x[sel] += fx[sel]
                acc_y[sel] += fy[sel]
                acc_c[sel] += fc[sel]
                cnt[sel] += 1
        upd = active & (cnt > 0)
        # cnt == 0 means the point drifted away from every sample: stop there
        active &= cnt > 0
        safe = np.maximum(cnt, 1).astype(np.float64)
        nx_ = acc_x / safe
        ny_ = acc_y / safe
        nc_ = acc_c / safe[..., None]
        shift2 = (nx_ - ys_x) ** 2 + (ny_ - ys_y) ** 2 + ((nc_ - ys_c) ** 2).sum(axis=2)
        ys_x[upd] = nx_[upd]
        ys_y[upd] = ny_[upd]
        ys_c[upd] = nc_[upd]
        active &= shift2 > tol2
    return ys_c * hc
