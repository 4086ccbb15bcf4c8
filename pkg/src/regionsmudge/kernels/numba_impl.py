"""Numba-accelerated kernels, bit-compatible with :mod:`numpy_impl`.

Same arithmetic, same accumulation order, same rounding. fastmath stays
off everywhere so float results match the numpy path exactly.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

BACKEND_NAME = "numba"


@njit(cache=True, parallel=True)
def _edt_sq_impl(mask):
    h, w = mask.shape
    big = h + w
    g = np.empty((h, w), np.int64)
    for x in prange(w):
        d = big
        for y in range(h):
            d = 0 if mask[y, x] else min(d + 1, big)
            g[y, x] = d
        d = big
        for y in range(h - 1, -1, -1):
            d = 0 if mask[y, x] else min(d + 1, big)
            if d < g[y, x]:
                g[y, x] = d
    d2 = np.empty((h, w), np.int64)
    for y in prange(h):
        f = np.empty(w, np.int64)
        for x in range(w):
            f[x] = g[y, x] * g[y, x]
        v = np.empty(w, np.int64)
        z = np.empty(w + 1, np.float64)
        k = 0
        v[0] = 0
        z[0] = -np.inf
        z[1] = np.inf
        for q in range(1, w):
            s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2 * q - 2 * v[k])
            while s <= z[k]:
                k -= 1
                s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2 * q - 2 * v[k])
            k += 1
            v[k] = q
            z[k] = s
            z[k + 1] = np.inf
        k = 0
        for x in range(w):
            while z[k + 1] < x:
                k += 1
            dx = x - v[k]
            d2[y, x] = dx * dx + f[v[k]]
    return d2


def edt_sq(mask: np.ndarray) -> np.ndarray:
    return _edt_sq_impl(np.ascontiguousarray(mask))


@njit(cache=True)
def _label_impl(join_w, join_n):
    h, w = join_w.shape
    n = h * w
    parent = np.arange(n, dtype=np.int64)
    for y in range(h):
        for x in range(w):
            i = y * w + x
            if x > 0 and join_w[y, x]:
                ra = i
                while parent[ra] != ra:
                    ra = parent[ra]
                rb = i - 1
                while parent[rb] != rb:
                    rb = parent[rb]
                if ra != rb:
                    if ra < rb:
                        parent[rb] = ra
                    else:
                        parent[ra] = rb
            if y > 0 and join_n[y, x]:
                ra = i
                while parent[ra] != ra:
                    ra = parent[ra]
                rb = i - w
                while parent[rb] != rb:
                    rb = parent[rb]
                if ra != rb:
                    if ra < rb:
                        parent[rb] = ra
                    else:
                        parent[ra] = rb
    out = np.empty((h, w), np.int32)
    remap = np.full(n, -1, np.int64)
    nxt = 0
    for i in range(n):
        r = i
        while parent[r] != r:
            r = parent[r]
        parent[i] = r
        if remap[r] < 0:
            remap[r] = nxt
            nxt += 1
        out[i // w, i % w] = remap[r]
    return out


def label_from_adjacency(join_w: np.ndarray, join_n: np.ndarray) -> np.ndarray:
    return _label_impl(np.ascontiguousarray(join_w), np.ascontiguousarray(join_n))


@njit(cache=True)
def _stadium_impl(pts, radius, h, w):
    out = np.zeros((h, w), np.bool_)
    r2 = radius * radius
    n = pts.shape[0]
    nseg = n - 1 if n > 1 else 1
    for i in range(nseg):
        ax = pts[i, 0]
        ay = pts[i, 1]
        if n == 1:
            bx = ax
            by = ay
        else:
            bx = pts[i + 1, 0]
            by = pts[i + 1, 1]
        x0 = max(0, int(np.ceil(min(ax, bx) - radius)))
        x1 = min(w - 1, int(np.floor(max(ax, bx) + radius)))
        y0 = max(0, int(np.ceil(min(ay, by) - radius)))
        y1 = min(h - 1, int(np.floor(max(ay, by) + radius)))
        if x0 > x1 or y0 > y1:
            continue
        dx = bx - ax
        dy = by - ay
        l2 = dx * dx + dy * dy
        for py in range(y0, y1 + 1):
            for px in range(x0, x1 + 1):
                if out[py, px]:
                    continue
                if l2 == 0.0:
                    ddx = px - ax
                    ddy = py - ay
                    d2 = ddx * ddx + ddy * ddy
                else:
                    t = ((px - ax) * dx + (py - ay) * dy) / l2
                    t = min(1.0, max(0.0, t))
                    cx = ax + t * dx
                    cy = ay + t * dy
                    ddx = px - cx
                    ddy = py - cy
                    d2 = ddx * ddx + ddy * ddy
                if d2 <= r2:
                    out[py, px] = True
    return out


def stadium_mask(pts: np.ndarray, radius: float, h: int, w: int) -> np.ndarray:
    return _stadium_impl(np.ascontiguousarray(pts), float(radius), h, w)


@njit(cache=True)
def _stamp_impl(canvas, mask, data, valid, ax, ay, rbuf, cx, cy, radius, strength, pickup_rate):
    h, w = mask.shape
    x0 = max(0, int(np.ceil(cx - radius)))
    x1 = min(w - 1, int(np.floor(cx + radius)))
    y0 = max(0, int(np.ceil(cy - radius)))
    y1 = min(h - 1, int(np.floor(cy + radius)))
    bbox = np.full(4, -1, np.int64)
    r2 = radius * radius
    sh, sw = valid.shape
    for py in range(y0, y1 + 1):
        for px in range(x0, x1 + 1):
            ddx = px - cx
            ddy = py - cy
            if ddx * ddx + ddy * ddy > r2:
                continue
            if not mask[py, px]:
                continue
            iy = py - ay + rbuf
            ix = px - ax + rbuf
            if iy < 0 or iy >= sh or ix < 0 or ix >= sw:
                continue
            if valid[iy, ix] != 0:
                for c in range(4):
                    cv = float(canvas[py, px, c])
                    pv = float(data[iy, ix, c])
                    b = np.floor(cv * (1.0 - strength) + pv * strength + 0.5)
                    canvas[py, px, c] = np.uint8(b)
                    r = np.floor(pv * (1.0 - pickup_rate) + b * pickup_rate + 0.5)
                    data[iy, ix, c] = np.uint8(r)
                if bbox[0] < 0:
                    bbox[0] = py
                    bbox[1] = px
                    bbox[2] = py
                    bbox[3] = px
                else:
                    if py < bbox[0]:
                        bbox[0] = py
                    if px < bbox[1]:
                        bbox[1] = px
                    if py > bbox[2]:
                        bbox[2] = py
                    if px > bbox[3]:
                        bbox[3] = px
            else:
                for c in range(4):
                    data[iy, ix, c] = canvas[py, px, c]
                valid[iy, ix] = 1
    return bbox


def stamp(canvas, mask, data, valid, ax, ay, rbuf, cx, cy, radius, strength, pickup_rate):
    return _stamp_impl(
        canvas, mask, data, valid,
        int(ax), int(ay), int(rbuf),
        float(cx), float(cy), float(radius), float(strength), float(pickup_rate),
    )


@njit(cache=True, parallel=True)
def _mean_shift_impl(img, hs, hc, max_iter, tol):
    h, w = img.shape[:2]
    wr = int(np.floor(hs)) + 1
    tol2 = tol * tol
    modes = np.empty((h, w, 3), np.float64)
    for p in prange(h * w):
        py = p // w
        px = p % w
        yx = px / hs
        yy = py / hs
        c0 = img[py, px, 0] / hc
        c1 = img[py, px, 1] / hc
        c2 = img[py, px, 2] / hc
        for _ in range(max_iter):
            cxi = int(np.floor(yx * hs + 0.5))
            cyi = int(np.floor(yy * hs + 0.5))
            ax = 0.0
            ay = 0.0
            a0 = 0.0
            a1 = 0.0
            a2 = 0.0
            cnt = 0
            for dy in range(-wr, wr + 1):
                ny = cyi + dy
                if ny < 0 or ny >= h:
                    continue
                for dx in range(-wr, wr + 1):
                    nx = cxi + dx
                    if nx < 0 or nx >= w:
                        continue
                    fx = nx / hs
                    fy = ny / hs
                    f0 = img[ny, nx, 0] / hc
                    f1 = img[ny, nx, 1] / hc
                    f2 = img[ny, nx, 2] / hc
                    t1 = (fx - yx) ** 2 + (fy - yy) ** 2
                    t2 = ((f0 - c0) ** 2 + (f1 - c1) ** 2) + (f2 - c2) ** 2
                    if t1 + t2 <= 1.0:
                        ax += fx
                        ay += fy
                        a0 += f0
                        a1 += f1
                        a2 += f2
                        cnt += 1
            if cnt == 0:
                break
            s = float(cnt)
            nx_ = ax / s
            ny_ = ay / s
            n0 = a0 / s
            n1 = a1 / s
            n2 = a2 / s
            shift2 = (nx_ - yx) ** 2 + (ny_ - yy) ** 2 + (
                ((n0 - c0) ** 2 + (n1 - c1) ** 2) + (n2 - c2) ** 2
            )
            yx = nx_
            yy = ny_
            c0 = n0
            c1 = n1
            c2 = n2
            if shift2 <= tol2:
                break
        modes[py, px, 0] = c0 * hc
        modes[py, px, 1] = c1 * hc
        modes[py, px, 2] = c2 * hc
    return modes


def mean_shift_modes(img: np.ndarray, hs: float, hc: float, max_iter: int, tol: float) -> np.ndarray:
    return _mean_shift_impl(
        np.ascontiguousarray(img, dtype=np.float64), float(hs), float(hc), int(max_iter), float(tol)
    )
