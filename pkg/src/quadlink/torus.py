"""Zero contours of periodic functions on the flat torus ``[0, 2pi)^2``.

Marching squares on a cell-centred grid with wraparound in both directions;
crossing points are stitched into closed polylines by shared edge keys.
"""
from __future__ import annotations

import numpy as np

TWO_PI = 2.0 * np.pi


def torus_grid(n: int) -> np.ndarray:
    """Cell-centred samples ``(k + 1/2) * 2pi/n``; never hits 0 or pi exactly for even n."""
    return (np.arange(n) + 0.5) * (TWO_PI / n)


def _crossing(values, key):
    kind, i, j = key
    n = values.shape[0]
    v0 = values[i, j]
    if kind == "x":
        v1 = values[(i + 1) % n, j]
    else:
        v1 = values[i, (j + 1) % n]
    s = v0 / (v0 - v1)
    if kind == "x":
        return i + s, float(j)
    return float(i), j + s


def zero_contours(values: np.ndarray) -> list[np.ndarray]:
    """Closed zero-level polylines of a periodic ``n x n`` grid.

    Returns arrays of fractional grid indices ``(i, j)`` reduced mod ``n``.
    Grid values equal to zero count as positive.
    """
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    if values.shape != (n, n):
        raise ValueError("expected a square grid")
    pos = values > 0
    p00 = pos
    p10 = np.roll(pos, -1, axis=0)
    p11 = np.roll(p10, -1, axis=1)
    p01 = np.roll(pos, -1, axis=1)
    mixed = ~((p00 == p10) & (p10 == p11) & (p11 == p01))
    adj: dict[tuple, list[tuple]] = {}

    def link(e1, e2):
        adj.setdefault(e1, []).append(e2)
        adj.setdefault(e2, []).append(e1)

    for i, j in zip(*np.nonzero(mixed)):
        i, j = int(i), int(j)
        ip, jp = (i + 1) % n, (j + 1) % n
        bottom, right, top, left = ("x", i, j), ("y", ip, j), ("x", i, jp), ("y", i, j)
        c00, c10, c11, c01 = p00[i, j], p10[i, j], p11[i, j], p01[i, j]
        crossed = [e for e, hit in ((bottom, c00 != c10), (right, c10 != c11), (top, c11 != c01), (left, c01 != c00)) if hit]
        if len(crossed) == 2:
            link(*crossed)
            continue
        # saddle cell: decide with the cell-centre mean
        centre = 0.25 * (values[i, j] + values[ip, j] + values[ip, jp] + values[i, jp]) > 0
        if centre == c00:
            link(bottom, right)
            link(top, left)
        else:
            link(bottom, left)
            link(right, top)

    contours = []
    seen: set[tuple] = set()
    for start in sorted(adj):
        if start in seen:
            continue
        loop = [start]
        seen.add(start)
        prev, cur = None, start
        while True:
            nbrs = adj[cur]
            nxt = nbrs[0] if nbrs[0] != prev or len(nbrs) == 1 else nbrs[1]
            if nxt == start or nxt in seen:
                break
            loop.append(nxt)
            seen.add(nxt)
            prev, cur = cur, nxt
        contours.append(np.array([_crossing(values, k) for k in loop]) % n)
    return contours


def index_to_angle(idx: np.ndarray, n: int) -> np.ndarray:
    """Map fractional indices on :func:`torus_grid` to angles in ``[0, 2pi)``."""
    return np.mod((np.asarray(idx) + 0.5) * (TWO_PI / n), TWO_PI)


def wrapped_steps(xy: np.ndarray) -> np.ndarray:
    """Successive steps of a closed torus polyline, each reduced to ``(-pi, pi]``."""
    d = np.roll(xy, -1, axis=0) - xy
    return (d + np.pi) % TWO_PI - np.pi


def homology_class(xy: np.ndarray) -> tuple[int, int]:
    """Winding numbers of a closed torus polyline in the two angle directions."""
    steps = wrapped_steps(xy)
    w = np.sum(steps, axis=0) / TWO_PI
    return int(round(w[0])), int(round(w[1]))
