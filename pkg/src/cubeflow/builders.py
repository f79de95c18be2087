"""Build geometric cochains on torus grids from global coordinates.

Global coordinates on a grid of shape ``(k_1, ..., k_n)`` live in
``R^n / (k_1 Z x ... x k_n Z)``; the top cube with lower corner ``c`` covers
``c + [0,1]^n``.  Co-orientations are given globally and translated into each
cube's local frame, which may be reflected along wrap-around axes.
"""
from __future__ import annotations

import itertools
from typing import Sequence

import numpy as np

from .complex import TorusGrid
from .geometric import GeoCochain, GeometryError, GraphPiece, axis_frame, det_sign

_EPS = 1e-12


def _split_segment(a: np.ndarray, b: np.ndarray) -> list[float]:
    """Parameters in [0, 1] where the segment crosses integer hyperplanes."""
    taus = {0.0, 1.0}
    for i in range(len(a)):
        if abs(b[i] - a[i]) < _EPS:
            continue
        lo, hi = sorted((a[i], b[i]))
        for m in range(int(np.floor(lo)), int(np.ceil(hi)) + 1):
            tau = (m - a[i]) / (b[i] - a[i])
            if _EPS < tau < 1 - _EPS:
                taus.add(float(tau))
    return sorted(taus)


def _corner(grid: TorusGrid, mid: np.ndarray) -> tuple[int, ...]:
    return tuple(int(np.floor(m)) % k for m, k in zip(mid, grid.shape))


def _on_wall(x: np.ndarray) -> bool:
    return bool(np.any(np.abs(x - np.round(x)) < 1e-12))


def global_polyline(grid: TorusGrid, points: Sequence[Sequence[float]], sign: int = 1) -> GeoCochain:
    """A polyline given by global vertices, cut along the grid into graph pieces.

    The co-orientation ``nu`` satisfies ``sign det[direction of travel | nu] > 0``
    in global coordinates.  A polyline whose last vertex equals its first
    (modulo the grid) is closed up.
    """
    pts = [np.asarray(p, dtype=float) for p in points]
    n = len(grid.shape)
    if len(pts) < 2:
        raise GeometryError("a polyline needs two vertices")
    shape = np.array(grid.shape, dtype=float)
    diff = (pts[-1] - pts[0]) / shape
    closed = np.allclose(diff, np.round(diff), atol=1e-12)
    # walk the polyline, splitting at every grid wall
    runs: list[tuple[tuple[int, ...], list[np.ndarray]]] = []
    for a, b in zip(pts, pts[1:]):
        taus = _split_segment(a, b)
        for t0, t1 in zip(taus, taus[1:]):
            p0, p1 = a + t0 * (b - a), a + t1 * (b - a)
            corner = _corner(grid, 0.5 * (p0 + p1))
            if runs and runs[-1][0] == corner and not _on_wall(p0):
                runs[-1][1].append(p1)
            else:
                runs.append((corner, [p0, p1]))
    if closed and len(runs) > 1 and runs[0][0] == runs[-1][0] and not _on_wall(pts[0]):
        corner, last = runs.pop()
        runs[0] = (corner, last + runs[0][1][1:])
    pieces = []
    for corner, chain in runs:
        local = np.array([grid.global_to_local(corner, p) for p in chain])
        steps = np.diff(local, axis=0)
        signs = np.sign(steps)
        best = None
        for ax in range(n):
            if np.all(signs[:, ax] == signs[0, ax]) and signs[0, ax] != 0:
                score = np.abs(steps[:, ax]).min()
                if best is None or score > best[0]:
                    best = (score, ax)
        if best is None:
            raise GeometryError(f"polyline is not a graph over a single axis inside cube {corner}")
        ax = best[1] + 1
        comp = [a for a in range(1, n + 1) if a != ax]
        R = grid.local_reflection(corner)
        T = steps[0][:, None]
        s = int(sign) * det_sign(R) * det_sign(np.hstack([T, axis_frame(n, comp)]))
        cells = [(i, i + 1) for i in range(len(local) - 1)]
        pieces.append(GraphPiece(grid.top_at[corner], (ax,), local, cells, s))
    return GeoCochain(grid.complex, n - 1, pieces)


def global_flat_hyperplane(grid: TorusGrid, axis: int, value: float, sign: int = 1) -> GeoCochain:
    """The closed hypersurface ``x_axis = value`` co-oriented by ``sign * e_axis``."""
    n = len(grid.shape)
    k = grid.shape[axis - 1]
    value = float(value) % k
    if abs(value - round(value)) < 1e-9:
        raise GeometryError("the hyperplane must avoid the grid walls")
    layer = int(np.floor(value))
    others = [a for a in range(1, n + 1) if a != axis]
    pieces = []
    for corner, cube in sorted(grid.top_at.items()):
        if corner[axis - 1] != layer:
            continue
        h = grid.global_to_local(corner, [c + 0.5 for c in corner[:axis - 1]] + [value]
                                 + [c + 0.5 for c in corner[axis:]])[axis - 1]
        nodes, cells = _flat_cell_mesh(n, axis, h)
        r = -1 if grid.reversed_axes(corner)[axis - 1] else 1
        pieces.append(GraphPiece(cube, tuple(others), nodes, cells, int(sign) * r))
    return GeoCochain(grid.complex, 1, pieces)


def _flat_cell_mesh(n: int, axis: int, height: float):
    """Nodes and cells of the slice ``x_axis = height`` of ``I^n``, triangulated."""
    m = n - 1
    corners = list(itertools.product((0.0, 1.0), repeat=m))
    nodes = []
    for c in corners:
        x = list(c)
        x.insert(axis - 1, height)
        nodes.append(x)
    if m == 1:
        cells = [(0, 1)]
    elif m == 2:
        cells = [(0, 1, 3), (0, 2, 3)]
    else:
        raise GeometryError("flat hyperplanes are supported in dimension 2 and 3")
    return np.array(nodes), cells


def _cube_slabs(grid: TorusGrid, lo: Sequence[float], hi: Sequence[float], axes: Sequence[int]):
    """Per top-cube corner ranges, the clip of the box ``[lo, hi]`` (over ``axes``) by each cube."""
    ranges = []
    for a, l, h in zip(axes, lo, hi):
        k = grid.shape[a - 1]
        if not 0 <= l < h <= k:
            raise GeometryError(f"box range [{l}, {h}] on axis {a} must lie within [0, {k}]")
        cuts = sorted({l, h} | {float(m) for m in range(int(np.ceil(l)), int(np.floor(h)) + 1)
                                if l < m < h})
        ranges.append([(c0, c1, int(np.floor(0.5 * (c0 + c1)))) for c0, c1 in zip(cuts, cuts[1:])])
    return itertools.product(*ranges)


def _kuhn(m: int) -> list[tuple[int, ...]]:
    """Kuhn triangulation of ``[0,1]^m``; nodes indexed by their binary corner mask."""
    cells = []
    for perm in itertools.permutations(range(m)):
        mask, cell = 0, [0]
        for a in perm:
            mask |= 1 << a
            cell.append(mask)
        cells.append(tuple(cell))
    return cells


def _box_mesh(bounds: Sequence[tuple[float, float]]):
    m = len(bounds)
    nodes = [[bounds[a][mask >> a & 1] for a in range(m)] for mask in range(1 << m)]
    return np.array(nodes, dtype=float), _kuhn(m)


def global_flat_patch(grid: TorusGrid, axis: int, value: float, lo: Sequence[float],
                      hi: Sequence[float], sign: int = 1) -> GeoCochain:
    """The box ``lo <= x_others <= hi`` inside ``x_axis = value``, co-oriented by ``sign * e_axis``."""
    n = len(grid.shape)
    others = [a for a in range(1, n + 1) if a != axis]
    k = grid.shape[axis - 1]
    value = float(value) % k
    if abs(value - round(value)) < 1e-9:
        raise GeometryError("the patch must avoid the grid walls")
    layer = int(np.floor(value))
    pieces = []
    for slab in _cube_slabs(grid, lo, hi, others):
        gnodes, cells = _box_mesh([(c0, c1) for c0, c1, _ in slab])
        gnodes = np.insert(gnodes, axis - 1, value, axis=1)
        corner = [0] * n
        for a, (_, _, c) in zip(others, slab):
            corner[a - 1] = c
        corner[axis - 1] = layer
        corner = tuple(corner)
        local = np.array([grid.global_to_local(corner, p) for p in gnodes])
        r = -1 if grid.reversed_axes(corner)[axis - 1] else 1
        pieces.append(GraphPiece(grid.top_at[corner], tuple(others), local, cells, int(sign) * r))
    return GeoCochain(grid.complex, 1, pieces)


def global_box(grid: TorusGrid, lo: Sequence[float], hi: Sequence[float], sign: int = 1) -> GeoCochain:
    """The codimension-zero region ``lo <= x <= hi`` with co-orientation ``sign``."""
    n = len(grid.shape)
    axes = list(range(1, n + 1))
    pieces = []
    for slab in _cube_slabs(grid, lo, hi, axes):
        gnodes, cells = _box_mesh([(c0, c1) for c0, c1, _ in slab])
        corner = tuple(c for _, _, c in slab)
        local = np.array([grid.global_to_local(corner, p) for p in gnodes])
        pieces.append(GraphPiece(grid.top_at[corner], tuple(axes), local, cells, int(sign)))
    return GeoCochain(grid.complex, 0, pieces)
