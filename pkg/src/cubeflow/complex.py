"""Ordered cubical complexes, torus grids and point bookkeeping.

A cube is stored as the list of its ``2^d`` vertices in binary-counting order:
position ``b`` holds the vertex whose characteristic image has ones exactly at
the set bits of ``b`` (bit ``k-1`` <-> local coordinate ``k``).
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .cube import FacePartition, VertexSet, enumerate_faces

SNAP_TOL = 1e-9


class ComplexError(ValueError):
    """Raised when a complex fails validation or its JSON is malformed."""

    def __init__(self, message: str, report: list[str] | None = None):
        self.report = list(report or [])
        if self.report:
            message = message + ":\n  " + "\n  ".join(self.report)
        super().__init__(message)


@dataclass(frozen=True)
class CanonicalPoint:
    cube: int
    coords: tuple[float, ...]

    def close_to(self, other: "CanonicalPoint", tol: float) -> bool:
        return self.cube == other.cube and all(
            abs(a - b) <= tol for a, b in zip(self.coords, other.coords))


class CubicalComplex:
    """Cubes over a vertex poset; immutable once constructed."""

    def __init__(self, vertex_ids: Sequence[str], order: Iterable[tuple[int, int]],
                 cubes: Sequence[Sequence[int]]):
        self.vertex_ids: tuple[str, ...] = tuple(vertex_ids)
        self.order: tuple[tuple[int, int], ...] = tuple((int(a), int(b)) for a, b in order)
        self.cubes: tuple[tuple[int, ...], ...] = tuple(tuple(int(v) for v in c) for c in cubes)
        self.dims: tuple[int, ...] = tuple(_log2(len(c)) for c in self.cubes)
        self._index: dict[frozenset[int], int] = {}
        for cid, verts in enumerate(self.cubes):
            self._index.setdefault(frozenset(verts), cid)
        self._memo: dict = {}

    def memo(self, key, build):
        """Derived table ``build()``, computed once per complex under ``key``."""
        if key not in self._memo:
            self._memo[key] = build()
        return self._memo[key]

    # -- basic queries -------------------------------------------------

    @property
    def top_dim(self) -> int:
        return max(d for d in self.dims if d >= 0) if self.cubes else 0

    def dim(self, cube: int) -> int:
        return self.dims[cube]

    def cubes_of_dim(self, d: int) -> list[int]:
        return [c for c, k in enumerate(self.dims) if k == d]

    def counts(self) -> list[int]:
        return [len(self.cubes_of_dim(d)) for d in range(self.top_dim + 1)]

    def euler_characteristic(self) -> int:
        return sum((-1) ** d * n for d, n in enumerate(self.counts()))

    def cube_with_vertices(self, verts: Iterable[int]) -> int | None:
        return self._index.get(frozenset(verts))

    def face_vertices(self, cube: int, face: FacePartition) -> tuple[int, ...]:
        verts = self.cubes[cube]
        return tuple(verts[v.ones_mask] for v in face.vertices())

    def face_cube(self, cube: int, face: FacePartition) -> int:
        if face.n != self.dims[cube]:
            raise ValueError(f"face of I^{face.n} used on a {self.dims[cube]}-cube")
        cid = self._index.get(frozenset(self.face_vertices(cube, face)))
        if cid is None:
            raise ComplexError(f"cube {cube} is missing its face {face}")
        return cid

    def faces_of(self, cube: int, d: int) -> list[tuple[int, FacePartition]]:
        """Every ``d``-face of ``cube`` with the partition locating it in local coordinates."""
        n = self.dims[cube]
        if not 0 <= d <= n:
            raise ValueError(f"face dimension {d} outside 0..{n}")
        return [(self.face_cube(cube, f), f) for f in enumerate_faces(n, d)]

    @cached_property
    def cofaces(self) -> dict[int, tuple[tuple[int, FacePartition], ...]]:
        """For each cube, the top-dimensional cubes containing it and where."""
        table: dict[int, list[tuple[int, FacePartition]]] = {}
        top = self.top_dim
        for c in self.cubes_of_dim(top):
            for f in enumerate_faces(top):
                table.setdefault(self.face_cube(c, f), []).append((c, f))
        return {k: tuple(v) for k, v in table.items()}

    @cached_property
    def shared_faces(self) -> list[tuple[tuple[int, FacePartition], tuple[int, FacePartition]]]:
        """Pairs of top cubes glued along a codimension-one face."""
        out = []
        top = self.top_dim
        for face_id, owners in self.cofaces.items():
            if self.dims[face_id] != top - 1:
                continue
            for a, b in itertools.combinations(owners, 2):
                out.append((a, b))
        return out

    # -- geometry of points ------------------------------------------------

    def canonical_point(self, cube: int, coords: Sequence[float], tol: float = SNAP_TOL
                        ) -> tuple[CanonicalPoint, FacePartition]:
        """Locate the open face containing a point given in ``cube``'s local coordinates."""
        x = np.asarray(coords, dtype=float)
        n = self.dims[cube]
        if x.shape != (n,):
            raise ValueError(f"expected {n} coordinates, got {x.shape}")
        if np.any(x < -tol) or np.any(x > 1 + tol):
            raise ValueError(f"point {x.tolist()} lies outside its cube beyond tol={tol}")
        f0 = [i + 1 for i in range(n) if x[i] <= tol]
        f1 = [i + 1 for i in range(n) if x[i] >= 1 - tol]
        free = [i + 1 for i in range(n) if tol < x[i] < 1 - tol]
        face = FacePartition.of(n, f0, free, f1)
        cid = self.face_cube(cube, face)
        local = tuple(float(x[i - 1]) for i in free)
        return CanonicalPoint(cid, local), face

    def transition(self, a: int, face_a: FacePartition, b: int, face_b: FacePartition) -> np.ndarray:
        """Linear map from ``a``'s local coordinates to ``b``'s across a shared facet."""
        n = self.dims[a]
        if self.face_cube(a, face_a) != self.face_cube(b, face_b):
            raise ValueError("faces do not coincide")
        if face_a.dim != n - 1:
            raise ValueError("transition needs a codimension-one face")
        J = np.zeros((n, n))
        for ia, ib in zip(face_a.free, face_b.free):
            J[ib - 1, ia - 1] = 1.0
        (ba,), (bb,) = face_a.bound, face_b.bound
        ea, eb = face_a.bound_value(ba), face_b.bound_value(bb)
        J[bb - 1, ba - 1] = -(1 - 2 * ea) * (1 - 2 * eb)
        return J

    # -- validation -----------------------------------------------------------

    @cached_property
    def _below(self) -> list[set[int]]:
        """Reflexive-transitive closure of the covering relation: ``_below[w]`` = {v : v <= w}."""
        up: dict[int, list[int]] = {}
        for a, b in self.order:
            up.setdefault(a, []).append(b)
        nv = len(self.vertex_ids)
        above = []
        for v in range(nv):
            seen = {v}
            stack = [v]
            while stack:
                u = stack.pop()
                for w in up.get(u, ()):
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
            above.append(seen)
        below = [set() for _ in range(nv)]
        for v, ups in enumerate(above):
            for w in ups:
                below[w].add(v)
        return below

    def leq(self, v: int, w: int) -> bool:
        return v in self._below[w]

    def validate(self) -> list[str]:
        """Check both cubical-complex axioms; an empty list means valid."""
        report: list[str] = []
        nv = len(self.vertex_ids)
        if len(set(self.vertex_ids)) != nv:
            report.append("duplicate vertex ids")
        for a, b in self.order:
            if not (0 <= a < nv and 0 <= b < nv):
                report.append(f"order pair ({a}, {b}) references unknown vertices")
                return report
        for v in range(nv):
            for w in self._below[v]:
                if w != v and v in self._below[w]:
                    report.append(f"order relation has a cycle through "
                                  f"{self.vertex_ids[v]} and {self.vertex_ids[w]}")
                    return report
        seen: dict[frozenset[int], int] = {}
        for cid, verts in enumerate(self.cubes):
            d = self.dims[cid]
            if d < 0:
                report.append(f"cube {cid}: {len(verts)} vertices is not a power of two")
                continue
            if any(not 0 <= v < nv for v in verts):
                report.append(f"cube {cid}: unknown vertex")
                continue
            key = frozenset(verts)
            if len(key) != len(verts):
                report.append(f"cube {cid}: repeated vertex, vertex set has size {len(key)} "
                              f"instead of {len(verts)}")
                continue
            if key in seen:
                report.append(f"cube {cid}: same vertex set as cube {seen[key]}")
                continue
            seen[key] = cid
        if report:
            return report
        for v in range(nv):
            if frozenset([v]) not in self._index:
                report.append(f"vertex {self.vertex_ids[v]} is not a cube")
        for cid, verts in enumerate(self.cubes):
            for i, j in itertools.permutations(range(len(verts)), 2):
                if self.leq(verts[i], verts[j]) and i & ~j:
                    report.append(f"cube {cid}: characteristic map not order-preserving "
                                  f"({self.vertex_ids[verts[i]]} <= {self.vertex_ids[verts[j]]})")
                    break
            d = self.dims[cid]
            for face in enumerate_faces(d):
                fv = self.face_vertices(cid, face)
                rho = self._index.get(frozenset(fv))
                interval = (sorted(face.initial_vertex().ones), sorted(face.terminal_vertex().ones))
                if rho is None:
                    report.append(f"cube {cid}: interval {interval} has no cube")
                elif self.cubes[rho] != fv:
                    report.append(f"cube {cid}: interval {interval} is cube {rho} but the "
                                  f"characteristic maps do not commute")
        return report

    def check(self) -> "CubicalComplex":
        report = self.validate()
        if report:
            raise ComplexError("invalid cubical complex", report)
        return self

    # -- serialization ----------------------------------------------------------

    def to_json(self) -> dict:
        ids = self.vertex_ids
        return {
            "dimension_top": self.top_dim,
            "vertices": [{"id": v} for v in ids],
            "order": [[ids[a], ids[b]] for a, b in self.order],
            "cubes": [{"dim": d, "verts": [ids[v] for v in c]} for c, d in zip(self.cubes, self.dims)],
        }

    @classmethod
    def from_json(cls, data: dict) -> "CubicalComplex":
        try:
            ids = [str(v["id"]) for v in data["vertices"]]
            pos = {v: i for i, v in enumerate(ids)}
            order = [(pos[a], pos[b]) for a, b in data["order"]]
            cubes = []
            for k, c in enumerate(data["cubes"]):
                verts = [pos[v] for v in c["verts"]]
                if len(verts) != 2 ** int(c["dim"]):
                    raise ComplexError(f"cube {k}: dim {c['dim']} needs {2 ** int(c['dim'])} vertices")
                cubes.append(verts)
            top = int(data["dimension_top"])
        except (KeyError, TypeError) as exc:
            raise ComplexError(f"malformed complex JSON: {exc!r}") from exc
        cx = cls(ids, order, cubes).check()
        if cx.top_dim != top:
            raise ComplexError(f"dimension_top is {top} but the cubes reach {cx.top_dim}")
        return cx

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=1))

    @classmethod
    def load(cls, path: str | Path) -> "CubicalComplex":
        return cls.from_json(json.loads(Path(path).read_text()))

    def __eq__(self, other):
        if not isinstance(other, CubicalComplex):
            return NotImplemented
        return (self.vertex_ids, self.cubes, set(self.order)) == \
            (other.vertex_ids, other.cubes, set(other.order))

    def __hash__(self):
        return hash((self.vertex_ids, self.cubes))

    def __repr__(self):
        return f"CubicalComplex(counts={self.counts()})"


def _log2(k: int) -> int:
    d = k.bit_length() - 1
    return d if k > 0 and 1 << d == k else -1


def single_cube(n: int) -> CubicalComplex:
    """The standard n-cube with all of its faces."""
    ids = ["".join(str(b) for b in v.coords()) or "pt" for v in
           (VertexSet(n, m) for m in range(1 << n))]
    order = [(m, m | 1 << i) for m in range(1 << n) for i in range(n) if not m >> i & 1]
    cubes = [[v.ones_mask for v in f.vertices()] for f in enumerate_faces(n)]
    return CubicalComplex(ids, order, cubes)


@dataclass
class TorusGrid:
    """A product of cycle graphs ``Z/k_1 x ... x Z/k_n`` cubulating the n-torus.

    The vertex order is the componentwise order on grid coordinates
    ``0..k_i-1``.  Along an axis, a cube whose lower corner sits at ``k_i-1``
    wraps around, and its local coordinate runs against the global one.
    """

    shape: tuple[int, ...]
    complex: CubicalComplex
    vertex_at: dict[tuple[int, ...], int] = field(repr=False)
    top_at: dict[tuple[int, ...], int] = field(repr=False)

    def reversed_axes(self, corner: Sequence[int]) -> tuple[bool, ...]:
        return tuple(c == k - 1 for c, k in zip(corner, self.shape))

    def corner_of(self, cube: int) -> tuple[int, ...]:
        return self._corner_of[cube]

    @cached_property
    def _corner_of(self) -> dict[int, tuple[int, ...]]:
        return {c: k for k, c in self.top_at.items()}

    def global_to_local(self, corner: Sequence[int], g: Sequence[float]) -> np.ndarray:
        """Local coordinates in the top cube at ``corner`` of a global point near it."""
        out = np.empty(len(self.shape))
        for i, (c, k) in enumerate(zip(corner, self.shape)):
            u = (g[i] - c) % k
            if u > k - 0.5:  # a point on the lower wall expressed from above
                u -= k
            out[i] = 1.0 - u if c == k - 1 else u
        return out

    def local_to_global(self, corner: Sequence[int], x: Sequence[float]) -> np.ndarray:
        out = np.empty(len(self.shape))
        for i, (c, k) in enumerate(zip(corner, self.shape)):
            out[i] = c + (1.0 - x[i] if c == k - 1 else x[i])
        return out

    def local_reflection(self, corner: Sequence[int]) -> np.ndarray:
        """Jacobian of the global-to-local coordinate change (a diagonal of signs)."""
        return np.diag([-1.0 if r else 1.0 for r in self.reversed_axes(corner)])


def torus_grid(shape: Sequence[int]) -> TorusGrid:
    shape = tuple(int(k) for k in shape)
    if not shape:
        raise ValueError("need at least one axis")
    for k in shape:
        if k < 3:
            raise ValueError(f"torus grids need at least 3 subdivisions per axis (got {k}); "
                             "with fewer, distinct cubes would share a vertex set")
    n = len(shape)
    points = list(itertools.product(*(range(k) for k in shape)))
    vertex_at = {p: i for i, p in enumerate(points)}
    ids = ["v" + "_".join(map(str, p)) for p in points]
    order = []
    for p in points:
        for i in range(n):
            if p[i] < shape[i] - 1:
                q = list(p)
                q[i] += 1
                order.append((vertex_at[p], vertex_at[tuple(q)]))
    cubes = []
    top_at = {}
    for d in range(n + 1):
        for axes in itertools.combinations(range(n), d):
            for p in points:
                verts = []
                for b in range(1 << d):
                    q = list(p)
                    for k, ax in enumerate(axes):
                        if b >> k & 1:
                            # local "1" is the larger grid coordinate of the pair
                            q[ax] = p[ax] + 1 if p[ax] < shape[ax] - 1 else p[ax]
                        elif p[ax] == shape[ax] - 1:
                            q[ax] = 0
                    verts.append(vertex_at[tuple(q)])
                if d == n:
                    top_at[p] = len(cubes)
                cubes.append(verts)
    cx = CubicalComplex(ids, order, cubes)
    return TorusGrid(shape, cx, vertex_at, top_at)


def build_torus_grid(shape: Sequence[int]) -> CubicalComplex:
    return torus_grid(shape).complex
