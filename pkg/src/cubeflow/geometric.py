"""Geometric cochains built from co-oriented coordinate-graph pieces.

A :class:`GraphPiece` is a simplicial mesh inside one top cube (local
coordinates) that is the graph of a piecewise-linear map over the coordinate
plane spanned by ``base_axes``.  Its co-orientation is the frame
``normal_sign * (e_j for j not in base_axes, ascending)``.

Crossing signs: at a point of ``W`` on a complementary face ``E`` with tangent
basis ``T``, the sign is ``+1`` exactly when ``det[T | normal frame]`` and
``det[T | free axes of E]`` agree in sign.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Sequence

import numpy as np

from .cochains import IntCochain
from .complex import CubicalComplex
from .cube import FacePartition, enumerate_faces

ROOT_TOL = 1e-7    # a root this close to the boundary of its face is rejected
RANK_TOL = 1e-9    # singular-value floor for transversality
SNAP_TOL = 1e-9    # node coordinates this close to 0 or 1 count as on the wall
LAMBDA_TOL = 1e-12
MAX_GEOMETRIC_DIM = 3


class GeometryError(ValueError):
    pass


class TransversalityError(GeometryError):
    pass


def det_sign(M: np.ndarray) -> int:
    if M.shape[0] == 0:
        return 1
    sign, logdet = np.linalg.slogdet(M)
    if sign == 0 or not np.isfinite(logdet):
        raise TransversalityError("degenerate frame (zero determinant)")
    return int(sign)


def axis_frame(d: int, axes: Sequence[int]) -> np.ndarray:
    """Columns ``e_a`` for the given 1-based axes, in order."""
    M = np.zeros((d, len(axes)))
    for k, a in enumerate(axes):
        M[a - 1, k] = 1.0
    return M


# -- overlap of projected simplices (graph-form check) -----------------------------

def _separating_axes(S: np.ndarray) -> list[np.ndarray]:
    p = S.shape[1]
    if p == 1:
        return [np.ones(1)]
    edges = [S[j] - S[i] for i, j in itertools.combinations(range(len(S)), 2)]
    if p == 2:
        return [np.array([-e[1], e[0]]) for e in edges]
    out = []
    for k in range(len(S)):
        face = np.delete(S, k, axis=0)
        out.append(np.cross(face[1] - face[0], face[2] - face[0]))
    return out


def _interiors_overlap(S: np.ndarray, Q: np.ndarray, tol: float) -> bool:
    p = S.shape[1]
    axes = _separating_axes(S) + _separating_axes(Q)
    if p == 3:
        es = [S[j] - S[i] for i, j in itertools.combinations(range(4), 2)]
        eq = [Q[j] - Q[i] for i, j in itertools.combinations(range(4), 2)]
        axes = axes + [np.cross(a, b) for a in es for b in eq]
    for ax in axes:
        n = np.linalg.norm(ax)
        if n < 1e-14:
            continue
        a, b = S @ ax / n, Q @ ax / n
        if min(a.max(), b.max()) - max(a.min(), b.min()) <= tol:
            return False
    return True


# -- pieces --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GraphPiece:
    cube: int
    base_axes: tuple[int, ...]
    nodes: np.ndarray
    cells: tuple[tuple[int, ...], ...]
    normal_sign: int = 1

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=float, ndmin=2)
        object.__setattr__(self, "base_axes", tuple(int(a) for a in self.base_axes))
        object.__setattr__(self, "cells", tuple(tuple(int(i) for i in c) for c in self.cells))
        d = nodes.shape[1]
        p = len(self.base_axes)
        if not 1 <= d <= MAX_GEOMETRIC_DIM:
            raise GeometryError(f"geometric pieces live in cubes of dimension 1..{MAX_GEOMETRIC_DIM}, not {d}")
        if list(self.base_axes) != sorted(set(self.base_axes)) or any(not 1 <= a <= d for a in self.base_axes):
            raise GeometryError(f"base axes {self.base_axes} must be ascending, distinct, within 1..{d}")
        if self.normal_sign not in (1, -1):
            raise GeometryError("normal_sign must be +1 or -1")
        if np.any(nodes < -SNAP_TOL) or np.any(nodes > 1 + SNAP_TOL):
            raise GeometryError("piece nodes leave the unit cube")
        nodes = np.clip(nodes, 0.0, 1.0)
        nodes[np.abs(nodes) <= SNAP_TOL] = 0.0
        nodes[np.abs(nodes - 1) <= SNAP_TOL] = 1.0
        nodes.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        if not self.cells:
            raise GeometryError("piece has no cells")
        if p == 0 and len(self.cells) != 1:
            raise GeometryError("a point piece has exactly one cell")
        for k, cell in enumerate(self.cells):
            if len(cell) != p + 1 or len(set(cell)) != p + 1:
                raise GeometryError(f"cell {k} must list {p + 1} distinct nodes")
            if any(not 0 <= i < len(nodes) for i in cell):
                raise GeometryError(f"cell {k} references a missing node")
            if p and abs(np.linalg.det(self._projected(k)[1:] - self._projected(k)[0])) <= 1e-14:
                raise GeometryError(f"cell {k} is degenerate or not a graph over axes {self.base_axes}")
        self._check_projection_injective()

    # geometry
    @property
    def d(self) -> int:
        return self.nodes.shape[1]

    @property
    def dim(self) -> int:
        return len(self.base_axes)

    @property
    def codim(self) -> int:
        return self.d - self.dim

    @property
    def complement_axes(self) -> tuple[int, ...]:
        return tuple(a for a in range(1, self.d + 1) if a not in self.base_axes)

    def cell_points(self, k: int) -> np.ndarray:
        return self.nodes[list(self.cells[k])]

    def _projected(self, k: int) -> np.ndarray:
        return self.cell_points(k)[:, [a - 1 for a in self.base_axes]]

    def cell_tangent(self, k: int) -> np.ndarray:
        P = self.cell_points(k)
        return (P[1:] - P[0]).T

    def slope(self, k: int) -> np.ndarray:
        """Derivative of the graph map on cell ``k`` (complement rows by base columns)."""
        T = self.cell_tangent(k)
        A = [a - 1 for a in self.base_axes]
        C = [a - 1 for a in self.complement_axes]
        if not A:
            return np.zeros((len(C), 0))
        return np.linalg.solve(T[A].T, T[C].T).T

    def normal_frame(self) -> np.ndarray:
        N = axis_frame(self.d, self.complement_axes)
        if N.shape[1]:
            N[:, 0] *= self.normal_sign
        return N

    def coorientation_sign(self, T: np.ndarray) -> int:
        """Sign of ``det[T | normal frame]`` for a tangent basis ``T`` (columns)."""
        return self.normal_sign * det_sign(np.hstack([T, axis_frame(self.d, self.complement_axes)]))

    def _check_projection_injective(self) -> None:
        p = self.dim
        if p == 0 or len(self.cells) < 2:
            return
        proj = [self._projected(k) for k in range(len(self.cells))]
        lo = [s.min(axis=0) for s in proj]
        hi = [s.max(axis=0) for s in proj]
        for i, j in itertools.combinations(range(len(proj)), 2):
            if np.any(np.minimum(hi[i], hi[j]) - np.maximum(lo[i], lo[j]) <= 1e-12):
                continue
            if _interiors_overlap(proj[i], proj[j], 1e-12):
                raise GeometryError(f"cells {i} and {j} overlap over the base plane; not a graph")

    # facets
    @cached_property
    def facet_cells(self) -> dict[tuple[int, ...], list[tuple[int, int]]]:
        """Facet (sorted node tuple) -> [(cell, opposite node)]."""
        table: dict[tuple[int, ...], list[tuple[int, int]]] = {}
        if self.dim == 0:
            return table
        for k, cell in enumerate(self.cells):
            for opp in cell:
                key = tuple(sorted(i for i in cell if i != opp))
                table.setdefault(key, []).append((k, opp))
        return table

    def boundary_facets(self) -> list[tuple[tuple[int, ...], int, int]]:
        out = []
        for key, owners in self.facet_cells.items():
            if len(owners) == 1:
                out.append((key, owners[0][0], owners[0][1]))
            elif len(owners) > 2:
                raise GeometryError(f"facet {key} is shared by {len(owners)} cells; mesh is not a manifold")
        return out

    def wall_of(self, facet: Sequence[int]) -> tuple[int, int] | None:
        """The cube wall ``(axis, value)`` containing a facet, if any."""
        P = self.nodes[list(facet)]
        for i in range(self.d):
            for eps in (0.0, 1.0):
                if np.all(P[:, i] == eps):
                    return i + 1, int(eps)
        return None

    def with_sign(self, sign: int) -> "GraphPiece":
        return GraphPiece(self.cube, self.base_axes, self.nodes, self.cells, sign)

    def to_json(self) -> dict:
        return {"cube": self.cube, "base_axes": list(self.base_axes),
                "nodes": self.nodes.tolist(), "cells": [list(c) for c in self.cells],
                "normal_sign": self.normal_sign}

    @classmethod
    def from_json(cls, data: dict) -> "GraphPiece":
        return cls(int(data["cube"]), tuple(data["base_axes"]), data["nodes"],
                   tuple(tuple(c) for c in data["cells"]), int(data.get("normal_sign", 1)))


# -- solving against faces ---------------------------------------------------------------

def _constraints(P: np.ndarray, face: FacePartition, slack: float):
    """Linear inequalities ``A lam <= b`` for cell points within ``slack`` of ``face``'s bound values."""
    p = P.shape[0] - 1
    D = (P[1:] - P[0]).T
    rows, rhs = [], []
    for k in range(p):
        r = np.zeros(p)
        r[k] = -1.0
        rows.append(r)
        rhs.append(0.0)
    rows.append(np.ones(p))
    rhs.append(1.0)
    for i in face.bound:
        e = face.bound_value(i)
        rows.append(D[i - 1])
        rhs.append(e - P[0, i - 1] + slack)
        rows.append(-D[i - 1])
        rhs.append(P[0, i - 1] - e + slack)
    return np.array(rows).reshape(len(rows), p), np.array(rhs)


def cell_meets_face(P: np.ndarray, face: FacePartition, slack: float = SNAP_TOL) -> bool:
    """Whether the simplex with vertices ``P`` comes within ``slack`` of the closed face."""
    p = P.shape[0] - 1
    if p == 0:
        return all(abs(P[0, i - 1] - face.bound_value(i)) <= slack for i in face.bound)
    A, b = _constraints(P, face, slack)
    # a nonempty bounded polytope has a vertex: try every choice of p active constraints
    for active in itertools.combinations(range(len(b)), p):
        M = A[list(active)]
        if abs(np.linalg.det(M)) < 1e-14:
            continue
        lam = np.linalg.solve(M, b[list(active)])
        if np.all(A @ lam <= b + 1e-12):
            return True
    return False


def solve_cell(P: np.ndarray, face: FacePartition) -> np.ndarray | None:
    """Point of the simplex ``P`` whose bound coordinates equal ``face``'s, if any.

    The face must have as many bound coordinates as the simplex has dimensions.
    """
    p = P.shape[0] - 1
    bound = [i - 1 for i in face.bound]
    if len(bound) != p:
        raise ValueError("face is not complementary to the cell")
    if p == 0:
        return P[0].copy()
    D = (P[1:] - P[0]).T
    eps = np.array([face.bound_value(i + 1) for i in bound], dtype=float)
    M = D[bound]
    try:
        lam = np.linalg.solve(M, eps - P[0, bound])
    except np.linalg.LinAlgError:
        if cell_meets_face(P, face):
            raise TransversalityError("cell meets a complementary face non-transversally")
        return None
    if np.any(lam < -LAMBDA_TOL) or lam.sum() > 1 + LAMBDA_TOL:
        return None
    x = P[0] + D @ lam
    x[bound] = eps
    return x


def crossing_sign(piece: GraphPiece, cell: int, face: FacePartition) -> int:
    """Sign of the crossing of ``piece`` with ``face`` on ``cell`` (reduced determinant)."""
    A = [a - 1 for a in piece.base_axes]
    C = [a - 1 for a in piece.complement_axes]
    beta = axis_frame(piece.d, face.free)
    G = piece.slope(cell)
    return piece.normal_sign * det_sign(beta[C] - G @ beta[A])


def crossing_sign_by_determinants(T: np.ndarray, normal: np.ndarray, beta_E: np.ndarray) -> int:
    """Reference rule: compare ``det[T | normal]`` with ``det[T | beta_E]``."""
    return det_sign(np.hstack([T, normal])) * det_sign(np.hstack([T, beta_E]))


@dataclass(frozen=True)
class SignedPoint:
    face_cube: int
    face_coords: tuple[float, ...]
    sign: int
    top_cube: int
    coords: tuple[float, ...]
    piece: int
    cell: int


@dataclass
class SignedPointSet:
    points: list[SignedPoint] = field(default_factory=list)

    @property
    def signed_cardinality(self) -> int:
        return sum(p.sign for p in self.points)

    def __len__(self):
        return len(self.points)

    def add(self, pt: SignedPoint, key: np.ndarray, tol: float) -> None:
        for other, okey in zip(self.points, self._keys):
            if other.face_cube == pt.face_cube and np.max(np.abs(okey - key), initial=0.0) <= tol:
                if other.sign != pt.sign:
                    raise GeometryError(
                        f"point {pt.face_coords} of cube {pt.face_cube} gets sign {other.sign} from "
                        f"piece {other.piece} but {pt.sign} from piece {pt.piece}")
                return
        self.points.append(pt)
        self._keys.append(key)

    def __post_init__(self):
        self._keys: list[np.ndarray] = [np.array(p.face_coords) for p in self.points]


# -- cochains ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FacetRef:
    piece: int
    nodes: tuple[int, ...]

    def to_json(self):
        return {"piece": self.piece, "facet": list(self.nodes)}

    @classmethod
    def from_json(cls, data):
        return cls(int(data["piece"]), tuple(sorted(int(i) for i in data["facet"])))


class GeoCochain:
    """A formal sum of co-oriented graph pieces of one codimension."""

    def __init__(self, complex: CubicalComplex, codim: int, pieces: Sequence[GraphPiece],
                 matching: Sequence[tuple[FacetRef, FacetRef]] | None = None):
        self.complex = complex
        self.codim = int(codim)
        self.pieces: tuple[GraphPiece, ...] = tuple(pieces)
        top = complex.top_dim
        for i, pc in enumerate(self.pieces):
            if not 0 <= pc.cube < len(complex.cubes) or complex.dim(pc.cube) != top:
                raise GeometryError(f"piece {i} sits in cube {pc.cube}, which is not top-dimensional")
            if pc.d != top:
                raise GeometryError(f"piece {i} has {pc.d} coordinates, cubes have {top}")
            if pc.codim != self.codim:
                raise GeometryError(f"piece {i} has codimension {pc.codim}, expected {self.codim}")
        auto, self.unmatched_walls = self._match_walls()
        if matching is not None:
            given = {frozenset(pair) for pair in matching}
            if given != {frozenset(pair) for pair in auto}:
                raise GeometryError("declared facet matching disagrees with the geometry")
        self.matching: tuple[tuple[FacetRef, FacetRef], ...] = tuple(auto)

    @property
    def dim(self) -> int:
        return self.complex.top_dim - self.codim

    # facets on walls and their partners
    def wall_facets(self) -> list[tuple[FacetRef, int, int, tuple[int, int]]]:
        out = []
        for i, pc in enumerate(self.pieces):
            for key, cell, opp in pc.boundary_facets():
                wall = pc.wall_of(key)
                if wall is not None:
                    out.append((FacetRef(i, key), cell, opp, wall))
        return out

    def free_facets(self) -> list[tuple[FacetRef, int, int]]:
        out = []
        for i, pc in enumerate(self.pieces):
            for key, cell, opp in pc.boundary_facets():
                if pc.wall_of(key) is None:
                    out.append((FacetRef(i, key), cell, opp))
        return out

    def _canonical_nodes(self, ref: FacetRef) -> list:
        pc = self.pieces[ref.piece]
        return [self.complex.canonical_point(pc.cube, pc.nodes[n])[0] for n in ref.nodes]

    def _match_walls(self):
        walls = self.wall_facets()
        canon = [self._canonical_nodes(w[0]) for w in walls]
        partner: dict[int, int] = {}
        for a, b in itertools.combinations(range(len(walls)), 2):
            if a in partner or b in partner:
                continue
            ca, cb = canon[a], canon[b]
            if all(any(x.close_to(y, ROOT_TOL) for y in cb) for x in ca) and \
                    all(any(y.close_to(x, ROOT_TOL) for x in ca) for y in cb):
                partner[a], partner[b] = b, a
        pairs = [(walls[a][0], walls[b][0]) for a, b in partner.items() if a < b]
        unmatched = [walls[a][0] for a in range(len(walls)) if a not in partner]
        return pairs, unmatched

    def _wall_record(self, ref: FacetRef):
        for w in self.wall_facets():
            if w[0] == ref:
                return w
        raise KeyError(ref)

    def _matched_coorientations_agree(self, ra: FacetRef, rb: FacetRef) -> bool:
        _, cell_a, opp_a, wall_a = self._wall_record(ra)
        _, cell_b, opp_b, wall_b = self._wall_record(rb)
        pa, pb = self.pieces[ra.piece], self.pieces[rb.piece]
        d = pa.d
        fa = _wall_face(d, *wall_a)
        fb = _wall_face(d, *wall_b)
        J = self.complex.transition(pa.cube, fa, pb.cube, fb)
        Pf = pa.nodes[list(ra.nodes)]
        Tf = (Pf[1:] - Pf[0]).T
        in_a = pa.nodes[opp_a] - Pf[0]
        in_b = pb.nodes[opp_b] - pb.nodes[rb.nodes[0]]
        qa = det_sign(np.hstack([Tf, -in_a[:, None], pa.normal_frame()]))
        qb = det_sign(np.hstack([J @ Tf, in_b[:, None], pb.normal_frame()]))
        return det_sign(J) * qa == qb

    # validation
    def validate_transverse(self) -> list[str]:
        report: list[str] = []
        d = self.complex.top_dim
        proper = [f for f in enumerate_faces(d) if f.dim < d]
        for i, pc in enumerate(self.pieces):
            p = pc.dim
            wall_nodes = set()
            for key, _, _ in pc.boundary_facets():
                if pc.wall_of(key) is not None:
                    wall_nodes.update(key)
            for k in range(len(pc.cells)):
                P = pc.cell_points(k)
                Q = np.linalg.qr(pc.cell_tangent(k))[0] if p else np.zeros((d, 0))
                for face in proper:
                    if not cell_meets_face(P, face):
                        continue
                    depth = len(face.bound)
                    if depth > p:
                        report.append(f"piece {i} cell {k} meets the depth-{depth} face {face} "
                                      f"of its cube (piece dimension {p})")
                        continue
                    sv = np.linalg.svd(Q[[j - 1 for j in face.bound]], compute_uv=False)
                    if sv.size and sv.min() <= RANK_TOL:
                        report.append(f"piece {i} cell {k} is tangent to face {face} "
                                      f"(smallest singular value {sv.min():.3g})")
                for n in pc.cells[k]:
                    if n not in wall_nodes and np.any((pc.nodes[n] == 0.0) | (pc.nodes[n] == 1.0)):
                        report.append(f"piece {i} node {n} touches a wall of its cube away from "
                                      f"any facet lying in that wall")
        for ref in self.unmatched_walls:
            report.append(f"piece {ref.piece} facet {list(ref.nodes)} lies in a cube wall but "
                          f"has no partner across it")
        for ra, rb in self.matching:
            try:
                agree = self._matched_coorientations_agree(ra, rb)
            except ValueError as exc:
                report.append(f"cannot compare pieces {ra.piece} and {rb.piece} across their "
                              f"shared facet: {exc}")
                continue
            if not agree:
                report.append(f"co-orientations of piece {ra.piece} and piece {rb.piece} disagree "
                              f"across their shared facet")
        return list(dict.fromkeys(report))

    def check(self) -> "GeoCochain":
        report = self.validate_transverse()
        if report:
            raise TransversalityError("geometric cochain is not transverse:\n  " + "\n  ".join(report))
        return self

    # algebra
    def reversed(self) -> "GeoCochain":
        return GeoCochain(self.complex, self.codim, [p.with_sign(-p.normal_sign) for p in self.pieces])

    def __neg__(self):
        return self.reversed()

    def __add__(self, other: "GeoCochain") -> "GeoCochain":
        if other.codim != self.codim:
            raise GeometryError("cannot add cochains of different codimension")
        return GeoCochain(self.complex, self.codim, self.pieces + other.pieces)

    # serialisation
    def to_json(self) -> dict:
        return {"codim": self.codim, "pieces": [p.to_json() for p in self.pieces],
                "matching": [[a.to_json(), b.to_json()] for a, b in self.matching]}

    @classmethod
    def from_json(cls, complex: CubicalComplex, data: dict) -> "GeoCochain":
        try:
            pieces = [GraphPiece.from_json(p) for p in data["pieces"]]
            matching = None
            if data.get("matching"):
                matching = [(FacetRef.from_json(a), FacetRef.from_json(b)) for a, b in data["matching"]]
            return cls(complex, int(data["codim"]), pieces, matching)
        except (KeyError, TypeError) as exc:
            raise GeometryError(f"malformed geometric cochain JSON: {exc!r}") from exc

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=1))

    @classmethod
    def load(cls, complex: CubicalComplex, path: str | Path) -> "GeoCochain":
        return cls.from_json(complex, json.loads(Path(path).read_text()))

    def __repr__(self):
        return f"GeoCochain(codim={self.codim}, pieces={len(self.pieces)})"


def _wall_face(d: int, axis: int, value: int) -> FacePartition:
    rest = [a for a in range(1, d + 1) if a != axis]
    return FacePartition.of(d, [axis] if value == 0 else [], rest, [axis] if value == 1 else [])


# -- boundary ----------------------------------------------------------------------------

def boundary_geo(W: GeoCochain) -> GeoCochain:
    """Free boundary facets of ``W`` as pieces of one higher codimension.

    Each facet's co-orientation is the inward-pointing vector of the facet in
    its cell followed by the normal frame of the piece.
    """
    pieces = []
    for ref, cell, opp in W.free_facets():
        pc = W.pieces[ref.piece]
        Pf = pc.nodes[list(ref.nodes)]
        d, q = pc.d, len(ref.nodes) - 1
        Tf = (Pf[1:] - Pf[0]).T
        inward = pc.nodes[opp] - Pf[0]
        best, base = -1.0, None
        for axes in itertools.combinations(range(1, d + 1), q):
            v = abs(np.linalg.det(Tf[[a - 1 for a in axes]])) if q else 1.0
            if v > best + 1e-15:
                best, base = v, axes
        if best <= 1e-14:
            raise GeometryError(f"facet {list(ref.nodes)} of piece {ref.piece} is degenerate")
        comp = [a for a in range(1, d + 1) if a not in base]
        induced = det_sign(np.hstack([Tf, inward[:, None], pc.normal_frame()]))
        sign = induced * det_sign(np.hstack([Tf, axis_frame(d, comp)]))
        pieces.append(GraphPiece(pc.cube, base, Pf, (tuple(range(q + 1)),), sign))
    return GeoCochain(W.complex, W.codim + 1, pieces)


# -- intersections ----------------------------------------------------------------------

def _base_and_time(W):
    return (W.base, W.time) if hasattr(W, "time") else (W, 0.0)


def intersection_points(W, cube: int | None = None) -> SignedPointSet:
    """Signed points where ``W`` (possibly flowed) meets complementary cubes.

    With ``cube`` given, only that cube is considered.  The logistic flow maps
    each face to itself and has a positive diagonal derivative, so a flowed
    cochain meets each face in the flowed points with unchanged signs.
    """
    from .flow import flow_point  # local import keeps module layering acyclic

    base, t = _base_and_time(W)
    cx = base.complex
    c = base.codim
    d = cx.top_dim
    out = SignedPointSet()
    faces = enumerate_faces(d, c)
    for i, pc in enumerate(base.pieces):
        for face in faces:
            E = cx.face_cube(pc.cube, face)
            if cube is not None and E != cube:
                continue
            free = [j - 1 for j in face.free]
            for k in range(len(pc.cells)):
                x = solve_cell(pc.cell_points(k), face)
                if x is None:
                    continue
                local = x[free]
                if np.any(local < ROOT_TOL) or np.any(local > 1 - ROOT_TOL):
                    raise TransversalityError(
                        f"piece {i} meets cube {E} at {x.tolist()}, within {ROOT_TOL} of its boundary")
                sign = crossing_sign(pc, k, face)
                y = flow_point(x, t) if t else x
                pt = SignedPoint(E, tuple(float(v) for v in y[free]), sign, pc.cube,
                                 tuple(float(v) for v in y), i, k)
                out.add(pt, local, ROOT_TOL)
    return out


def intersection_number(W, cube: int) -> tuple[SignedPointSet, int]:
    base, _ = _base_and_time(W)
    if base.complex.dim(cube) != base.codim:
        raise ValueError(f"cube {cube} has dimension {base.complex.dim(cube)}, "
                         f"not the codimension {base.codim}")
    pts = intersection_points(W, cube)
    return pts, pts.signed_cardinality


def intersect_cochain(W) -> IntCochain:
    base, _ = _base_and_time(W)
    values: dict[int, int] = {}
    for pt in intersection_points(W).points:
        values[pt.face_cube] = values.get(pt.face_cube, 0) + pt.sign
    return IntCochain(base.complex, base.codim, values)


@dataclass
class ChainMapReport:
    lhs: IntCochain
    rhs: IntCochain

    @property
    def mismatches(self) -> dict[int, tuple[int, int]]:
        keys = set(self.lhs.values) | set(self.rhs.values)
        return {k: (self.lhs[k], self.rhs[k]) for k in sorted(keys) if self.lhs[k] != self.rhs[k]}

    @property
    def ok(self) -> bool:
        return not self.mismatches


def chain_map_check(W: GeoCochain) -> ChainMapReport:
    """Compare the coboundary of ``cI(W)`` with ``cI`` of the geometric boundary."""
    from .cochains import coboundary

    return ChainMapReport(coboundary(intersect_cochain(W)), intersect_cochain(boundary_geo(W)))
