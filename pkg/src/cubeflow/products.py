"""Signed fiber products of flowed cochains and the cup-product comparison.

Inside a top cube, ``f_s(W)`` and ``f_u(V)`` meet where
``logit(a) + s = logit(b) + u`` for ``a`` on ``W`` and ``b`` on ``V``; in logit
coordinates the flow is a translation, so roots are found there.  Points on a
mesh cell are held as barycentric weights, which keeps coordinates close to
0 or 1 accurate to full relative precision.
"""
from __future__ import annotations

import csv
import itertools
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .cochains import IntCochain, cup
from .complex import single_cube
from .cube import FacePartition, VertexSet, enumerate_faces, face_decomposition
from .flow import FlowedCochain, flow_cochain, flow_point, logistic
from .geometric import (GeoCochain, GeometryError, GraphPiece, SignedPoint, SignedPointSet,
                        TransversalityError, crossing_sign, det_sign, intersect_cochain)


class NonConvergence(GeometryError):
    pass


@dataclass
class ProductConfig:
    t_grid: list[float] = field(default_factory=lambda: [float(t) for t in range(11)])
    tol: float = 1e-8              # merge radius and distance-to-wall floor
    newton_tol: float = 1e-11
    newton_max_iter: int = 60
    depth_cap: int = 40
    leaf_width: float = 0.5        # logit width below which Newton takes over
    cond_max: float = 1e12
    stability_samples: int = 5
    workers: int = 1

    def __post_init__(self):
        self.t_grid = [float(t) for t in self.t_grid]
        if not self.t_grid:
            raise ValueError("t grid is empty")
        if any(b <= a for a, b in zip(self.t_grid, self.t_grid[1:])):
            raise ValueError("t grid must be strictly ascending")
        if min(self.tol, self.newton_tol, self.leaf_width, self.cond_max) <= 0:
            raise ValueError("tolerances must be positive")

    @staticmethod
    def parse_grid(text: str) -> list[float]:
        """``"a:b:step"`` (inclusive) or a comma list."""
        if ":" in text:
            a, b, step = (float(x) for x in text.split(":"))
            n = int(math.floor((b - a) / step + 1e-9))
            return [a + k * step for k in range(n + 1)]
        return [float(x) for x in text.split(",")]


# -- root finding on a pair of cells ----------------------------------------------

def _logits(W: np.ndarray, P: np.ndarray) -> np.ndarray:
    """Logit coordinates of points given by barycentric weight rows ``W`` over vertices ``P``."""
    with np.errstate(divide="ignore"):
        return np.log(W @ P) - np.log(W @ (1.0 - P))


def _span(Z: np.ndarray) -> tuple[tuple[bool, float], tuple[float, int, int, int]]:
    """Widest logit extent over the edges of a simplex: (width, u, v, coordinate).

    Among edges reaching a wall (infinite width) the one whose finite end is
    least extreme is chosen, so repeated doubling steps rotate over all of them.
    """
    best, best_key = (0.0, 0, 0, 0), (False, 0.0)
    for u, v in itertools.combinations(range(len(Z)), 2):
        for i in range(Z.shape[1]):
            zu, zv = Z[u, i], Z[v, i]
            if zu == zv:
                continue
            if np.isfinite(zu) and np.isfinite(zv):
                key = (False, abs(zu - zv))
            elif np.isinf(zu) and np.isinf(zv):
                key = (True, 0.0)
            else:
                key = (True, -abs(zu if np.isfinite(zu) else zv))
            if key > best_key:
                best, best_key = (abs(zu - zv), u, v, i), key
    return best_key, best


def _split_param(zu: float, zv: float, xu: float, xv: float, cu: float, cv: float,
                 window: tuple[float, float]) -> float:
    """Edge parameter for the next split, in logit terms.

    Finite edges split at the logit midpoint.  Toward a wall (infinite logit)
    the split lands just past the window where roots can lie, or doubles the
    finite end's magnitude when that window is unbounded.  ``x`` and
    ``c = 1 - x`` are both given so the parameter keeps full relative precision.
    """
    if np.isfinite(zu) and np.isfinite(zv):
        target = 0.5 * (zu + zv)
    elif np.isfinite(zu) or np.isfinite(zv):
        zf, zi = (zu, zv) if np.isfinite(zu) else (zv, zu)
        near, far = (window[1], window[0]) if zi < 0 else (window[0], window[1])
        target = zf + math.copysign(max(2.0, abs(zf)), zi)
        if np.isfinite(near) and (zf - near) * math.copysign(1.0, zi) < -1.0:
            # the finite end is already outside the window: cut it off at the near side
            target = near - math.copysign(0.5, zi)
        elif np.isfinite(far) and (far - zf) * math.copysign(1.0, zi) > 0:
            target = far + math.copysign(0.5, zi)
    else:
        target = 0.5 * (window[0] + window[1]) if np.all(np.isfinite(window)) else 0.0
    if target <= 0:
        tau = (float(logistic(target)) - xu) / (xv - xu)
    else:
        tau = (float(logistic(-target)) - cu) / (cv - cu)
    return min(max(tau, 1e-15), 1 - 1e-15)


@dataclass
class _CellPair:
    P: np.ndarray      # W cell vertices
    Q: np.ndarray      # V cell vertices
    shift: float       # s - u: residual is logit(a) - logit(b) + shift


def _residual(pair: _CellPair, wa: np.ndarray, wb: np.ndarray) -> np.ndarray:
    return _logits(wa[None], pair.P)[0] - _logits(wb[None], pair.Q)[0] + pair.shift


def _jacobian(pair: _CellPair, wa, wb, ja: int, jb: int) -> np.ndarray:
    a, a1 = wa @ pair.P, wa @ (1 - pair.P)
    b, b1 = wb @ pair.Q, wb @ (1 - pair.Q)
    cols = [(pair.P[k] - pair.P[ja]) / (a * a1) for k in range(len(wa)) if k != ja]
    cols += [-(pair.Q[k] - pair.Q[jb]) / (b * b1) for k in range(len(wb)) if k != jb]
    return np.array(cols).T.reshape(len(a), len(cols))


def _newton(pair: _CellPair, wa0, wb0, cfg: ProductConfig):
    wa, wb = wa0.copy(), wb0.copy()
    ja, jb = int(np.argmax(wa)), int(np.argmax(wb))
    ia = [k for k in range(len(wa)) if k != ja]
    ib = [k for k in range(len(wb)) if k != jb]

    def build(u):
        xa = np.empty(len(wa))
        xa[ia] = u[:len(ia)]
        xa[ja] = 1.0 - u[:len(ia)].sum()
        xb = np.empty(len(wb))
        xb[ib] = u[len(ia):]
        xb[jb] = 1.0 - u[len(ia):].sum()
        return xa, xb

    def norm(F):
        return float(np.max(np.abs(F))) if F.size else 0.0

    u = np.concatenate([wa[ia], wb[ib]])
    F = _residual(pair, wa, wb)
    if not np.all(np.isfinite(F)):
        return None
    for _ in range(cfg.newton_max_iter):
        scale = max(1.0, float(np.max(np.abs(_logits(wa[None], pair.P)))))
        if norm(F) <= cfg.newton_tol * scale:
            return wa, wb
        J = _jacobian(pair, wa, wb, ja, jb)
        try:
            step = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            return None
        alpha = 1.0
        for _ in range(40):
            xa, xb = build(u + alpha * step)
            if np.all(xa @ pair.P > 0) and np.all(xa @ (1 - pair.P) > 0) and \
                    np.all(xb @ pair.Q > 0) and np.all(xb @ (1 - pair.Q) > 0):
                Fn = _residual(pair, xa, xb)
                if np.all(np.isfinite(Fn)) and norm(Fn) < norm(F):
                    break
            alpha *= 0.5
        else:
            return None
        u = u + alpha * step
        wa, wb, F = xa, xb, Fn
    return None


def _inside(weights_sub: np.ndarray, w: np.ndarray, tol: float = 1e-9) -> bool:
    """Whether weight vector ``w`` lies in the subsimplex with vertex rows ``weights_sub``."""
    if len(w) == 1:
        return True
    # the dominant coordinate is redundant given sum-to-one; drop it to keep precision
    j = int(np.argmax(w))
    keep = [k for k in range(len(w)) if k != j]
    M = np.vstack([weights_sub[:, keep].T, np.ones(len(weights_sub))])
    try:
        mu = np.linalg.solve(M, np.append(w[keep], 1.0))
    except np.linalg.LinAlgError:
        return False
    return bool(np.all(mu >= -tol))


def _cell_pair_roots(pair: _CellPair, cfg: ProductConfig, where: str):
    pa, pb = len(pair.P), len(pair.Q)
    roots = []
    # subdivision depth is tracked separately for each side
    stack = [(np.eye(pa), np.eye(pb), 0, 0)]
    while stack:
        SA, SB, da, db = stack.pop()
        ZA, ZB = _logits(SA, pair.P), _logits(SB, pair.Q)
        with np.errstate(invalid="ignore"):
            lo = ZA.min(0) - ZB.max(0) + pair.shift
            hi = ZA.max(0) - ZB.min(0) + pair.shift
        if np.any(lo > 0) or np.any(hi < 0):
            continue
        (ka, wa_span), (kb, wb_span) = _span(ZA), _span(ZB)
        width = max(wa_span[0], wb_span[0])
        if width < cfg.leaf_width:
            sol = _newton(pair, SA.mean(0), SB.mean(0), cfg)
            if sol is not None:
                wa, wb = sol
                if np.all(wa >= -1e-12) and np.all(wb >= -1e-12):
                    roots.append((np.clip(wa, 0, None), np.clip(wb, 0, None)))
                if _inside(SA, wa) and _inside(SB, wb):
                    continue
        if ka >= kb:
            S, Z, X, (_, u, v, i), which = SA, ZA, pair.P, wa_span, 0
        else:
            S, Z, X, (_, u, v, i), which = SB, ZB, pair.Q, wb_span, 1
        if max(da, db) >= cfg.depth_cap:
            raise NonConvergence(f"root search did not resolve a cell pair in {where} "
                                 f"after {cfg.depth_cap} subdivisions")
        # logit window of coordinate i where this side can still meet the other
        if which == 0:
            window = (ZB[:, i].min() - pair.shift, ZB[:, i].max() - pair.shift)
        else:
            window = (ZA[:, i].min() + pair.shift, ZA[:, i].max() + pair.shift)
        tau = _split_param(Z[u, i], Z[v, i], S[u] @ X[:, i], S[v] @ X[:, i],
                           S[u] @ (1 - X[:, i]), S[v] @ (1 - X[:, i]), window)
        m = (1 - tau) * S[u] + tau * S[v]
        S1, S2 = S.copy(), S.copy()
        S1[u], S2[v] = m, m
        if which == 0:
            stack += [(S1, SB, da + 1, db), (S2, SB, da + 1, db)]
        else:
            stack += [(SA, S1, da, db + 1), (SA, S2, da, db + 1)]
    return roots


# -- fiber product -----------------------------------------------------------------

def product_sign(pw: GraphPiece, cw: int, a: np.ndarray, pv: GraphPiece, cv: int, b: np.ndarray) -> int:
    """Co-orientation of the intersection point: W's normal followed by V's.

    Tangents are compared in logit coordinates, where both flows are
    translations; rescaling by the positive factors ``1 / (x(1 - x))`` does not
    change either co-orientation sign.
    """
    TW, TV = pw.cell_tangent(cw), pv.cell_tangent(cv)
    lw = TW / (a * (1 - a))[:, None]
    lv = TV / (b * (1 - b))[:, None]
    return pw.coorientation_sign(TW) * pv.coorientation_sign(TV) * det_sign(np.hstack([lw, lv]))


def _as_flowed(X) -> FlowedCochain:
    return X if isinstance(X, FlowedCochain) else FlowedCochain(X, 0.0)


def fiber_product_points(Wt, Vt, cube: int, cfg: ProductConfig | None = None) -> SignedPointSet:
    """Signed intersection points of two flowed cochains inside a top cube."""
    cfg = cfg or ProductConfig()
    Wt, Vt = _as_flowed(Wt), _as_flowed(Vt)
    cx = Wt.complex
    n = cx.top_dim
    if cx.dim(cube) != n:
        raise ValueError(f"cube {cube} is not top-dimensional")
    if Wt.codim + Vt.codim != n:
        raise ValueError(f"codimensions {Wt.codim} + {Vt.codim} must add up to {n}")
    out = SignedPointSet()
    shift = Wt.time - Vt.time
    for i, pw in enumerate(Wt.base.pieces):
        if pw.cube != cube:
            continue
        for j, pv in enumerate(Vt.base.pieces):
            if pv.cube != cube:
                continue
            for cw, cv in itertools.product(range(len(pw.cells)), range(len(pv.cells))):
                pair = _CellPair(pw.cell_points(cw), pv.cell_points(cv), shift)
                where = f"cube {cube} (W piece {i} cell {cw}, V piece {j} cell {cv})"
                for wa, wb in _cell_pair_roots(pair, cfg, where):
                    a, b = wa @ pair.P, wb @ pair.Q
                    z = _logits(wa[None], pair.P)[0] + Wt.time
                    wall = 1.0 / (1.0 + np.exp(np.abs(z)))
                    if np.any(wall < cfg.tol):
                        raise TransversalityError(
                            f"intersection in {where} lies within {cfg.tol} of the cube boundary")
                    J = _jacobian(pair, wa, wb, int(np.argmax(wa)), int(np.argmax(wb)))
                    Jn = J / np.linalg.norm(J, axis=0)
                    if J.size and np.linalg.cond(Jn) > cfg.cond_max:
                        raise TransversalityError(f"near-tangential intersection in {where}")
                    y = flow_point(a, Wt.time)
                    pt = SignedPoint(cube, tuple(map(float, y)), product_sign(pw, cw, a, pv, cv, b),
                                     cube, tuple(map(float, y)), i, cw)
                    out.add(pt, np.concatenate([a, b]), cfg.tol)
    return out


def product_cochain(W, V, t: float, cfg: ProductConfig | None = None, *, swap: bool = False) -> IntCochain:
    """``cI(f_t(W) x_M f_-t(V))``, or with ``swap`` ``cI(f_-t(W) x_M f_t(V))``.

    Only complementary codimensions (adding up to the top dimension) are supported.
    """
    cfg = cfg or ProductConfig()
    cx = W.complex
    n = cx.top_dim
    if W.codim + V.codim != n:
        raise ValueError("product cochains are implemented for codimensions adding up to the "
                         f"top dimension ({W.codim} + {V.codim} != {n})")
    s = -t if swap else t
    Wt, Vt = flow_cochain(W, s), flow_cochain(V, -s)
    values = {}
    for E in cx.cubes_of_dim(n):
        c = fiber_product_points(Wt, Vt, E, cfg).signed_cardinality
        if c:
            values[E] = c
    return IntCochain(cx, n, values)


# -- flowed products against cup products ----------------------------------------

CSV_HEADER = ["t", "cube", "product_value", "cup_value", "equal",
              "variant2_value", "variant2_expected", "transversality_ok"]


@dataclass
class ComparisonRow:
    t: float
    cube: int
    product_value: int | None
    cup_value: int
    equal: bool
    variant2_value: int | None
    variant2_expected: int
    transversality_ok: bool

    @property
    def variant2_equal(self) -> bool:
        return self.variant2_value is not None and self.variant2_value == self.variant2_expected


@dataclass
class CheckResult:
    t: float
    rows: list[ComparisonRow]
    failure: str | None = None

    @property
    def all_equal(self) -> bool:
        return self.failure is None and all(r.equal and r.variant2_equal for r in self.rows)


def main_theorem_check(W: GeoCochain, V: GeoCochain, t: float, cfg: ProductConfig | None = None,
                       _cups: tuple[IntCochain, IntCochain] | None = None) -> CheckResult:
    """Compare both product variants at time ``t`` with the cup products of the cI images.

    The cI images are flow invariant, so they are computed once from the unflowed inputs.
    A transversality failure is recorded on the rows, not raised.
    """
    cfg = cfg or ProductConfig()
    cx = W.complex
    if _cups is None:
        cw, cv = intersect_cochain(W), intersect_cochain(V)
        _cups = (cup(cw, cv), (-1) ** (W.codim * V.codim) * cup(cv, cw))
    cup1, cup2 = _cups
    failure = None
    try:
        p1 = product_cochain(W, V, t, cfg)
        p2 = product_cochain(W, V, t, cfg, swap=True)
    except (TransversalityError, NonConvergence) as exc:
        p1 = p2 = None
        failure = f"t={t}: {exc}"
    rows = []
    for E in cx.cubes_of_dim(cx.top_dim):
        v1 = None if p1 is None else p1[E]
        v2 = None if p2 is None else p2[E]
        rows.append(ComparisonRow(float(t), E, v1, cup1[E], v1 is not None and v1 == cup1[E],
                                  v2, cup2[E], failure is None))
    return CheckResult(float(t), rows, failure)


@dataclass
class ComparisonReport:
    checks: list[CheckResult]
    T_found: float | None
    stability: list[CheckResult] = field(default_factory=list)

    @property
    def rows(self) -> list[ComparisonRow]:
        return [r for c in self.checks for r in c.rows]

    @property
    def stable(self) -> bool:
        return all(c.all_equal for c in self.stability)

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_HEADER)
            for r in self.rows:
                w.writerow([repr(r.t), r.cube, "" if r.product_value is None else r.product_value,
                            r.cup_value, int(r.equal), "" if r.variant2_value is None else r.variant2_value,
                            r.variant2_expected, int(r.transversality_ok)])

    def to_json(self) -> dict:
        return {"T_found": self.T_found,
                "rows": [asdict(r) for r in self.rows],
                "failures": {repr(c.t): c.failure for c in self.checks if c.failure},
                "stability": [{"t": c.t, "all_equal": c.all_equal} for c in self.stability]}

    def write_json(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=1))


def _run_checks(W, V, ts: Sequence[float], cfg: ProductConfig, cups) -> list[CheckResult]:
    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            return list(pool.map(lambda t: main_theorem_check(W, V, t, cfg, cups), ts))
    return [main_theorem_check(W, V, t, cfg, cups) for t in ts]


def threshold_sweep(W: GeoCochain, V: GeoCochain, cfg: ProductConfig | None = None) -> ComparisonReport:
    """Run the comparison over the t grid and locate the time from which it always holds.

    The candidate threshold is confirmed at ``cfg.stability_samples`` extra
    times spread between it and the grid's end (at least one unit past it);
    ``T_found`` is None if no grid time qualifies or the confirmation fails.
    """
    cfg = cfg or ProductConfig()
    cw, cv = intersect_cochain(W), intersect_cochain(V)
    cups = (cup(cw, cv), (-1) ** (W.codim * V.codim) * cup(cv, cw))
    checks = _run_checks(W, V, cfg.t_grid, cfg, cups)
    T = None
    for c in reversed(checks):
        if not c.all_equal:
            break
        T = c.t
    stability: list[CheckResult] = []
    if T is not None and cfg.stability_samples:
        hi = max(cfg.t_grid[-1], T + 1.0)
        ts = [T + (hi - T) * (k + 0.5) / cfg.stability_samples for k in range(cfg.stability_samples)]
        stability = _run_checks(W, V, ts, cfg, cups)
        if not all(c.all_equal for c in stability):
            T = None
    return ComparisonReport(checks, T, stability)


# -- the local sign law --------------------------------------------------------------------

def face_probe_piece(n: int, face: FacePartition, reach: float = 0.3,
                     center: Sequence[float] | None = None) -> GraphPiece:
    """A flat graph piece crossing the interior of ``face`` inside the single n-cube.

    It is the graph over the bound axes of ``face``, pinned at ``center`` on the
    free axes, over the part of the base within ``reach`` of the face.  Its
    co-orientation makes its crossing with ``face`` positive.
    """
    cx = single_cube(n)
    top = cx.cubes_of_dim(n)[0]
    base = face.bound
    free = face.free
    if center is None:
        center = [0.35 + 0.3 * k / max(1, n - 1) for k in range(n)]
    # index 0 of each range sits on the face
    ranges = [(0.0, reach) if face.bound_value(i) == 0 else (1.0, 1.0 - reach) for i in base]
    m = len(base)
    nodes = []
    for mask in range(1 << m):
        x = np.zeros(n)
        for k, i in enumerate(base):
            x[i - 1] = ranges[k][mask >> k & 1]
        for i in free:
            x[i - 1] = center[i - 1]
        nodes.append(x)
    cells = []
    for perm in itertools.permutations(range(m)):
        mask, cell = 0, [0]
        for a in perm:
            mask |= 1 << a
            cell.append(mask)
        cells.append(tuple(cell))
    piece = GraphPiece(top, base, np.array(nodes), cells, 1)
    # the crossing point lies on the cell containing the corner on the face
    k = next(k for k, c in enumerate(piece.cells) if 0 in c)
    if crossing_sign(piece, k, face) < 0:
        piece = piece.with_sign(-1)
    return piece


def face_pair_points(F: FacePartition, G: FacePartition, t: float,
                     cfg: ProductConfig | None = None) -> SignedPointSet:
    """Points of ``f_t(C) x f_-t(C')`` for probe pieces through complementary faces F, G."""
    n = F.n
    if F.dim + G.dim != n:
        raise ValueError("faces are not complementary")
    cx = single_cube(n)
    top = cx.cubes_of_dim(n)[0]
    C = GeoCochain(cx, F.dim, [face_probe_piece(n, F)])
    Cp = GeoCochain(cx, G.dim, [face_probe_piece(n, G, center=[0.6 - 0.25 * k / max(1, n - 1)
                                                                 for k in range(n)])])
    return fiber_product_points(flow_cochain(C, t), flow_cochain(Cp, -t), top, cfg)


def reciprocal_unit_test(v: VertexSet, t: float, cfg: ProductConfig | None = None) -> SignedPointSet:
    """Intersect flowed probes through ``v-`` and ``v+``; for large t one point of sign ``sh(v)``."""
    minus, plus = face_decomposition(v.as_face())
    return face_pair_points(minus, plus, t, cfg)


def complementary_face_pairs(n: int) -> list[tuple[FacePartition, FacePartition]]:
    return [(F, G) for F in enumerate_faces(n) for G in enumerate_faces(n) if F.dim + G.dim == n]


def settle_time(probe, t_grid: Sequence[float], predicate) -> float | None:
    """First grid time from which ``predicate(probe(t))`` holds for the rest of the grid."""
    found = None
    for t in t_grid:
        try:
            ok = predicate(probe(t))
        except (TransversalityError, NonConvergence):
            ok = False
        if ok and found is None:
            found = t
        elif not ok:
            found = None
    return found
