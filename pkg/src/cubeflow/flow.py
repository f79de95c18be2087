"""The logistic flow ``x' = x(1 - x)`` on cubes, in closed form.

Every function works coordinatewise on numpy arrays.  Large ``|t|`` is handled
by dividing numerator and denominator by ``e^|t|``; past ``|t| ~ 745`` the
factor ``e^-|t|`` underflows to zero and results saturate at the flow limits.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from importlib import resources
from typing import TYPE_CHECKING, Iterator

import numpy as np

from .cube import FacePartition, face_decomposition

if TYPE_CHECKING:
    from .geometric import GeoCochain, GraphPiece


def _arr(x) -> np.ndarray:
    return np.asarray(x, dtype=float)


def vector_field(x) -> np.ndarray:
    x = _arr(x)
    return x * (1.0 - x)


def _odds_ratio(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """``p / (p + q)``, evaluated as ``1 - q / (p + q)`` above one half so results near 1 stay accurate."""
    with np.errstate(invalid="ignore", divide="ignore"):
        total = p + q
        return np.where(p <= q, p / total, 1.0 - q / total)


def flow_point(x, t: float) -> np.ndarray:
    """``f_t(x) = x e^t / (x(e^t - 1) + 1)`` in each coordinate."""
    x = _arr(x)
    t = float(t)
    if t >= 0:
        y = _odds_ratio(x, (1.0 - x) * np.exp(-t))
    else:
        y = _odds_ratio(x * np.exp(t), 1.0 - x)
    return np.where(x == 0.0, 0.0, np.where(x == 1.0, 1.0, y))


def flow_inverse(y, t: float) -> np.ndarray:
    """``x = y / (e^t - y(e^t - 1))``, the point that flows to ``y`` in time ``t``."""
    return flow_point(y, -float(t))


def jacobian_diagonal(x, t: float) -> np.ndarray:
    """Diagonal entries ``e^t / (x(e^t - 1) + 1)^2`` of the flow's derivative."""
    x = _arr(x)
    t = float(t)
    with np.errstate(over="ignore"):
        if t >= 0:
            s = np.exp(-t)
            return s / (x + (1.0 - x) * s) ** 2
        s = np.exp(t)
        return s / (x * s + (1.0 - x)) ** 2


def flow_jacobian(x, t: float) -> np.ndarray:
    return np.diag(np.atleast_1d(jacobian_diagonal(x, t)))


def flow_limits(x) -> tuple[np.ndarray, np.ndarray]:
    """Limits of the flow line through ``x`` as ``t -> -inf`` and ``t -> +inf``."""
    x = _arr(x)
    minus = np.where(x == 1.0, 1.0, 0.0)
    plus = np.where(x == 0.0, 0.0, 1.0)
    return minus, plus


def logit(x) -> np.ndarray:
    """``log(x / (1 - x))``; the flow acts on it as translation by ``t``."""
    x = _arr(x)
    with np.errstate(divide="ignore"):
        return np.log(x) - np.log1p(-x)


def logistic(z) -> np.ndarray:
    z = _arr(z)
    with np.errstate(over="ignore"):
        return np.where(z >= 0, 1.0 / (1.0 + np.exp(-np.abs(z))),
                        np.exp(-np.abs(z)) / (1.0 + np.exp(-np.abs(z))))


# -- neighbourhoods of faces ----------------------------------------------------

@dataclass(frozen=True)
class RegionSpec:
    """The lower or upper neighbourhood ``N_eps L_u(F)`` / ``N_eps U_u(F)`` of a face."""

    face: FacePartition
    kind: str
    u: float
    eps: float

    def __post_init__(self):
        if self.kind not in ("lower", "upper"):
            raise ValueError(f"kind must be 'lower' or 'upper', not {self.kind!r}")
        if not (0 < self.u < 1 and 0 < self.eps < 1):
            raise ValueError("u and eps must lie in (0, 1)")

    def contains(self, x) -> bool:
        x = _arr(x)
        f = self.face
        for i in f.f0:
            if not x[i - 1] < self.eps:
                return False
        for i in f.f1:
            if not x[i - 1] > 1 - self.eps:
                return False
        for i in f.f01:
            if self.kind == "lower" and not x[i - 1] <= self.u:
                return False
            if self.kind == "upper" and not x[i - 1] >= self.u:
                return False
        return bool(np.all((x >= 0) & (x <= 1)))

    def sample(self, per_axis: int = 5) -> Iterator[np.ndarray]:
        """Deterministic grid of points inside the region."""
        f = self.face
        axes = []
        for i in range(1, f.n + 1):
            if i in f.f0:
                axes.append(self.eps * np.linspace(0, 1, per_axis, endpoint=False))
            elif i in f.f1:
                axes.append(1 - self.eps * np.linspace(0, 1, per_axis, endpoint=False))
            elif self.kind == "lower":
                axes.append(np.linspace(0, self.u, per_axis))
            else:
                axes.append(np.linspace(self.u, 1, per_axis))
        for pt in np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, f.n):
            yield pt


def in_face_neighborhood(face: FacePartition, eps: float, x) -> bool:
    """Membership in ``N_eps(F)``: bound coordinates within ``eps`` of the face."""
    x = _arr(x)
    return all(x[i - 1] < eps for i in face.f0) and all(x[i - 1] > 1 - eps for i in face.f1)


def flow_into_threshold(region: RegionSpec, eps: float, *, per_axis: int = 5,
                        t_max: float = 200.0, tol: float = 1e-3) -> float:
    """Smallest time (up to ``tol``) after which sampled points of ``region`` reach
    ``N_eps(F+)`` (upper regions, forward flow) or ``N_eps(F-)`` (lower regions, backward flow).

    Arrival is monotone in time because the flow is order preserving.
    """
    minus, plus = face_decomposition(region.face)
    target, direction = (plus, 1.0) if region.kind == "upper" else (minus, -1.0)
    pts = list(region.sample(per_axis))

    def arrived(t):
        return all(in_face_neighborhood(target, eps, flow_point(p, direction * t)) for p in pts)

    if arrived(0.0):
        return 0.0
    hi = 1.0
    while not arrived(hi):
        hi *= 2
        if hi > t_max:
            raise ValueError(f"sampled region does not reach the target within t={t_max}")
    lo = hi / 2 if hi > 1 else 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        lo, hi = (lo, mid) if arrived(mid) else (mid, hi)
    return hi


def jacobian_ratio_limit(y_i: float, y_j: float) -> float:
    """Large-time limit of ``|Df_t|_ii / |Df_t|_jj`` at fixed image ``y``."""
    return ((1 - y_i) / (1 - y_j)) ** 2


def jacobian_ratio_probe(face: FacePartition, u: float, delta: float, t: float, *,
                         per_axis: int = 5, backward: bool = False) -> float:
    """Largest normal-to-tangential Jacobian ratio over a sample of ``N_delta L_u(F+)``.

    With ``backward`` the sample is ``N_delta U_u(F-)`` and the flow runs for ``-t``.
    Normal directions are the bound coordinates of ``F+`` (resp. ``F-``).
    """
    minus, plus = face_decomposition(face)
    target = minus if backward else plus
    region = RegionSpec(target, "upper" if backward else "lower", u, delta)
    normal = [i - 1 for i in target.bound]
    tangent = [j - 1 for j in target.free]
    if not normal or not tangent:
        return 0.0
    tt = -t if backward else t
    worst = 0.0
    for y in region.sample(per_axis):
        x = flow_inverse(y, tt)
        d = np.abs(jacobian_diagonal(x, tt))
        worst = max(worst, float(d[normal].max() / d[tangent].min()))
    return worst


# -- probe configuration ----------------------------------------------------------

def load_probe_config(path=None) -> dict:
    """Tolerances and sample grids for the neighbourhood probes."""
    if path is None:
        text = resources.files("cubeflow").joinpath("data/probe_config.json").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    return json.loads(text)


# -- flowed geometric cochains --------------------------------------------------------

@dataclass(frozen=True)
class FlowedPiece:
    """A graph piece pushed forward by the flow, evaluated by conjugation.

    The flow acts coordinatewise, so ``f_t`` of the graph of ``g`` over the base
    axes is the graph of ``y -> f_t(g(f_-t(y)))``.
    """

    base: "GraphPiece"
    time: float

    def graph_value(self, y_base) -> np.ndarray:
        """Complement coordinates of the flowed piece above flowed base coordinates ``y_base``."""
        pc = self.base
        x_base = flow_inverse(np.atleast_1d(np.asarray(y_base, dtype=float)), self.time)
        A = [a - 1 for a in pc.base_axes]
        C = [a - 1 for a in pc.complement_axes]
        for k in range(len(pc.cells)):
            P = pc.cell_points(k)
            if not A:
                return flow_point(P[0, C], self.time)
            M = (P[1:, A] - P[0, A]).T
            lam = np.linalg.solve(M, x_base - P[0, A])
            if np.all(lam >= -1e-12) and lam.sum() <= 1 + 1e-12:
                x = P[0] + (P[1:] - P[0]).T @ lam
                return flow_point(x[C], self.time)
        raise ValueError(f"{np.asarray(y_base).tolist()} is outside the domain of the piece")

    def carrier_points(self, per_cell: int = 5) -> np.ndarray:
        """Flowed images of a barycentric sample of every cell."""
        pc = self.base
        p = pc.dim
        grid = [w for w in _simplex_grid(p, per_cell)]
        out = [flow_point(np.asarray(w) @ pc.cell_points(k), self.time)
               for k in range(len(pc.cells)) for w in grid]
        return np.array(out)


def _simplex_grid(p: int, m: int):
    if p == 0:
        yield (1.0,)
        return
    for combo in itertools.product(range(m + 1), repeat=p):
        if sum(combo) <= m:
            w = [c / m for c in combo]
            yield (1.0 - sum(w), *w)


@dataclass(frozen=True)
class FlowedCochain:
    """``f_t(W)``: the flowed cochain, kept as its base plus the time."""

    base: "GeoCochain"
    time: float

    @property
    def complex(self):
        return self.base.complex

    @property
    def codim(self) -> int:
        return self.base.codim

    @property
    def pieces(self) -> tuple[FlowedPiece, ...]:
        return tuple(FlowedPiece(p, self.time) for p in self.base.pieces)

    def validate_transverse(self) -> list[str]:
        # the flow is a face-preserving diffeomorphism of each open face
        return self.base.validate_transverse()

    def to_json(self, per_cell: int = 5) -> dict:
        return {"codim": self.codim, "time": self.time,
                "pieces": [{"cube": fp.base.cube, "base_axes": list(fp.base.base_axes),
                            "normal_sign": fp.base.normal_sign,
                            "samples": fp.carrier_points(per_cell).tolist()} for fp in self.pieces]}


def flow_piece(piece, t: float) -> FlowedPiece:
    return FlowedPiece(piece, float(t))


def flow_cochain(W, t: float) -> FlowedCochain:
    if isinstance(W, FlowedCochain):
        return FlowedCochain(W.base, W.time + float(t))
    return FlowedCochain(W, float(t))
