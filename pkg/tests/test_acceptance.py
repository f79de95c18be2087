"""Acceptance criteria 1-9, each checked at its stated tolerance and time limit.

Every test prints a single ``PASS criterion k`` or ``FAIL criterion k`` line
straight to the terminal, even under output capture.
"""
import contextlib
import itertools
import math
import time

import numpy as np
import pytest

from cubeflow.cochains import (IntChain, IntCochain, boundary, coboundary, cup, evaluate,
                               koszul_diagonal, local_diagonal)
from cubeflow.complex import build_torus_grid, single_cube
from cubeflow.cube import enumerate_faces, face_decomposition, reciprocal_vertex, shuffle_sign
from cubeflow.experiments import CONFIGURATIONS, cycle_configuration, figure1_configuration, torus3_configuration
from cubeflow.flow import (RegionSpec, flow_cochain, flow_into_threshold, flow_inverse, flow_limits,
                           flow_point, jacobian_diagonal, jacobian_ratio_probe, load_probe_config)
from cubeflow.geometric import chain_map_check, intersect_cochain, intersection_points
from cubeflow.products import (ProductConfig, complementary_face_pairs, face_pair_points, product_cochain,
                               settle_time, threshold_sweep)
from cubeflow.snf import cohomology, cohomology_generators, fundamental_cycle

from conftest import grid, random_cochain
from test_geometric import transverse_polylines


@pytest.fixture
def criterion(capsys):
    """Time the body, enforce the limit and report one line."""

    @contextlib.contextmanager
    def run(k, limit, what):
        start = time.perf_counter()
        try:
            yield
            elapsed = time.perf_counter() - start
            assert elapsed < limit, f"took {elapsed:.1f}s, limit {limit}s"
        except BaseException as exc:
            with capsys.disabled():
                print(f"\nFAIL criterion {k}: {what} ({exc.__class__.__name__}: {str(exc)[:200]})")
            raise
        with capsys.disabled():
            print(f"\nPASS criterion {k}: {what} ({elapsed:.2f}s)")

    return run


# -- 1 ----------------------------------------------------------------------------------

def recursive_diagonal(n):
    """Koszul expansion of the diagonal of I^n as a product of interval diagonals."""
    terms = {("", ""): 1}
    for _ in range(n):
        terms = {(l + a, r + b): s * (-1) ** (r.count("x") * a.count("x"))
                 for (l, r), s in terms.items() for a, b in (("0", "x"), ("x", "1"))}
    return terms


def _word(face):
    return "".join("x" if i in face.f01 else ("1" if i in face.f1 else "0") for i in range(1, face.n + 1))


def _basis(cx, d):
    return [IntCochain(cx, d, {c: 1}) for c in cx.cubes_of_dim(d)]


def _leibniz(a, b):
    return coboundary(cup(a, b)) == cup(coboundary(a), b) + cup(a, coboundary(b)) * (-1) ** a.degree


def test_criterion_1_combinatorial_exactness(criterion):
    with criterion(1, 30, "boundary/coboundary square to zero, cup associative and Leibniz, diagonals agree"):
        for n in range(7):
            cx = single_cube(n)
            oracle = recursive_diagonal(n)
            assert {(_word(l), _word(r)): s for l, r, s in local_diagonal(n)} == oracle
            assert {(_word(l), _word(r)): s for l, r, s in koszul_diagonal(n)} == oracle
            for c in range(len(cx.cubes)):
                d = cx.dim(c)
                if d >= 2:
                    assert boundary(boundary(IntChain(cx, d, {c: 1}))).is_zero()
                if d <= n - 2:
                    assert coboundary(coboundary(IntCochain(cx, d, {c: 1}))).is_zero()
        # every basis pair and triple on the square and the 3-cube
        for n in (2, 3):
            cx = single_cube(n)
            basis = [b for d in range(n + 1) for b in _basis(cx, d)]
            for a, b in itertools.product(basis, repeat=2):
                if a.degree + b.degree <= n:
                    assert _leibniz(a, b)
            for a, b, c in itertools.product(basis, repeat=3):
                if a.degree + b.degree + c.degree <= n:
                    assert cup(cup(a, b), c) == cup(a, cup(b, c))
        rng = np.random.default_rng(1)
        shapes = [(3, 3)] * 6 + [(3, 4), (4, 3), (3, 5), (3, 3, 3)]
        cases = 0
        while cases < 1000:
            cx = grid(*shapes[cases % len(shapes)]).complex
            top = cx.top_dim
            p = int(rng.integers(0, top + 1))
            q = int(rng.integers(0, top + 1 - p))
            r = int(rng.integers(0, top + 1 - p - q))
            a, b, c = (random_cochain(cx, k, rng, density=0.4) for k in (p, q, r))
            assert cup(cup(a, b), c) == cup(a, cup(b, c))
            assert _leibniz(a, b)
            assert coboundary(coboundary(a)).is_zero()
            chain = IntChain(cx, p + 1, dict(random_cochain(cx, p + 1, rng).values)) if p < top else None
            if chain is not None and p + 1 >= 2:
                assert boundary(boundary(chain)).is_zero()
            cases += 1


# -- 2 ----------------------------------------------------------------------------------

def inversion_parity(face):
    seq = sorted(face.f1) + sorted(face.f01) + sorted(face.f0)
    inversions = sum(1 for i, j in itertools.combinations(range(len(seq)), 2) if seq[i] > seq[j])
    return -1 if inversions % 2 else 1


def test_criterion_2_shuffle_signs(criterion):
    with criterion(2, 5, "shuffle signs equal inversion parity on all faces of I^n, n <= 8"):
        total = 0
        for n in range(9):
            for face in enumerate_faces(n):
                assert shuffle_sign(face) == inversion_parity(face)
                total += 1
        assert total == sum(3 ** n for n in range(9))


# -- 3 ----------------------------------------------------------------------------------

def test_criterion_3_torus_invariants(criterion):
    with criterion(3, 10, "cohomology of the 3x3 torus and unimodular H^1 cup pairing"):
        cx = build_torus_grid([3, 3])
        groups = cohomology(cx)
        assert [(g.degree, g.betti, list(g.torsion)) for g in groups] == [(0, 1, []), (1, 2, []), (2, 1, [])]
        a, b = cohomology_generators(cx, 1)
        z = fundamental_cycle(cx)
        M = [[evaluate(cup(x, y), z) for y in (a, b)] for x in (a, b)]
        assert abs(M[0][0] * M[1][1] - M[0][1] * M[1][0]) == 1


# -- 4 ----------------------------------------------------------------------------------

def _rk4(xs, t_end, steps_per_unit):
    n = int(round(abs(t_end) * steps_per_unit))
    h = t_end / n
    x = np.array(xs, dtype=float)
    f = lambda y: y * (1 - y)
    out = {}
    for k in range(1, n + 1):
        k1 = f(x)
        k2 = f(x + 0.5 * h * k1)
        k3 = f(x + 0.5 * h * k2)
        k4 = f(x + h * k3)
        x = x + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if k % steps_per_unit == 0:
            out[int(round(k * h))] = x.copy()
    return out


def test_criterion_4_flow_numerics(criterion):
    c = load_probe_config()["ode_check"]
    with criterion(4, 10, "closed-form flow vs RK4, Jacobian vs differences, group laws, limits"):
        xs = np.arange(0, 1 + 1e-9, c["x_grid_step"])
        lo, hi = c["t_range"]
        for end in (lo, hi):
            for t, x in _rk4(xs, end, c["rk4_steps_per_unit"]).items():
                assert np.max(np.abs(flow_point(xs, t) - x)) <= c["tol"]
        h = 1e-6
        for x in np.linspace(0.05, 0.95, 19):
            for t in np.linspace(-5, 5, 21):
                fd = (flow_point(x + h, t) - flow_point(x - h, t)) / (2 * h)
                assert abs(jacobian_diagonal(x, t) - fd) <= 1e-6 * abs(fd)
        for s in range(lo, hi + 1):
            assert np.max(np.abs(flow_point(flow_inverse(xs, s), s) - xs)) <= 1e-12
            assert np.max(np.abs(flow_inverse(xs, s) - flow_point(xs, -s))) <= 1e-12
            for t in range(lo, hi + 1):
                assert np.max(np.abs(flow_point(flow_point(xs, s), t) - flow_point(xs, s + t))) <= 1e-12
        pts = np.concatenate([np.linspace(0.01, 0.99, 99), [0.0, 1.0]])
        minus, plus = flow_limits(pts)
        assert np.max(np.abs(flow_point(pts, 40.0) - plus)) <= 1e-12
        assert np.max(np.abs(flow_point(pts, -40.0) - minus)) <= 1e-12


# -- 5 ----------------------------------------------------------------------------------

def test_criterion_5_neighbourhood_flow(criterion):
    cfg = load_probe_config()
    per_axis = cfg["sample_per_axis"]
    faces = [f for n in (2, 3) for f in enumerate_faces(n) if 0 < f.dim < n]
    with criterion(5, 30, "regions flow into face neighbourhoods, Jacobian ratios shrink, domains contain"):
        rf = cfg["region_flow"]
        for face in faces:
            _, plus = face_decomposition(face)
            for u in rf["u"]:
                for r in rf["r"]:
                    region = RegionSpec(face, "upper", u, r)
                    T = [flow_into_threshold(region, eps, per_axis=per_axis) for eps in rf["eps"]]
                    assert T == sorted(T)
                    for eps, te in zip(rf["eps"], T):
                        assert all(plus_ok for plus_ok in
                                   (all(flow_point(p, te)[i - 1] > 1 - eps for i in plus.f1)
                                    and all(flow_point(p, te)[i - 1] < eps for i in plus.f0)
                                    for p in region.sample(per_axis)))
        jr = cfg["jacobian_ratio"]
        t_big = jr["t_grid"][-1]
        for face in faces:
            for eps in (0.1, 0.01):
                for u in jr["u"]:
                    delta = jr["delta_fraction"] * math.sqrt(eps) * (1 - u)
                    assert jacobian_ratio_probe(face, u, delta, t_big, per_axis=per_axis) < eps
                    assert jacobian_ratio_probe(face, u, delta, 2 * t_big, per_axis=per_axis) <= \
                        jacobian_ratio_probe(face, u, delta, t_big, per_axis=per_axis) * (1 + 1e-12)
                    assert jacobian_ratio_probe(face, u, delta, 0.0, per_axis=per_axis) in (0.0, 1.0)
        df = cfg["domain_flow"]
        for n in (2, 3):
            for face in enumerate_faces(n, terminal=True):
                if face.dim == 0:
                    continue
                for u in df["u"]:
                    for y in RegionSpec(face, "lower", u, 0.5).sample(per_axis):
                        if any(y[i - 1] != 1.0 for i in face.f1):
                            continue
                        for t in df["t_grid"]:
                            x = flow_inverse(y, t)
                            assert all(x[i - 1] <= u for i in face.f01)
                            assert all(x[i - 1] == 1.0 for i in face.f1)


# -- 6 ----------------------------------------------------------------------------------

def test_criterion_6_intersection_homomorphism(criterion):
    with criterion(6, 60, "chain map identity on 100+ random polylines, reversal, additivity"):
        battery = transverse_polylines(110, 99)
        assert len(battery) >= 100
        for _, _, W in battery:
            report = chain_map_check(W)
            assert report.ok, report.mismatches
            cW = intersect_cochain(W)
            assert intersect_cochain(W.reversed()) == -cW
        for (_, _, W), (_, _, V) in zip(battery[:30], battery[30:60]):
            try:
                union = intersect_cochain(W + V)
            except ValueError:
                continue        # the two curves cross some edge at the same point
            assert union == intersect_cochain(W) + intersect_cochain(V)


# -- 7 ----------------------------------------------------------------------------------

def test_criterion_7_reciprocal_sign_law(criterion):
    cfg = ProductConfig()
    t_grid = [0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0]
    with criterion(7, 60, "reciprocal pairs give one point of sign sh(v), other pairs nothing"):
        reciprocal = 0
        for n in (2, 3):
            for F, G in complementary_face_pairs(n):
                v = reciprocal_vertex(F, G)
                reciprocal += v is not None
                if v is None:
                    settled = settle_time(lambda t: face_pair_points(F, G, t, cfg), t_grid, lambda pts: len(pts) == 0)
                else:
                    sign = shuffle_sign(v.as_face())
                    settled = settle_time(lambda t: face_pair_points(F, G, t, cfg), t_grid,
                                          lambda pts: len(pts) == 1 and pts.points[0].sign == sign)
                assert settled is not None, (F, G)
        # one reciprocal pair per vertex of the square and the 3-cube
        assert reciprocal == 4 + 8


# -- 8 ----------------------------------------------------------------------------------

def test_criterion_8_main_theorem_figure1(criterion):
    with criterion(8, 120, "Figure-1 sweep finds a stable threshold, t=0 differs, swapped variant agrees"):
        conf = figure1_configuration()
        rep = threshold_sweep(conf.W, conf.V, ProductConfig(t_grid=list(range(11))))
        assert rep.T_found is not None and rep.T_found <= 10 and rep.stable
        first = rep.checks[0]
        assert first.t == 0.0 and not first.all_equal
        assert [(r.cube, r.product_value, r.cup_value) for r in first.rows if not r.equal] == [(conf.focus, 0, 1)]
        after = [c for c in rep.checks if c.t >= rep.T_found] + rep.stability
        assert all(r.equal and r.variant2_equal for c in after for r in c.rows)
        # the sign (-1)^(1*1) of the swapped variant, observed where the reverse cup is nonzero
        cyc = cycle_configuration()
        reverse_cup = cup(intersect_cochain(cyc.V), intersect_cochain(cyc.W))
        assert not reverse_cup.is_zero()
        for t in (rep.T_found, 10.0):
            assert product_cochain(cyc.W, cyc.V, t, swap=True) == -reverse_cup


def test_criterion_8_main_theorem_three_torus(criterion):
    with criterion(8, 600, "3-torus sweep (surface cycle and curve cycle) finds a stable threshold"):
        conf = torus3_configuration()
        assert (conf.W.codim, conf.V.codim) == (1, 2)
        rep = threshold_sweep(conf.W, conf.V, ProductConfig(t_grid=list(range(11))))
        assert rep.T_found is not None and rep.stable
        assert not cup(intersect_cochain(conf.W), intersect_cochain(conf.V)).is_zero()


# -- 9 ----------------------------------------------------------------------------------

def _recounted(W, t):
    """cI of f_t(W) from points checked on the flowed carrier, signed by pushed-forward frames."""
    Wt = flow_cochain(W, t)
    values = {}
    for pt in intersection_points(Wt).points:
        fp = Wt.pieces[pt.piece]
        piece = fp.base
        y = np.array(pt.coords)
        A = [a - 1 for a in piece.base_axes]
        C = [a - 1 for a in piece.complement_axes]
        # the evaluator pulls back through f_-t, which amplifies rounding near the walls
        assert np.allclose(fp.graph_value(y[A]), y[C], atol=1e-6)
        D = np.diag(jacobian_diagonal(flow_inverse(y, t), t))
        P = piece.cell_points(pt.cell)
        T = D @ (P[1:] - P[0]).T
        N = D @ np.eye(piece.d)[:, C]
        N[:, :1] *= piece.normal_sign
        free = [j for j in range(piece.d) if 0.0 < y[j] < 1.0]
        E = np.eye(piece.d)[:, free]
        sign = int(np.sign(np.linalg.det(np.hstack([T, N])) * np.linalg.det(np.hstack([T, E]))))
        values[pt.face_cube] = values.get(pt.face_cube, 0) + sign
    return IntCochain(W.complex, W.codim, values)


def test_criterion_9_flow_invariance(criterion):
    with criterion(9, 30, "cI of every experiment input is unchanged by the flow"):
        for make in CONFIGURATIONS.values():
            conf = make()
            for X in (conf.W, conf.V):
                base = intersect_cochain(X)
                assert not base.is_zero()
                for t in range(-10, 11):
                    assert intersect_cochain(flow_cochain(X, t)) == base
                    assert _recounted(X, float(t)) == base
