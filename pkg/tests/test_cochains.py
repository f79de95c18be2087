import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cubeflow.cochains import (IntChain, IntCochain, boundary, coboundary, cup, evaluate,
                               koszul_diagonal, local_diagonal, serre_diagonal)
from cubeflow.complex import single_cube
from cubeflow.cube import FacePartition
from cubeflow.snf import fundamental_cycle

from conftest import grid, random_cochain


def recursive_diagonal(n):
    """Diagonal of I^n built as Delta(I^(n-1)) (x) Delta(I), with Koszul signs.

    Faces are words over {"0", "x", "1"}; the interval contributes
    0(x)x + x(x)1, and moving the new left letter past the old right word
    costs (-1)^(|old right| * |new left|).
    """
    terms = {("", ""): 1}
    for _ in range(n):
        nxt = {}
        for (l, r), s in terms.items():
            for a, b in (("0", "x"), ("x", "1")):
                sign = s * (-1) ** (r.count("x") * a.count("x"))
                nxt[(l + a, r + b)] = sign
        terms = nxt
    return terms


def word(face):
    return "".join("x" if i in face.f01 else ("1" if i in face.f1 else "0") for i in range(1, face.n + 1))


@pytest.mark.parametrize("n", range(7))
def test_serre_diagonal_matches_recursive_expansion(n):
    oracle = recursive_diagonal(n)
    serre = {(word(l), word(r)): s for l, r, s in local_diagonal(n)}
    assert serre == oracle
    assert {(word(l), word(r)): s for l, r, s in koszul_diagonal(n)} == oracle
    assert len(serre) == 2 ** n


def test_diagonal_examples():
    assert {(word(l), word(r)): s for l, r, s in local_diagonal(0)} == {("", ""): 1}
    assert {(word(l), word(r)): s for l, r, s in local_diagonal(1)} == {("0", "x"): 1, ("x", "1"): 1}
    square = {(word(l), word(r)): s for l, r, s in local_diagonal(2)}
    assert square == {("00", "xx"): 1, ("x0", "1x"): 1, ("0x", "x1"): -1, ("xx", "11"): 1}


def test_edge_and_square_boundary():
    cx = single_cube(2)
    sq = cx.cubes_of_dim(2)[0]
    edge = cx.face_cube(sq, FacePartition.of(2, [2], [1], []))
    d = boundary(IntChain(cx, 1, {edge: 1})).values
    v0 = cx.cube_with_vertices([cx.cubes[sq][0]])
    v1 = cx.cube_with_vertices([cx.cubes[sq][1]])
    assert d == {v1: 1, v0: -1}
    side = {name: cx.face_cube(sq, f) for name, f in {
        "bottom": FacePartition.of(2, [2], [1], []), "top": FacePartition.of(2, [], [1], [2]),
        "left": FacePartition.of(2, [1], [2], []), "right": FacePartition.of(2, [], [2], [1])}.items()}
    d = boundary(IntChain(cx, 2, {sq: 1})).values
    assert d == {side["right"]: 1, side["left"]: -1, side["top"]: -1, side["bottom"]: 1}


def test_degree_zero_boundary_is_zero():
    cx = single_cube(1)
    b = boundary(IntChain(cx, 0, {0: 3}))
    assert b.degree == -1 and b.is_zero()


def test_fundamental_cycle_of_torus():
    cx = grid(3, 3).complex
    z = fundamental_cycle(cx)
    assert set(z.values) == set(cx.cubes_of_dim(2))
    assert {abs(c) for c in z.values.values()} == {1}
    assert boundary(z).is_zero()


def test_vertex_coboundary_on_circle():
    g = grid(3)
    cx = g.complex
    v = cx.cube_with_vertices([g.vertex_at[(1,)]])
    d = coboundary(IntCochain.indicator(cx, v))
    expected = {}
    for e in cx.cubes_of_dim(1):
        a, b = cx.cubes[e]
        if g.vertex_at[(1,)] in (a, b):
            expected[e] = 1 if b == g.vertex_at[(1,)] else -1
    assert d.values == expected and len(expected) == 2
    assert coboundary(IntCochain(cx, 0)).is_zero()


def test_column_cochain_is_cocycle():
    g = grid(3, 3)
    cx = g.complex
    v = g.vertex_at
    edges = [cx.cube_with_vertices([v[0, j], v[1, j]]) for j in range(3)]
    alpha = IntCochain(cx, 1, {e: 1 for e in edges})
    assert coboundary(alpha).is_zero()


def test_cup_examples_on_square():
    g = grid(3, 3)
    cx = g.complex
    sq = g.top_at[(1, 1)]
    side = lambda f: cx.face_cube(sq, f)
    bottom, right = side(FacePartition.of(2, [2], [1], [])), side(FacePartition.of(2, [], [2], [1]))
    left, top = side(FacePartition.of(2, [1], [2], [])), side(FacePartition.of(2, [], [1], [2]))
    ind = lambda c: IntCochain.indicator(cx, c)
    assert cup(ind(bottom), ind(right)).values == {sq: 1}
    assert cup(ind(left), ind(top)).values == {sq: -1}
    assert cup(ind(bottom), IntCochain(cx, 1)).is_zero()


def test_evaluate_conventions():
    cx = single_cube(2)
    sq = cx.cubes_of_dim(2)[0]
    assert evaluate(IntCochain.indicator(cx, sq), IntChain(cx, 2, {sq: 1})) == 1
    assert evaluate(IntCochain.indicator(cx, sq), IntChain(cx, 1, {cx.cubes_of_dim(1)[0]: 1})) == 0


def test_zero_coefficients_dropped_and_degree_checked():
    cx = single_cube(2)
    c = IntCochain(cx, 1, {cx.cubes_of_dim(1)[0]: 0})
    assert c.values == {}
    with pytest.raises(ValueError):
        IntCochain(cx, 1, {cx.cubes_of_dim(2)[0]: 1})


def test_cochain_json(tmp_path):
    cx = grid(3, 3).complex
    alpha = IntCochain(cx, 1, {cx.cubes_of_dim(1)[2]: -4, cx.cubes_of_dim(1)[5]: 1})
    p = tmp_path / "a.json"
    alpha.save(p)
    data = json.loads(p.read_text())
    assert set(data) == {"degree", "values"} and all(isinstance(k, str) for k in data["values"])
    assert IntCochain.load(cx, p) == alpha


SHAPES = [(3, 3), (3, 4), (3, 3, 3)]


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(SHAPES), st.integers(0, 2 ** 32 - 1))
def test_boundary_and_coboundary_square_to_zero(shape, seed):
    rng = np.random.default_rng(seed)
    cx = grid(*shape).complex
    for d in range(cx.top_dim + 1):
        a = random_cochain(cx, d, rng)
        assert coboundary(coboundary(a)).is_zero()
        c = IntChain(cx, d, random_cochain(cx, d, rng).values)
        assert boundary(boundary(c)).is_zero()
        if d < cx.top_dim:
            c1 = IntChain(cx, d + 1, random_cochain(cx, d + 1, rng).values)
            assert evaluate(coboundary(a), c1) == evaluate(a, boundary(c1))


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(SHAPES), st.integers(0, 2 ** 32 - 1))
def test_cup_associative_and_leibniz(shape, seed):
    rng = np.random.default_rng(seed)
    cx = grid(*shape).complex
    n = cx.top_dim
    p, q = rng.integers(0, n + 1, size=2)
    r = int(rng.integers(0, n - min(n, p + q) + 1)) if p + q <= n else 0
    if p + q > n:
        p, q = 0, q
    a, b, c = (random_cochain(cx, int(k), rng) for k in (p, q, r))
    assert cup(cup(a, b), c) == cup(a, cup(b, c))
    lhs = coboundary(cup(a, b))
    rhs = cup(coboundary(a), b) + cup(a, coboundary(b)) * (-1) ** int(p)
    assert lhs == rhs


@given(st.integers(0, 2 ** 32 - 1))
def test_cup_bilinear(seed):
    rng = np.random.default_rng(seed)
    cx = grid(3, 3).complex
    a, a2, b = random_cochain(cx, 1, rng), random_cochain(cx, 1, rng), random_cochain(cx, 1, rng)
    assert cup(a + a2, b) == cup(a, b) + cup(a2, b)
    assert cup(a * 3, b) == cup(a, b) * 3


def test_serre_diagonal_on_complex_cubes():
    g = grid(3, 3)
    sq = g.top_at[(0, 0)]
    terms = serre_diagonal(g.complex, sq)
    assert len(terms) == 4
    assert sorted(t.sign for t in terms) == [-1, 1, 1, 1]
