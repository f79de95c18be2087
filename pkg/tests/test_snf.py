import pytest
from hypothesis import given, settings, strategies as st
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from cubeflow.cochains import coboundary, cup, evaluate
from cubeflow.complex import single_cube
from cubeflow.snf import (cohomology, cohomology_generators, fundamental_cycle, homology_cycles,
                          identity, matmul, smith_normal_form)

from conftest import grid

matrices = st.integers(1, 6).flatmap(lambda m: st.integers(1, 6).flatmap(
    lambda n: st.lists(st.lists(st.integers(-9, 9), min_size=n, max_size=n), min_size=m, max_size=m)))


def invariant_factors(A):
    D = sympy_snf(Matrix(A), domain=ZZ)
    return sorted(abs(int(D[i, i])) for i in range(min(D.shape)) if D[i, i] != 0)


def check_form(A, snf):
    D = matmul(matmul(snf.U, A), snf.V)
    for i, row in enumerate(D):
        for j, x in enumerate(row):
            assert x == (snf.diagonal[i] if i == j and i < snf.rank else 0)
    assert matmul(snf.U, snf.U_inv) == identity(len(A))
    assert matmul(snf.V, snf.V_inv) == identity(len(A[0]))
    assert all(b % a == 0 for a, b in zip(snf.diagonal, snf.diagonal[1:]))


@settings(max_examples=200, deadline=None)
@given(matrices)
def test_smith_form_against_sympy(A):
    snf = smith_normal_form(A)
    check_form(A, snf)
    assert sorted(snf.diagonal) == invariant_factors(A)


def test_known_example():
    A = [[12, 6, 4], [3, 9, 6], [2, 16, 14]]
    assert smith_normal_form(A).diagonal == [1, 10, 30]


def test_large_entries_stay_exact():
    big = 10 ** 30
    A = [[big, big + 1], [big - 1, big]]
    snf = smith_normal_form(A)
    check_form(A, snf)
    assert snf.diagonal == [1, 1]
    A = [[2 ** 70, 0], [0, 3 ** 45]]
    assert smith_normal_form(A).diagonal == [1, 2 ** 70 * 3 ** 45]


def betti(cx):
    return [g.betti for g in cohomology(cx)]


def test_cohomology_examples():
    assert betti(grid(3, 3).complex) == [1, 2, 1]
    assert all(g.torsion == () for g in cohomology(grid(3, 3).complex))
    assert betti(grid(3).complex) == [1, 1]
    assert betti(grid(3, 3, 3).complex) == [1, 3, 3, 1]
    for n in range(4):
        assert betti(single_cube(n)) == [1] + [0] * n


def test_generators_are_independent_cocycles():
    cx = grid(3, 4).complex
    for d in range(3):
        gens = cohomology_generators(cx, d)
        cycles = homology_cycles(cx, d)
        assert len(gens) == betti(cx)[d]
        for a in gens:
            assert coboundary(a).is_zero()
        if d == 1:
            # a basis of H^1 pairs unimodularly with some pair of cycles
            P = Matrix([[evaluate(a, z) for z in cycles] for a in gens])
            assert P.rank() == 2


def test_cup_pairing_on_torus_h1():
    cx = grid(3, 3).complex
    a, b = cohomology_generators(cx, 1)
    z = fundamental_cycle(cx)
    pair = lambda x, y: evaluate(cup(x, y), z)
    M = [[pair(a, a), pair(a, b)], [pair(b, a), pair(b, b)]]
    assert M[0][0] == 0 and M[1][1] == 0
    assert M[0][1] == -M[1][0]
    assert abs(M[0][0] * M[1][1] - M[0][1] * M[1][0]) == 1


def test_fundamental_cycle_requires_single_class():
    with pytest.raises(ValueError):
        fundamental_cycle(single_cube(1))
