"""Exact Smith normal form and integral cohomology of cubical complexes."""
from __future__ import annotations

from dataclasses import dataclass

from .cochains import IntChain, IntCochain, cube_boundary
from .complex import CubicalComplex

Matrix = list[list[int]]


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if not a:
        return []
    cols = len(b[0]) if b else 0
    bt = list(zip(*b)) if b else [() for _ in range(cols)]
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


@dataclass
class SmithForm:
    """``U @ A @ V == D`` with ``D`` diagonal, ``d_1 | d_2 | ...`` and all ``d_i > 0``."""

    diagonal: list[int]
    U: Matrix
    U_inv: Matrix
    V: Matrix
    V_inv: Matrix

    @property
    def rank(self) -> int:
        return len(self.diagonal)


class _Reducer:
    def __init__(self, A: Matrix):
        self.A = [list(map(int, r)) for r in A]
        self.m = len(self.A)
        self.n = len(self.A[0]) if self.A else 0
        self.U, self.U_inv = identity(self.m), identity(self.m)
        self.V, self.V_inv = identity(self.n), identity(self.n)

    # row i += k * row j
    def add_row(self, i, j, k):
        if k == 0:
            return
        for M in (self.A, self.U):
            ri, rj = M[i], M[j]
            for c in range(len(ri)):
                ri[c] += k * rj[c]
        for r in self.U_inv:
            r[j] -= k * r[i]

    def swap_rows(self, i, j):
        if i == j:
            return
        for M in (self.A, self.U):
            M[i], M[j] = M[j], M[i]
        for r in self.U_inv:
            r[i], r[j] = r[j], r[i]

    def negate_row(self, i):
        for M in (self.A, self.U):
            M[i] = [-x for x in M[i]]
        for r in self.U_inv:
            r[i] = -r[i]

    # col i += k * col j
    def add_col(self, i, j, k):
        if k == 0:
            return
        for M in (self.A, self.V):
            for r in M:
                r[i] += k * r[j]
        ri, rj = self.V_inv[i], self.V_inv[j]
        for c in range(len(rj)):
            rj[c] -= k * ri[c]

    def swap_cols(self, i, j):
        if i == j:
            return
        for M in (self.A, self.V):
            for r in M:
                r[i], r[j] = r[j], r[i]
        self.V_inv[i], self.V_inv[j] = self.V_inv[j], self.V_inv[i]

    def _smallest(self, t):
        best = None
        for i in range(t, self.m):
            row = self.A[i]
            for j in range(t, self.n):
                x = row[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        return best
        return best

    def run(self) -> SmithForm:
        A = self.A
        diag = []
        for t in range(min(self.m, self.n)):
            found = self._smallest(t)
            if found is None:
                break
            _, i, j = found
            self.swap_rows(t, i)
            self.swap_cols(t, j)
            while True:
                clean = True
                for i in range(t + 1, self.m):
                    if A[i][t]:
                        self.add_row(i, t, -(A[i][t] // A[t][t]))
                        if A[i][t]:
                            clean = False
                for j in range(t + 1, self.n):
                    if A[t][j]:
                        self.add_col(j, t, -(A[t][j] // A[t][t]))
                        if A[t][j]:
                            clean = False
                if not clean:
                    # move the smallest leftover in row/column t onto the pivot
                    cands = [(abs(A[i][t]), i, t) for i in range(t + 1, self.m) if A[i][t]]
                    cands += [(abs(A[t][j]), t, j) for j in range(t + 1, self.n) if A[t][j]]
                    _, i, j = min(cands)
                    self.swap_rows(t, i)
                    self.swap_cols(t, j)
                    continue
                p = A[t][t]
                bad = next((i for i in range(t + 1, self.m)
                            if any(A[i][j] % p for j in range(t + 1, self.n))), None)
                if bad is None:
                    break
                self.add_row(t, bad, 1)
            if A[t][t] < 0:
                self.negate_row(t)
            diag.append(A[t][t])
        return SmithForm(diag, self.U, self.U_inv, self.V, self.V_inv)


def smith_normal_form(A: Matrix) -> SmithForm:
    return _Reducer(A).run()


# -- (co)homology ---------------------------------------------------------------

def boundary_matrix(cx: CubicalComplex, d: int) -> Matrix:
    """Matrix of the boundary from d-chains to (d-1)-chains (rows: (d-1)-cubes)."""
    rows = cx.cubes_of_dim(d - 1)
    cols = cx.cubes_of_dim(d)
    pos = {c: i for i, c in enumerate(rows)}
    M = [[0] * len(cols) for _ in rows]
    for j, c in enumerate(cols):
        for f, s in cube_boundary(cx, c).items():
            M[pos[f]][j] += s
    return M


def coboundary_matrix(cx: CubicalComplex, d: int) -> Matrix:
    """Matrix of the coboundary from d-cochains to (d+1)-cochains."""
    B = boundary_matrix(cx, d + 1)
    n_d = len(cx.cubes_of_dim(d))
    if not B:
        return [[0] * n_d for _ in cx.cubes_of_dim(d + 1)]
    return [list(r) for r in zip(*B)]


@dataclass(frozen=True)
class CohomologyGroup:
    degree: int
    betti: int
    torsion: tuple[int, ...]


def _rank_and_factors(M: Matrix) -> tuple[int, list[int]]:
    if not M or not M[0]:
        return 0, []
    snf = smith_normal_form(M)
    return snf.rank, [d for d in snf.diagonal if d > 1]


def cohomology(cx: CubicalComplex) -> list[CohomologyGroup]:
    top = cx.top_dim
    ranks, factors = {}, {}
    for d in range(top):
        ranks[d], factors[d] = _rank_and_factors(coboundary_matrix(cx, d))
    out = []
    for d in range(top + 1):
        n_d = len(cx.cubes_of_dim(d))
        betti = n_d - ranks.get(d, 0) - ranks.get(d - 1, 0)
        out.append(CohomologyGroup(d, betti, tuple(factors.get(d - 1, []))))
    return out


def cohomology_generators(cx: CubicalComplex, d: int) -> list[IntCochain]:
    """Cocycles whose classes form a basis of the free part of ``H^d``."""
    cubes = cx.cubes_of_dim(d)
    n = len(cubes)
    if d < cx.top_dim:
        snf = smith_normal_form(coboundary_matrix(cx, d))
        r = snf.rank
        K = [row[r:] for row in snf.V]
        V_inv = snf.V_inv
    else:
        r = 0
        K, V_inv = identity(n), identity(n)
    k = n - r
    if d > 0:
        B = coboundary_matrix(cx, d - 1)
        C = [row for row in matmul(V_inv, B)[r:]] if B and B[0] else [[0] for _ in range(k)]
    else:
        C = [[0] for _ in range(k)]
    inner = smith_normal_form(C)
    basis = matmul(K, inner.U_inv)
    gens = []
    for j in range(inner.rank, k):
        gens.append(IntCochain(cx, d, {cubes[i]: basis[i][j] for i in range(n)}))
    return gens


def homology_cycles(cx: CubicalComplex, d: int) -> list[IntChain]:
    """A basis of the integral cycles ``ker(boundary)`` in degree ``d``."""
    cubes = cx.cubes_of_dim(d)
    if d == 0:
        return [IntChain(cx, 0, {c: 1}) for c in cubes]
    snf = smith_normal_form(boundary_matrix(cx, d))
    return [IntChain(cx, d, {c: row[j] for c, row in zip(cubes, snf.V)})
            for j in range(snf.rank, len(cubes))]


def fundamental_cycle(cx: CubicalComplex) -> IntChain:
    cycles = homology_cycles(cx, cx.top_dim)
    if len(cycles) != 1:
        raise ValueError(f"expected a single top-dimensional cycle, found {len(cycles)}")
    z = cycles[0]
    # normalise so the first cube carries +1
    first = min(z.values)
    return z if z.values[first] > 0 else -z
