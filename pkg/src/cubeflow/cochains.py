"""Integer cubical chains, cochains and the cup product.

Coefficients are Python ints, so arithmetic is exact and never overflows.
Pairing convention: ``(delta alpha)(c) = alpha(boundary c)`` with no extra sign.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Mapping

from .complex import CubicalComplex
from .cube import FacePartition, face_decomposition, shuffle_sign, vertices


def _clean(values: Mapping[int, int]) -> dict[int, int]:
    return {int(k): int(v) for k, v in values.items() if v != 0}


class _Graded:
    __slots__ = ("complex", "degree", "values")

    def __init__(self, complex: CubicalComplex, degree: int, values: Mapping[int, int] | None = None):
        self.complex = complex
        self.degree = int(degree)
        self.values = _clean(values or {})
        for c in self.values:
            if complex.dim(c) != self.degree:
                raise ValueError(f"cube {c} has dimension {complex.dim(c)}, not {self.degree}")

    def __getitem__(self, cube: int) -> int:
        return self.values.get(cube, 0)

    def _combine(self, other, scale: int):
        if self.complex is not other.complex and self.complex != other.complex:
            raise ValueError("operands live on different complexes")
        if self.degree != other.degree:
            raise ValueError(f"degree mismatch: {self.degree} vs {other.degree}")
        out = dict(self.values)
        for k, v in other.values.items():
            out[k] = out.get(k, 0) + scale * v
        return type(self)(self.complex, self.degree, out)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return type(self)(self.complex, self.degree, {k: -v for k, v in self.values.items()})

    def __mul__(self, k: int):
        return type(self)(self.complex, self.degree, {c: k * v for c, v in self.values.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self.degree == other.degree and self.values == other.values

    def __hash__(self):
        return hash((self.degree, frozenset(self.values.items())))

    def is_zero(self) -> bool:
        return not self.values

    def __repr__(self):
        return f"{type(self).__name__}(degree={self.degree}, values={dict(sorted(self.values.items()))})"


class IntChain(_Graded):
    __slots__ = ()


class IntCochain(_Graded):
    __slots__ = ()

    @classmethod
    def indicator(cls, complex: CubicalComplex, cube: int, value: int = 1) -> "IntCochain":
        return cls(complex, complex.dim(cube), {cube: value})

    def to_json(self) -> dict:
        return {"degree": self.degree, "values": {str(k): v for k, v in sorted(self.values.items())}}

    @classmethod
    def from_json(cls, complex: CubicalComplex, data: dict) -> "IntCochain":
        try:
            degree = int(data["degree"])
            values = {int(k): int(v) for k, v in data["values"].items()}
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed cochain JSON: {exc!r}") from exc
        for k in values:
            if not 0 <= k < len(complex.cubes):
                raise ValueError(f"cube index {k} out of range")
        return cls(complex, degree, values)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=1))

    @classmethod
    def load(cls, complex: CubicalComplex, path: str | Path) -> "IntCochain":
        return cls.from_json(complex, json.loads(Path(path).read_text()))


@lru_cache(maxsize=None)
def local_boundary(n: int) -> tuple[tuple[FacePartition, int], ...]:
    """Codimension-one faces of ``I^n`` with their boundary signs.

    The k-th free coordinate (0-based) contributes ``(-1)^k ([1] - [0])``.
    """
    full = (1 << n) - 1
    out = []
    for k in range(n):
        bit = 1 << k
        sign = -1 if k % 2 else 1
        out.append((FacePartition(n, 0, full & ~bit, bit), sign))
        out.append((FacePartition(n, bit, full & ~bit, 0), -sign))
    return tuple(out)


def _boundary_table(complex: CubicalComplex) -> tuple[dict[int, int], ...]:
    table = []
    for cube in range(len(complex.cubes)):
        out: dict[int, int] = {}
        if complex.dim(cube) > 0:
            for face, sign in local_boundary(complex.dim(cube)):
                f = complex.face_cube(cube, face)
                out[f] = out.get(f, 0) + sign
        table.append(out)
    return tuple(table)


def _coboundary_table(complex: CubicalComplex) -> dict[int, list[tuple[int, int]]]:
    table: dict[int, list[tuple[int, int]]] = {}
    for cube, faces in enumerate(complex.memo("boundary", lambda: _boundary_table(complex))):
        for f, s in faces.items():
            table.setdefault(f, []).append((cube, s))
    return table


def cube_boundary(complex: CubicalComplex, cube: int) -> dict[int, int]:
    return dict(complex.memo("boundary", lambda: _boundary_table(complex))[cube])


def boundary(c: IntChain) -> IntChain:
    """Cellular boundary; a 0-chain maps to the zero chain of degree -1."""
    if c.degree <= 0:
        return IntChain(c.complex, c.degree - 1)
    table = c.complex.memo("boundary", lambda: _boundary_table(c.complex))
    out: dict[int, int] = {}
    for cube, coeff in c.values.items():
        for f, s in table[cube].items():
            out[f] = out.get(f, 0) + s * coeff
    return IntChain(c.complex, c.degree - 1, out)


def coboundary(alpha: IntCochain) -> IntCochain:
    cx = alpha.complex
    table = cx.memo("coboundary", lambda: _coboundary_table(cx))
    out: dict[int, int] = {}
    for f, value in alpha.values.items():
        for cube, s in table.get(f, ()):
            out[cube] = out.get(cube, 0) + s * value
    return IntCochain(cx, alpha.degree + 1, out)


def evaluate(alpha: IntCochain, c: IntChain) -> int:
    """The pairing; cochains and chains of different degree pair to 0."""
    if alpha.degree != c.degree:
        return 0
    small, large = (alpha.values, c.values) if len(alpha.values) < len(c.values) else (c.values, alpha.values)
    return sum(v * large.get(k, 0) for k, v in small.items())


# -- the diagonal -------------------------------------------------------------

@lru_cache(maxsize=None)
def local_diagonal(n: int) -> tuple[tuple[FacePartition, FacePartition, int], ...]:
    """Terms ``sh(v) v- (x) v+`` of the diagonal of ``I^n``, one per vertex ``v``."""
    out = []
    for v in vertices(n):
        minus, plus = face_decomposition(v.as_face())
        out.append((minus, plus, shuffle_sign(v.as_face())))
    return tuple(out)


@lru_cache(maxsize=None)
def koszul_diagonal(n: int) -> tuple[tuple[FacePartition, FacePartition, int], ...]:
    """Diagonal of ``I^n`` from the tensor formula, signs by the Koszul rule.

    ``I^n`` is the n-fold tensor power of the interval, whose diagonal is
    ``[0] (x) [0,1] + [0,1] (x) [1]``.  Expanding and moving every right factor
    past the left factors of later coordinates costs
    ``(-1)^(|x_j''| |x_i'|)`` for each ``j < i``.
    """
    # per coordinate: (left dim, left kind, right dim, right kind); kind in {"0", "01", "1"}
    choices = ((0, "0", 1, "01"), (1, "01", 0, "1"))
    out = []
    for pick in itertools.product(choices, repeat=n):
        sign = 1
        for i in range(n):
            for j in range(i):
                if pick[j][2] * pick[i][0] % 2:
                    sign = -sign
        left = {"0": [], "01": [], "1": []}
        right = {"0": [], "01": [], "1": []}
        for i, (_, lk, _, rk) in enumerate(pick, start=1):
            left[lk].append(i)
            right[rk].append(i)
        out.append((FacePartition.of(n, left["0"], left["01"], left["1"]),
                    FacePartition.of(n, right["0"], right["01"], right["1"]), sign))
    return tuple(out)


@dataclass(frozen=True)
class DiagonalTerm:
    left: int
    right: int
    sign: int


def serre_diagonal(complex: CubicalComplex, cube: int) -> list[DiagonalTerm]:
    return [DiagonalTerm(complex.face_cube(cube, l), complex.face_cube(cube, r), s)
            for l, r, s in local_diagonal(complex.dim(cube))]


def cup(alpha: IntCochain, beta: IntCochain) -> IntCochain:
    cx = alpha.complex
    if beta.complex is not cx and beta.complex != cx:
        raise ValueError("cochains live on different complexes")
    degree = alpha.degree + beta.degree
    out: dict[int, int] = {}
    if alpha.values and beta.values:
        for cube in cx.cubes_of_dim(degree):
            total = 0
            for term in serre_diagonal(cx, cube):
                if cx.dim(term.left) == alpha.degree:
                    total += term.sign * alpha[term.left] * beta[term.right]
            if total:
                out[cube] = total
    return IntCochain(cx, degree, out)
