"""Combinatorics of the standard n-cube.

Faces of ``I^n`` are partitions ``(F0, F01, F1)`` of ``{1..n}``; coordinates in
``F01`` are free, the others are bound to 0 or 1.  Index sets are exposed
1-based and stored as integer bitmasks (bit ``i-1`` <-> coordinate ``i``).
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator

MAX_DIM = 16


def _mask(indices: Iterable[int], n: int) -> int:
    m = 0
    for i in indices:
        if not 1 <= i <= n:
            raise ValueError(f"coordinate index {i} outside 1..{n}")
        m |= 1 << (i - 1)
    return m


def _indices(mask: int) -> tuple[int, ...]:
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def permutation_sign(seq: Iterable[int]) -> int:
    """Sign of the permutation that sorts ``seq`` (cycle decomposition)."""
    seq = list(seq)
    order = sorted(range(len(seq)), key=seq.__getitem__)
    seen = [False] * len(seq)
    sign = 1
    for start in range(len(seq)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = order[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


@dataclass(frozen=True)
class VertexSet:
    """A vertex of ``I^n``, identified with the set of coordinates equal to 1."""

    n: int
    ones_mask: int

    @classmethod
    def of(cls, n: int, ones: Iterable[int] = ()) -> "VertexSet":
        _check_dim(n)
        return cls(n, _mask(ones, n))

    @property
    def ones(self) -> frozenset[int]:
        return frozenset(_indices(self.ones_mask))

    @property
    def zeros(self) -> frozenset[int]:
        return frozenset(_indices(_full(self.n) & ~self.ones_mask))

    def __le__(self, other: "VertexSet") -> bool:
        _same_n(self.n, other.n)
        return self.ones_mask & ~other.ones_mask == 0

    def __lt__(self, other: "VertexSet") -> bool:
        return self <= other and self != other

    def coords(self) -> tuple[int, ...]:
        return tuple((self.ones_mask >> i) & 1 for i in range(self.n))

    def as_face(self) -> "FacePartition":
        return FacePartition(self.n, _full(self.n) & ~self.ones_mask, 0, self.ones_mask)

    def __repr__(self) -> str:
        return f"VertexSet(n={self.n}, ones={sorted(self.ones)})"


@dataclass(frozen=True)
class FacePartition:
    """A face of ``I^n`` given by bound-to-0, free and bound-to-1 coordinates."""

    n: int
    f0_mask: int
    f01_mask: int
    f1_mask: int

    def __post_init__(self):
        _check_dim(self.n)
        full = _full(self.n)
        if self.f0_mask & self.f01_mask or self.f0_mask & self.f1_mask or self.f01_mask & self.f1_mask:
            raise ValueError("face partition blocks overlap")
        if self.f0_mask | self.f01_mask | self.f1_mask != full:
            raise ValueError("face partition does not cover 1..n")

    @classmethod
    def of(cls, n: int, f0: Iterable[int], f01: Iterable[int], f1: Iterable[int]) -> "FacePartition":
        return cls(n, _mask(f0, n), _mask(f01, n), _mask(f1, n))

    @classmethod
    def full(cls, n: int) -> "FacePartition":
        return cls(n, 0, _full(n), 0)

    @property
    def f0(self) -> frozenset[int]:
        return frozenset(_indices(self.f0_mask))

    @property
    def f01(self) -> frozenset[int]:
        return frozenset(_indices(self.f01_mask))

    @property
    def f1(self) -> frozenset[int]:
        return frozenset(_indices(self.f1_mask))

    @property
    def free(self) -> tuple[int, ...]:
        """Free coordinates, ascending (the canonical orientation of the face)."""
        return _indices(self.f01_mask)

    @property
    def bound(self) -> tuple[int, ...]:
        return _indices(self.f0_mask | self.f1_mask)

    @property
    def dim(self) -> int:
        return bin(self.f01_mask).count("1")

    @property
    def is_vertex(self) -> bool:
        return self.f01_mask == 0

    @property
    def is_initial(self) -> bool:
        return self.f1_mask == 0

    @property
    def is_terminal(self) -> bool:
        return self.f0_mask == 0

    def bound_value(self, i: int) -> int:
        if self.f0_mask >> (i - 1) & 1:
            return 0
        if self.f1_mask >> (i - 1) & 1:
            return 1
        raise ValueError(f"coordinate {i} is free in {self}")

    def initial_vertex(self) -> VertexSet:
        return VertexSet(self.n, self.f1_mask)

    def terminal_vertex(self) -> VertexSet:
        return VertexSet(self.n, self.f1_mask | self.f01_mask)

    def vertices(self) -> list[VertexSet]:
        """Vertices of the face in binary-counting order of its free coordinates."""
        free = self.free
        out = []
        for b in range(1 << len(free)):
            m = self.f1_mask
            for k, i in enumerate(free):
                if b >> k & 1:
                    m |= 1 << (i - 1)
            out.append(VertexSet(self.n, m))
        return out

    def contains(self, other: "FacePartition") -> bool:
        """True when ``other`` is a face of ``self``."""
        _same_n(self.n, other.n)
        return other.f0_mask & ~self.f0_mask & ~self.f01_mask == 0 and \
            other.f1_mask & ~self.f1_mask & ~self.f01_mask == 0 and \
            other.f01_mask & ~self.f01_mask == 0

    def __repr__(self) -> str:
        return f"Face({sorted(self.f0)}, {sorted(self.f01)}, {sorted(self.f1)})"


def _full(n: int) -> int:
    return (1 << n) - 1


def _check_dim(n: int) -> None:
    if not 0 <= n <= MAX_DIM:
        raise ValueError(f"cube dimension {n} outside 0..{MAX_DIM}")


def _same_n(a: int, b: int) -> None:
    if a != b:
        raise ValueError(f"dimension mismatch: {a} vs {b}")


def face_from_interval(v: VertexSet, w: VertexSet) -> FacePartition:
    """The face whose vertex interval is ``[v, w]``."""
    _same_n(v.n, w.n)
    if not v <= w:
        raise ValueError(f"{v} is not below {w}; [v, w] is not an interval")
    full = _full(v.n)
    f1 = v.ones_mask & w.ones_mask
    f0 = full & ~v.ones_mask & ~w.ones_mask
    return FacePartition(v.n, f0, full & ~f0 & ~f1, f1)


def face_decomposition(face: FacePartition) -> tuple[FacePartition, FacePartition]:
    """Return ``(F-, F+)``: the face before ``face`` and the face after it."""
    minus = FacePartition(face.n, face.f0_mask | face.f01_mask, face.f1_mask, 0)
    plus = FacePartition(face.n, 0, face.f0_mask, face.f1_mask | face.f01_mask)
    return minus, plus


def reciprocal_vertex(f: FacePartition, g: FacePartition) -> VertexSet | None:
    """The vertex ``v`` with ``f = v-`` and ``g = v+``, or None if the pair is not reciprocal."""
    _same_n(f.n, g.n)
    if not f.is_initial or not g.is_terminal:
        return None
    if face_decomposition(f)[1] != g:
        return None
    return f.terminal_vertex()


def is_reciprocal(f: FacePartition, g: FacePartition) -> bool:
    return reciprocal_vertex(f, g) is not None


def shuffle_sign(face: FacePartition) -> int:
    """Orientation sign of ``I^n = F- x F x F+``.

    The concatenated frame lists the free coordinates of ``F-`` (= ``F1``),
    then those of ``F`` and then those of ``F+`` (= ``F0``), each ascending.
    The sign is the parity of the shuffle, counted as inversions with a
    running tally of how many later blocks precede each index.
    """
    blocks = (face.f1_mask, face.f01_mask, face.f0_mask)
    inversions = 0
    for k, block in enumerate(blocks):
        later = 0
        for other in blocks[k + 1:]:
            later |= other
        for i in _indices(block):
            inversions += bin(later & ((1 << (i - 1)) - 1)).count("1")
    return -1 if inversions % 2 else 1


def face_inclusion_vertex(i: int, eps: int, v: VertexSet) -> VertexSet:
    """Insert coordinate ``eps`` at slot ``i`` of a vertex of ``I^(n-1)``."""
    n = v.n + 1
    if not 1 <= i <= n:
        raise ValueError(f"slot {i} outside 1..{n}")
    if eps not in (0, 1):
        raise ValueError("eps must be 0 or 1")
    low = v.ones_mask & ((1 << (i - 1)) - 1)
    high = (v.ones_mask >> (i - 1)) << i
    return VertexSet(n, low | high | (eps << (i - 1)))


def face_inclusion_point(i: int, eps: int, x) -> tuple[float, ...]:
    x = tuple(x)
    if not 1 <= i <= len(x) + 1:
        raise ValueError(f"slot {i} outside 1..{len(x) + 1}")
    return x[: i - 1] + (float(eps),) + x[i - 1:]


def enumerate_faces(n: int, d: int | None = None, *, initial: bool | None = None,
                    terminal: bool | None = None) -> list[FacePartition]:
    """All faces of ``I^n`` (optionally of dimension ``d``, filtered by initial/terminal)."""
    _check_dim(n)
    if d is not None and not 0 <= d <= n:
        raise ValueError(f"dimension {d} outside 0..{n}")
    dims = range(n + 1) if d is None else (d,)
    out = []
    coords = range(1, n + 1)
    for k in dims:
        for free in combinations(coords, k):
            rest = [i for i in coords if i not in free]
            for b in range(1 << len(rest)):
                f1 = [rest[j] for j in range(len(rest)) if b >> j & 1]
                f0 = [i for i in rest if i not in f1]
                face = FacePartition.of(n, f0, free, f1)
                if initial is not None and face.is_initial != initial:
                    continue
                if terminal is not None and face.is_terminal != terminal:
                    continue
                out.append(face)
    return out


def vertices(n: int) -> Iterator[VertexSet]:
    for m in range(1 << n):
        yield VertexSet(n, m)
