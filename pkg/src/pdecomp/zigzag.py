"""Zigzag modules and their decomposition through an exact grid extension.

A normalized zigzag alternates ``N_0 -> N_1 <- N_2 -> N_3 <- ...``: map ``j``
points forward (from ``j`` to ``j + 1``) when ``j`` is even. With
``K = L // 2`` the space ``N_{2i}`` sits at grid point ``(i, K - i)`` and
``N_{2i+1}`` at ``(i + 1, K - i)``, so the zigzag occupies the two
antidiagonals ``x + y = K`` and ``x + y = K + 1``. Points above are filled
by pushouts, points below by pullbacks; every unit square is then one of the
two, hence exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .blocks import Barcode
from .decompose import decompose
from .errors import DimensionError, InconsistencyError, StructureError
from .field import PrimeField, direct_sum_matrix
from .grid import GridModule, Point, fill_pullbacks, fill_pushouts, module_from_dicts, pullback, pushout, validate

FWD, BWD = "fwd", "bwd"


@dataclass(frozen=True, eq=False)
class Zigzag:
    """Spaces ``dims[0..L]`` and ``L`` maps, each ``(direction, matrix)``.

    A ``"fwd"`` map goes from space ``i`` to ``i + 1``; a ``"bwd"`` map from
    ``i + 1`` to ``i``.
    """

    field: PrimeField
    dims: tuple[int, ...]
    maps: tuple[tuple[str, np.ndarray], ...] = ()

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims:
            raise StructureError("a zigzag needs at least one space")
        if any(d < 0 for d in dims):
            raise StructureError("negative dimension in zigzag")
        if len(self.maps) != len(dims) - 1:
            raise StructureError(f"{len(dims)} spaces need {len(dims) - 1} maps, got {len(self.maps)}")
        maps = []
        for i, (direction, mat) in enumerate(self.maps):
            if direction not in (FWD, BWD):
                raise StructureError(f"map {i}: direction must be 'fwd' or 'bwd'")
            src, dst = (i, i + 1) if direction == FWD else (i + 1, i)
            try:
                maps.append((direction, self.field.matrix(mat, (dims[dst], dims[src]))))
            except DimensionError as exc:
                raise StructureError(f"map {i}: {exc}") from None
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "maps", tuple(maps))

    @property
    def length(self) -> int:
        return len(self.dims) - 1

    def is_alternating(self) -> bool:
        return all(d == (FWD if j % 2 == 0 else BWD) for j, (d, _) in enumerate(self.maps))


@dataclass(eq=False)
class IntervalBarcode:
    """Multiset of index intervals ``[i, j]`` inside ``[0, L]``."""

    length: int
    entries: dict[tuple[int, int], int] = field(default_factory=dict)

    def __post_init__(self):
        clean: dict[tuple[int, int], int] = {}
        for (i, j), k in self.entries.items():
            i, j, k = int(i), int(j), int(k)
            if not 0 <= i <= j <= self.length:
                raise StructureError(f"interval [{i}, {j}] outside [0, {self.length}]")
            if k < 0:
                raise StructureError("negative interval multiplicity")
            if k:
                clean[(i, j)] = clean.get((i, j), 0) + k
        self.entries = dict(sorted(clean.items()))

    def __eq__(self, other):
        if not isinstance(other, IntervalBarcode):
            return NotImplemented
        return self.length == other.length and self.entries == other.entries

    def __repr__(self):
        body = ", ".join(f"[{i},{j}]: {k}" for (i, j), k in self.entries.items())
        return f"IntervalBarcode(L={self.length}, {{{body}}})"

    def __len__(self):
        return sum(self.entries.values())

    def items(self):
        return self.entries.items()

    def count_containing(self, lo: int, hi: Optional[int] = None) -> int:
        """Number of intervals (with multiplicity) containing both ``lo`` and ``hi``."""
        hi = lo if hi is None else hi
        lo, hi = min(lo, hi), max(lo, hi)
        return sum(k for (i, j), k in self.entries.items() if i <= lo and hi <= j)


# -- normalization and grid extension ---------------------------------------


def normalize(Z: Zigzag) -> tuple[Zigzag, list[int]]:
    """Insert identity maps until directions alternate, starting forward.

    Returns the normalized zigzag and, for every original index, its position
    in the normalized one.
    """
    F = Z.field
    dims = [Z.dims[0]]
    maps: list[tuple[str, np.ndarray]] = []
    position = [0]
    for i, (direction, mat) in enumerate(Z.maps):
        wanted = FWD if len(maps) % 2 == 0 else BWD
        if direction != wanted:
            # A copy of the current space absorbs one step of the pattern.
            maps.append((wanted, F.identity(Z.dims[i])))
            dims.append(Z.dims[i])
        maps.append((direction, mat))
        dims.append(Z.dims[i + 1])
        position.append(len(dims) - 1)
    return Zigzag(F, tuple(dims), tuple(maps)), position


def staircase(length: int) -> list[Point]:
    """Grid positions of ``N_0 .. N_L`` for an alternating zigzag of length ``L``."""
    k = length // 2
    return [(i // 2 + i % 2, k - i // 2) for i in range(length + 1)]


def extend_to_grid(Z: Zigzag, check: bool = True) -> tuple[GridModule, list[Point]]:
    """Embed an alternating zigzag in an exact grid module.

    Returns the module and the staircase, i.e. the grid point of each zigzag
    index.
    """
    if not Z.is_alternating():
        raise StructureError("extend_to_grid needs an alternating zigzag; call normalize first")
    F = Z.field
    L = Z.length
    K = L // 2
    n, m = (L + 1) // 2, K
    stairs = staircase(L)
    dims: dict[Point, int] = {t: d for t, d in zip(stairs, Z.dims)}
    H: dict[Point, np.ndarray] = {}
    V: dict[Point, np.ndarray] = {}
    for j, (direction, mat) in enumerate(Z.maps):
        if direction == FWD:
            H[stairs[j]] = mat
        else:
            V[stairs[j + 1]] = mat

    fill_pushouts(F, n, m, dims, H, V, first=K + 2)
    fill_pullbacks(F, n, m, dims, H, V, last=K - 1)
    M = module_from_dicts(F, n, m, dims, H, V)
    if check:
        report = validate(M)
        if not report.exact:
            raise InconsistencyError(f"grid extension of a zigzag is not exact: {report.summary()}")
    return M, stairs


def barcode_to_intervals(B: Barcode, stairs: Sequence[Point]) -> IntervalBarcode:
    """Maximal runs of staircase indices inside each block support."""
    out: dict[tuple[int, int], int] = {}
    for shape, mult in B.items():
        x0, x1, y0, y1 = shape.box(B.n, B.m)
        inside = [x0 <= x <= x1 and y0 <= y <= y1 for x, y in stairs]
        start = None
        for i, flag in enumerate(inside + [False]):
            if flag and start is None:
                start = i
            elif not flag and start is not None:
                out[(start, i - 1)] = out.get((start, i - 1), 0) + mult
                start = None
    return IntervalBarcode(len(stairs) - 1, out)


def zigzag_decompose(Z: Zigzag, threads: Optional[int] = None) -> IntervalBarcode:
    """Interval decomposition of a zigzag, in the caller's original indexing."""
    normal, position = normalize(Z)
    M, stairs = extend_to_grid(normal)
    intervals = barcode_to_intervals(decompose(M, threads=threads), stairs)
    # Inserted copies are tied to an original neighbour by an identity map, so
    # an interval never starts or ends on one; map back by membership.
    back: dict[tuple[int, int], int] = {}
    for (i, j), k in intervals.items():
        members = [orig for orig, pos in enumerate(position) if i <= pos <= j]
        if not members:
            raise InconsistencyError(f"interval [{i}, {j}] covers only inserted copies")
        key = (members[0], members[-1])
        back[key] = back.get(key, 0) + k
    return IntervalBarcode(Z.length, back)


# -- synthesis ---------------------------------------------------------------


def alternating_directions(length: int) -> list[str]:
    return [FWD if j % 2 == 0 else BWD for j in range(length)]


def synth_zigzag(
    intervals: IntervalBarcode,
    F: PrimeField,
    directions: Optional[Sequence[str]] = None,
    seed: Optional[int] = None,
) -> Zigzag:
    """Direct sum of interval zigzags, optionally conjugated at every index."""
    L = intervals.length
    directions = list(directions) if directions is not None else alternating_directions(L)
    if len(directions) != L:
        raise StructureError(f"{L} maps need {L} directions")
    copies = [iv for iv, k in intervals.items() for _ in range(k)]
    index = [{c: r for r, c in enumerate(c for c, (i, j) in enumerate(copies) if i <= t <= j)} for t in range(L + 1)]
    dims = [len(ix) for ix in index]
    rng = np.random.default_rng(seed) if seed is not None else None
    S = [F.random_invertible(d, rng) if rng is not None else F.identity(d) for d in dims]
    S_inv = [F.inverse(s) for s in S]
    maps = []
    for j, direction in enumerate(directions):
        src, dst = (j, j + 1) if direction == FWD else (j + 1, j)
        mat = np.zeros((dims[dst], dims[src]), dtype=np.int64)
        for c, col in index[src].items():
            row = index[dst].get(c)
            if row is not None:
                mat[row, col] = 1
        maps.append((direction, F.matmul(S[dst], F.matmul(mat, S_inv[src]))))
    return Zigzag(F, tuple(dims), tuple(maps))


def random_zigzag(length: int, max_dim: int, rng: np.random.Generator, F: PrimeField) -> Zigzag:
    """Random dimensions, directions and matrices."""
    dims = [int(d) for d in rng.integers(0, max_dim + 1, size=length + 1)]
    maps = []
    for j in range(length):
        direction = FWD if rng.integers(0, 2) == 0 else BWD
        src, dst = (j, j + 1) if direction == FWD else (j + 1, j)
        maps.append((direction, F.random_matrix(dims[dst], dims[src], rng)))
    return Zigzag(F, tuple(dims), tuple(maps))


def random_intervals(length: int, max_intervals: int, rng: np.random.Generator) -> IntervalBarcode:
    count = int(rng.integers(0, max_intervals + 1))
    out: dict[tuple[int, int], int] = {}
    for _ in range(count):
        i, j = sorted(int(v) for v in rng.integers(0, length + 1, size=2))
        out[(i, j)] = out.get((i, j), 0) + 1
    return IntervalBarcode(length, out)


def path_to_zigzag(P) -> list[Zigzag]:
    """Split a path module at unrelated neighbours into zigzag pieces.

    Returns the pieces in order; each piece carries its own indexing.
    """
    pieces: list[Zigzag] = []
    start = 0
    for i, (direction, mat) in enumerate(list(P.maps) + [(None, None)]):
        if direction is None:
            pieces.append(Zigzag(P.field, tuple(P.dims[start : i + 1]), tuple(P.maps[start:i])))
            start = i + 1
    return pieces


def decompose_path(P, threads: Optional[int] = None) -> IntervalBarcode:
    """Interval decomposition of a path module, indexed by path position."""
    out: dict[tuple[int, int], int] = {}
    offset = 0
    for piece in path_to_zigzag(P):
        for (i, j), k in zigzag_decompose(piece, threads=threads).items():
            out[(i + offset, j + offset)] = out.get((i + offset, j + offset), 0) + k
        offset += piece.length + 1
    return IntervalBarcode(len(P.dims) - 1, out)


def direct_sum_zigzag(A: Zigzag, B: Zigzag) -> Zigzag:
    if A.field != B.field or A.length != B.length:
        raise DimensionError("direct sum of zigzags of different length or field")
    if [d for d, _ in A.maps] != [d for d, _ in B.maps]:
        raise StructureError("direct sum of zigzags with different directions")
    maps = tuple((d, direct_sum_matrix([a, b])) for (d, a), (_, b) in zip(A.maps, B.maps))
    return Zigzag(A.field, tuple(a + b for a, b in zip(A.dims, B.dims)), maps)
