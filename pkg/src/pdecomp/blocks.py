"""Grid block shapes, block modules and barcodes.

On the grid ``[0, n] x [0, m]`` the canonical shapes are

* ``Birth(a, b)``: support ``[a, n] x [b, m]``, ``0 <= a <= n``, ``0 <= b <= m``;
* ``Death(a, b)``: support ``[0, a] x [0, b]``, ``a < n``, ``b < m``;
* ``HBand(a, b)``: support ``[0, n] x [a, b]``, ``a <= b < m``;
* ``VBand(a, b)``: support ``[a, b] x [0, m]``, ``a <= b < n``.

Any block reaching both the top and the right edge of the grid is a birth
quadrant, so the four families have pairwise distinct supports.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, NamedTuple

import numpy as np

from .errors import DimensionError, StructureError
from .field import PrimeField
from .grid import GridModule, Point, conjugate

KIND_ORDER = {"b": 0, "v": 1, "h": 2, "d": 3}
KIND_NAMES = {"b": "Birth", "d": "Death", "h": "HBand", "v": "VBand"}


class Shape(NamedTuple):
    kind: str
    a: int
    b: int

    def __repr__(self):
        return f"{KIND_NAMES.get(self.kind, self.kind)}({self.a},{self.b})"

    def sort_key(self):
        return (KIND_ORDER[self.kind], self.a, self.b)

    def is_canonical(self, n: int, m: int) -> bool:
        a, b = self.a, self.b
        if self.kind == "b":
            return 0 <= a <= n and 0 <= b <= m
        if self.kind == "d":
            return 0 <= a < n and 0 <= b < m
        if self.kind == "h":
            return 0 <= a <= b < m
        if self.kind == "v":
            return 0 <= a <= b < n
        return False

    def box(self, n: int, m: int) -> tuple[int, int, int, int]:
        """Support as ``(x0, x1, y0, y1)``, both ends inclusive."""
        if not self.is_canonical(n, m):
            raise StructureError(f"{self!r} is not a canonical shape on the {n}x{m} grid")
        a, b = self.a, self.b
        return {
            "b": (a, n, b, m),
            "d": (0, a, 0, b),
            "h": (0, n, a, b),
            "v": (a, b, 0, m),
        }[self.kind]

    def contains(self, t: Point, n: int, m: int) -> bool:
        x0, x1, y0, y1 = self.box(n, m)
        return x0 <= t[0] <= x1 and y0 <= t[1] <= y1

    def min_point(self, n: int, m: int) -> Point:
        x0, _, y0, _ = self.box(n, m)
        return (x0, y0)


def Birth(a: int, b: int) -> Shape:
    return Shape("b", a, b)


def Death(a: int, b: int) -> Shape:
    return Shape("d", a, b)


def HBand(a: int, b: int) -> Shape:
    return Shape("h", a, b)


def VBand(a: int, b: int) -> Shape:
    return Shape("v", a, b)


def shape_count(n: int, m: int) -> int:
    return (n + 1) * (m + 1) + n * (n + 1) // 2 + m * (m + 1) // 2 + n * m


def enumerate_shapes(n: int, m: int) -> list[Shape]:
    """All canonical shapes, ordered Birth, VBand, HBand, Death, then by (a, b)."""
    out = [Birth(a, b) for a in range(n + 1) for b in range(m + 1)]
    out += [VBand(a, b) for a in range(n) for b in range(a, n)]
    out += [HBand(a, b) for a in range(m) for b in range(a, m)]
    out += [Death(a, b) for a in range(n) for b in range(m)]
    return out


def shape_geometry(shape: Shape, n: int, m: int) -> tuple[Callable[[Point], bool], Point]:
    """Support membership predicate and the minimum point of the support."""
    x0, x1, y0, y1 = shape.box(n, m)
    return (lambda t: x0 <= t[0] <= x1 and y0 <= t[1] <= y1), (x0, y0)


def support_mask(shape: Shape, n: int, m: int) -> np.ndarray:
    x0, x1, y0, y1 = shape.box(n, m)
    mask = np.zeros((n + 1, m + 1), dtype=bool)
    mask[x0 : x1 + 1, y0 : y1 + 1] = True
    return mask


@dataclass(eq=False)
class Barcode:
    """Multiset of canonical shapes on an ``n x m`` grid."""

    n: int
    m: int
    entries: dict[Shape, int] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for shape, mult in self.entries.items():
            shape = Shape(*shape)
            if not shape.is_canonical(self.n, self.m):
                raise StructureError(f"{shape!r} is not canonical on the {self.n}x{self.m} grid")
            if mult < 0:
                raise StructureError(f"negative multiplicity for {shape!r}")
            if mult:
                clean[shape] = clean.get(shape, 0) + int(mult)
        self.entries = dict(sorted(clean.items(), key=lambda kv: kv[0].sort_key()))

    def __eq__(self, other):
        if not isinstance(other, Barcode):
            return NotImplemented
        return (self.n, self.m) == (other.n, other.m) and self.entries == other.entries

    def __repr__(self):
        body = ", ".join(f"{s!r}: {k}" for s, k in self.entries.items())
        return f"Barcode({self.n}x{self.m}, {{{body}}})"

    def __len__(self):
        return sum(self.entries.values())

    def items(self):
        return self.entries.items()

    def expanded(self) -> list[Shape]:
        """Shapes repeated according to multiplicity, in canonical order."""
        return [s for s, k in self.entries.items() for _ in range(k)]

    def pointwise_dims(self) -> np.ndarray:
        dims = np.zeros((self.n + 1, self.m + 1), dtype=np.int64)
        for shape, mult in self.entries.items():
            dims += mult * support_mask(shape, self.n, self.m)
        return dims

    def union(self, other: Barcode) -> Barcode:
        if (self.n, self.m) != (other.n, other.m):
            raise DimensionError("barcodes on different grids")
        merged = dict(self.entries)
        for s, k in other.entries.items():
            merged[s] = merged.get(s, 0) + k
        return Barcode(self.n, self.m, merged)


def synth(B: Barcode, F: PrimeField) -> GridModule:
    """The direct sum of block modules listed in ``B``.

    At every point the basis vectors are ordered like ``B.expanded()``
    restricted to the blocks whose support contains the point.
    """
    n, m = B.n, B.m
    shapes = B.expanded()
    masks = [support_mask(s, n, m) for s in shapes]
    index: dict[Point, dict[int, int]] = {}
    for t in ((x, y) for x in range(n + 1) for y in range(m + 1)):
        index[t] = {j: i for i, j in enumerate(j for j, mk in enumerate(masks) if mk[t])}
    dims = np.array([[len(index[(x, y)]) for y in range(m + 1)] for x in range(n + 1)], dtype=np.int64)
    dims = dims.reshape(n + 1, m + 1)

    def edge(s: Point, t: Point) -> np.ndarray:
        mat = np.zeros((len(index[t]), len(index[s])), dtype=np.int64)
        for j, col in index[s].items():
            row = index[t].get(j)
            if row is not None:
                mat[row, col] = 1
        return mat

    H = {(x, y): edge((x, y), (x + 1, y)) for x in range(n) for y in range(m + 1)}
    V = {(x, y): edge((x, y), (x, y + 1)) for x in range(n + 1) for y in range(m)}
    return GridModule(F, n, m, dims, H, V)


def block_module(shape: Shape, n: int, m: int, F: PrimeField, mult: int = 1) -> GridModule:
    return synth(Barcode(n, m, {shape: mult}), F)


_KIND_WEIGHTS = {"b": 4, "d": 2, "h": 2, "v": 2}


def random_shape(n: int, m: int, rng: np.random.Generator) -> Shape:
    """Draw a canonical shape; kinds weighted 4:2:2:2 (Birth:Death:HBand:VBand)."""
    kinds = [k for k in ("b", "d", "h", "v") if _kind_available(k, n, m)]
    weights = np.array([_KIND_WEIGHTS[k] for k in kinds], dtype=float)
    kind = kinds[rng.choice(len(kinds), p=weights / weights.sum())]
    if kind == "b":
        return Birth(int(rng.integers(0, n + 1)), int(rng.integers(0, m + 1)))
    if kind == "d":
        return Death(int(rng.integers(0, n)), int(rng.integers(0, m)))
    length = m if kind == "h" else n
    pairs = [(a, b) for a in range(length) for b in range(a, length)]
    a, b = pairs[int(rng.integers(0, len(pairs)))]
    return Shape(kind, a, b)


def _kind_available(kind: str, n: int, m: int) -> bool:
    return {"b": True, "d": n > 0 and m > 0, "h": m > 0, "v": n > 0}[kind]


def random_barcode(n: int, m: int, max_blocks: int, rng: np.random.Generator) -> Barcode:
    if max_blocks < 1:
        raise ValueError("max_blocks must be at least 1")
    count = int(rng.integers(1, max_blocks + 1))
    entries: dict[Shape, int] = {}
    for _ in range(count):
        s = random_shape(n, m, rng)
        entries[s] = entries.get(s, 0) + 1
    return Barcode(n, m, entries)


def random_exact_module(
    n: int, m: int, max_blocks: int, seed: int, F: PrimeField
) -> tuple[GridModule, Barcode]:
    """A conjugated direct sum of random blocks, with its hidden barcode."""
    rng = np.random.default_rng(seed)
    truth = random_barcode(n, m, max_blocks, rng)
    conj_seed = int(rng.integers(0, 2**31))
    return conjugate(synth(truth, F), conj_seed), truth


def boxes(n: int, m: int) -> Iterable[tuple[int, int, int, int]]:
    for x0 in range(n + 1):
        for x1 in range(x0, n + 1):
            for y0 in range(m + 1):
                for y1 in range(y0, m + 1):
                    yield (x0, x1, y0, y1)
