"""Zeroth interlevel-set persistence of a real-valued function on a graph.

The function is given by vertex values and extended linearly along edges.
Levels ``c_0 < ... < c_{k-1}`` are the distinct vertex values interleaved
with their midpoints, padded by ``min - 1`` and ``max + 1``. The open
interval ``(c_i, c_j)``, ``i < j``, sits at grid point

    ``(x, y) = (N - i, j - 1)``  with  ``N = k - 2``,

so both axes grow with the interval and the valid pairs form the up-set
``x + y >= N`` of the ``N x N`` grid. Points below it are filled by
pullbacks, which keeps every unit square exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .blocks import Barcode
from .decompose import decompose
from .errors import InconsistencyError, StructureError
from .field import PrimeField
from .grid import GridModule, Point, fill_pullbacks, module_from_dicts, validate, zero_module


@dataclass(frozen=True)
class LabeledGraph:
    values: tuple[float, ...]
    edges: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        if not all(math.isfinite(v) for v in values):
            raise StructureError("vertex values must be finite")
        edges = []
        for e in self.edges:
            u, v = (int(c) for c in e)
            if not (0 <= u < len(values) and 0 <= v < len(values)):
                raise StructureError(f"edge ({u}, {v}) refers to a missing vertex")
            if u == v:
                raise StructureError(f"self-loop at vertex {u}")
            edges.append((u, v))
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "edges", tuple(edges))

    def disjoint_union(self, other: LabeledGraph) -> LabeledGraph:
        shift = len(self.values)
        return LabeledGraph(self.values + other.values, self.edges + tuple((u + shift, v + shift) for u, v in other.edges))


def critical_levels(G: LabeledGraph) -> list[float]:
    """Distinct values interleaved with midpoints, plus one pad on each side."""
    vals = sorted(set(G.values))
    if not vals:
        return []
    levels = [vals[0] - 1.0]
    for a, b in zip(vals, vals[1:]):
        levels += [a, (a + b) / 2]
    return levels + [vals[-1], vals[-1] + 1.0]


@dataclass(frozen=True)
class IntervalGrid:
    levels: tuple[float, ...]

    @property
    def size(self) -> int:
        """Grid side ``N``; the grid is ``[0, N] x [0, N]``."""
        return max(len(self.levels) - 2, 0)

    def interval(self, t: Point) -> tuple[float, float]:
        """The open interval ``(lo, hi)`` at grid point ``t``."""
        x, y = t
        return self.levels[self.size - x], self.levels[y + 1]

    def is_interval(self, t: Point) -> bool:
        return t[0] + t[1] >= self.size

    def coordinates(self) -> tuple[list[float], list[float]]:
        """Level-unit coordinates of the grid axes (the x axis is reversed)."""
        N = self.size
        return [-self.levels[N - x] for x in range(N + 1)], [self.levels[y + 1] for y in range(N + 1)]


def critical_grid(G: LabeledGraph) -> IntervalGrid:
    return IntervalGrid(tuple(critical_levels(G)))


class _Subdivision:
    """The graph with each edge cut at every level strictly inside its range.

    Nodes are vertices, cut points (valued at a level) and the open segments
    between consecutive points of an edge. A segment can be a component on
    its own, for intervals between two consecutive levels.
    """

    def __init__(self, G: LabeledGraph, levels: Sequence[float]):
        self.points: list[float] = list(G.values)
        self.segments: list[tuple[float, float, int, int]] = []
        for u, v in G.edges:
            a, b = G.values[u], G.values[v]
            if a > b:
                u, v, a, b = v, u, b, a
            chain = [u]
            for c in levels:
                if a < c < b:
                    self.points.append(c)
                    chain.append(len(self.points) - 1)
            chain.append(v)
            for p, q in zip(chain, chain[1:]):
                self.segments.append((self.points[p], self.points[q], p, q))

    def components(self, lo: float, hi: float) -> tuple[list[int], dict[int, int]]:
        """Connected components of the preimage of ``(lo, hi)``.

        Node ``i < len(points)`` is a point, node ``len(points) + k`` is
        segment ``k``. Returns one representative node per component (its
        smallest member, in increasing order) and the component index of
        every node inside.
        """
        base = len(self.points)
        parent = {i: i for i, c in enumerate(self.points) if lo < c < hi}
        for k, (a, b, _, _) in enumerate(self.segments):
            if (max(a, lo) < min(b, hi)) if a < b else (lo < a < hi):
                parent[base + k] = base + k

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for k, (_, _, p, q) in enumerate(self.segments):
            if base + k not in parent:
                continue
            for e in (p, q):
                if e in parent:
                    ra, rb = find(base + k), find(e)
                    if ra != rb:
                        parent[max(ra, rb)] = min(ra, rb)
        roots = sorted({find(i) for i in parent})
        label = {r: k for k, r in enumerate(roots)}
        return roots, {i: label[find(i)] for i in parent}


def interlevel_module(G: LabeledGraph, F: PrimeField, check: bool = True) -> tuple[GridModule, IntervalGrid, dict]:
    """H0 interlevel-set module, its level grid, and component labels.

    ``labels[t]`` maps each subdivision node (point or open segment) inside
    the interval at ``t`` to its component, i.e. its basis vector at ``t``.
    """
    grid = critical_grid(G)
    if not grid.levels:
        return zero_module(0, 0, F), grid, {}
    N = grid.size
    sub = _Subdivision(G, grid.levels)
    dims: dict[Point, int] = {}
    labels: dict[Point, dict[int, int]] = {}
    reps: dict[Point, list[int]] = {}
    for x in range(N + 1):
        for y in range(N - x, N + 1):
            reps[(x, y)], labels[(x, y)] = sub.components(*grid.interval((x, y)))
            dims[(x, y)] = len(reps[(x, y)])

    def inclusion(s: Point, t: Point) -> np.ndarray:
        mat = np.zeros((dims[t], dims[s]), dtype=np.int64)
        for col, r in enumerate(reps[s]):
            mat[labels[t][r], col] = 1
        return mat

    H: dict[Point, np.ndarray] = {}
    V: dict[Point, np.ndarray] = {}
    for (x, y) in reps:
        if x < N:
            H[(x, y)] = inclusion((x, y), (x + 1, y))
        if y < N:
            V[(x, y)] = inclusion((x, y), (x, y + 1))
    fill_pullbacks(F, N, N, dims, H, V, last=N - 1)
    M = module_from_dicts(F, N, N, dims, H, V)
    if check:
        report = validate(M)
        if not report.exact:
            raise InconsistencyError(f"interlevel module is not exact: {report.summary()}")
    return M, grid, labels


def interlevel_barcode(G: LabeledGraph, F: Optional[PrimeField] = None, threads: Optional[int] = None) -> tuple[Barcode, IntervalGrid]:
    """Grid-indexed block barcode of the H0 interlevel module, with its levels."""
    F = F or PrimeField(2)
    M, grid, _ = interlevel_module(G, F)
    return decompose(M, threads=threads), grid


def random_graph(max_vertices: int, max_edges: int, rng: np.random.Generator, value_range: int = 4) -> LabeledGraph:
    """Random integer-valued graph, which keeps ties and equal values likely."""
    nv = int(rng.integers(1, max_vertices + 1))
    values = [float(v) for v in rng.integers(0, value_range + 1, size=nv)]
    edges = []
    if nv > 1:
        for _ in range(int(rng.integers(0, max_edges + 1))):
            u, v = (int(c) for c in rng.choice(nv, size=2, replace=False))
            edges.append((u, v))
    return LabeledGraph(tuple(values), tuple(edges))
