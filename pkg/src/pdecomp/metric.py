"""Bottleneck distance between block barcodes.

Costs, in grid units unless axis coordinates are supplied:

* two blocks of the same kind cost ``max(|a - a'|, |b - b'|)``;
* blocks of different kinds cannot be matched (cost ``inf``);
* a band ``[a, b]`` may be left unmatched at half its width, ``(b - a + 1) / 2``;
  quadrants never can.

All arithmetic uses :class:`fractions.Fraction`, so comparisons are exact.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .blocks import Barcode, Shape
from .errors import DimensionError

Cost = Union[Fraction, float]
INF = math.inf
Coords = Optional[tuple[Sequence, Sequence]]


def _axes(coords: Coords, n: int, m: int) -> tuple[list[Fraction], list[Fraction]]:
    if coords is None:
        return [Fraction(i) for i in range(n + 1)], [Fraction(j) for j in range(m + 1)]
    xs, ys = coords
    if len(xs) != n + 1 or len(ys) != m + 1:
        raise DimensionError(f"coordinates of lengths {len(xs)}, {len(ys)} for a {n}x{m} grid")
    return [Fraction(v) for v in xs], [Fraction(v) for v in ys]


def _corner(shape: Shape, xs, ys) -> tuple[Fraction, Fraction]:
    if shape.kind == "h":
        return ys[shape.a], ys[shape.b]
    if shape.kind == "v":
        return xs[shape.a], xs[shape.b]
    return xs[shape.a], ys[shape.b]


def block_cost(A: Shape, B: Shape, n: int, m: int, coords_a: Coords = None, coords_b: Coords = None) -> Cost:
    """Cost of matching ``A`` (on ``coords_a``) with ``B`` (on ``coords_b``)."""
    A.box(n, m), B.box(n, m)
    if A.kind != B.kind:
        return INF
    pa = _corner(A, *_axes(coords_a, n, m))
    pb = _corner(B, *_axes(coords_b, n, m))
    return max(abs(pa[0] - pb[0]), abs(pa[1] - pb[1]))


def deletion_cost(A: Shape, n: Optional[int] = None, m: Optional[int] = None, coords: Coords = None) -> Cost:
    """Half the width of a band; quadrants cannot be deleted."""
    if A.kind in ("b", "d"):
        return INF
    if coords is None:
        return Fraction(A.b - A.a + 1, 2)
    xs, ys = _axes(coords, n, m)
    axis = ys if A.kind == "h" else xs
    return (axis[A.b + 1] - axis[A.a]) / 2


def _costs(B1: Barcode, B2: Barcode, c1: Coords, c2: Coords):
    left, right = B1.expanded(), B2.expanded()
    ax1, ax2 = _axes(c1, B1.n, B1.m), _axes(c2, B2.n, B2.m)
    corners1 = [_corner(s, *ax1) for s in left]
    corners2 = [_corner(s, *ax2) for s in right]
    pair = [
        [max(abs(p[0] - q[0]), abs(p[1] - q[1])) if a.kind == b.kind else INF for b, q in zip(right, corners2)]
        for a, p in zip(left, corners1)
    ]
    del1 = [deletion_cost(s, B1.n, B1.m, c1) for s in left]
    del2 = [deletion_cost(s, B2.n, B2.m, c2) for s in right]
    return pair, del1, del2


def _feasible(eps, pair, del1, del2) -> bool:
    """Perfect matching on the usual augmented bipartite graph.

    Left vertices are the blocks of ``B1`` followed by one diagonal slot per
    block of ``B2``; right vertices mirror this.
    """
    p, q = len(del1), len(del2)
    rows, cols = [], []
    for i in range(p):
        for j in range(q):
            if pair[i][j] <= eps:
                rows.append(i)
                cols.append(j)
        if del1[i] <= eps:
            rows.append(i)
            cols.append(q + i)
    for j in range(q):
        if del2[j] <= eps:
            rows.append(p + j)
            cols.append(j)
        for i in range(p):
            rows.append(p + j)
            cols.append(q + i)
    size = p + q
    if size == 0:
        return True
    graph = csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(size, size))
    match = maximum_bipartite_matching(graph, perm_type="column")
    return bool((match >= 0).all())


def bottleneck(B1: Barcode, B2: Barcode, coords1: Coords = None, coords2: Coords = None) -> Cost:
    """Smallest ``eps`` admitting a matching with all costs at most ``eps``.

    Without coordinates both barcodes must live on the same grid. Returns a
    :class:`~fractions.Fraction`, or ``math.inf`` when no finite matching
    exists (e.g. quadrants of different kinds or counts).
    """
    if coords1 is None and coords2 is None and (B1.n, B1.m) != (B2.n, B2.m):
        raise DimensionError(f"barcodes on grids {B1.n}x{B1.m} and {B2.n}x{B2.m}")
    pair, del1, del2 = _costs(B1, B2, coords1, coords2)
    finite = {Fraction(0)}
    finite.update(c for row in pair for c in row if c != INF)
    finite.update(c for c in del1 + del2 if c != INF)
    candidates = sorted(finite)
    if not _feasible(candidates[-1], pair, del1, del2):
        return INF
    lo, hi = 0, len(candidates) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _feasible(candidates[mid], pair, del1, del2):
            hi = mid
        else:
            lo = mid + 1
    return candidates[lo]


def format_cost(c: Cost) -> str:
    """``inf``, an integer, an exact decimal such as ``1.5``, or a fraction ``p/q``."""
    if c == INF:
        return "inf"
    c = Fraction(c)
    if c.denominator == 1:
        return str(c.numerator)
    if Fraction(float(c)) == c:
        return repr(float(c))
    return f"{c.numerator}/{c.denominator}"
