"""Persistence bimodules over a finite grid ``[0, n] x [0, m]``.

A :class:`GridModule` stores one dimension per grid point and one matrix
per unit edge: ``hmaps[(x, y)]`` goes from ``(x, y)`` to ``(x + 1, y)`` and
``vmaps[(x, y)]`` from ``(x, y)`` to ``(x, y + 1)``.  Zero-dimensional
spaces are allowed, so 0×r and r×0 matrices are legal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import DimensionError, OrderError, StructureError
from .field import PrimeField, direct_sum_matrix

Point = tuple[int, int]


@dataclass(frozen=True, eq=False)
class GridModule:
    field: PrimeField
    n: int
    m: int
    dims: np.ndarray
    hmaps: dict[Point, np.ndarray]
    vmaps: dict[Point, np.ndarray]
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        dims = np.asarray(self.dims, dtype=np.int64)
        object.__setattr__(self, "dims", dims)
        if self.n < 0 or self.m < 0:
            raise StructureError(f"grid bounds must be nonnegative, got n={self.n}, m={self.m}")
        if dims.shape != (self.n + 1, self.m + 1):
            raise StructureError(f"dims has shape {dims.shape}, expected {(self.n + 1, self.m + 1)}")
        if (dims < 0).any():
            raise StructureError("negative dimension")
        for name, maps, step in (("hmaps", self.hmaps, (1, 0)), ("vmaps", self.vmaps, (0, 1))):
            expected = {
                (x, y)
                for x in range(self.n + 1 - step[0])
                for y in range(self.m + 1 - step[1])
            }
            if set(maps) != expected:
                missing = sorted(expected - set(maps))[:3]
                extra = sorted(set(maps) - expected)[:3]
                raise StructureError(f"{name} keys mismatch (missing {missing}, unexpected {extra})")
            for (x, y), mat in maps.items():
                want = (int(dims[x + step[0], y + step[1]]), int(dims[x, y]))
                if mat.shape != want:
                    raise StructureError(f"{name}[{x},{y}] has shape {mat.shape}, expected {want}")
                if mat.size and (mat.min() < 0 or mat.max() >= self.field.p):
                    raise StructureError(f"{name}[{x},{y}] has entries outside [0, {self.field.p})")

    @property
    def p(self) -> int:
        return self.field.p

    def points(self) -> Iterator[Point]:
        for x in range(self.n + 1):
            for y in range(self.m + 1):
                yield (x, y)

    def dim(self, t: Point) -> int:
        return int(self.dims[t])

    def contains_point(self, t: Point) -> bool:
        return 0 <= t[0] <= self.n and 0 <= t[1] <= self.m

    def edges(self) -> Iterator[tuple[str, Point, Point, np.ndarray]]:
        for s, mat in sorted(self.hmaps.items()):
            yield "h", s, (s[0] + 1, s[1]), mat
        for s, mat in sorted(self.vmaps.items()):
            yield "v", s, (s[0], s[1] + 1), mat

    def transport(self, s: Point, t: Point) -> np.ndarray:
        """The structure map from ``s`` to ``t``.

        Composed along the staircase that takes every horizontal step first;
        on a commuting module this equals the composite along any monotone path.
        """
        if not (s[0] <= t[0] and s[1] <= t[1]):
            raise OrderError(f"{s} is not below {t}")
        if not (self.contains_point(s) and self.contains_point(t)):
            raise OrderError(f"{s} or {t} lies outside the grid")
        key = ("rho", s, t)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        if s == t:
            out = self.field.identity(self.dim(s))
        elif t[1] > s[1]:
            below = (t[0], t[1] - 1)
            out = self.field.matmul(self.vmaps[below], self.transport(s, below))
        else:
            left = (t[0] - 1, t[1])
            out = self.field.matmul(self.hmaps[left], self.transport(s, left))
        self._cache[key] = out
        return out


def transport(M: GridModule, s: Point, t: Point) -> np.ndarray:
    return M.transport(s, t)


# -- validation ---------------------------------------------------------


@dataclass(frozen=True)
class SquareFailure:
    corner: Point
    kind: str  # "commute" or "exact"
    dim_image: int
    dim_kernel: int


@dataclass(frozen=True)
class ValidationReport:
    commutes: bool
    exact: bool
    first_failure: Optional[SquareFailure] = None

    def summary(self) -> str:
        if self.exact:
            return "commutes: yes; exact: yes"
        f = self.first_failure
        return (
            f"commutes: {'yes' if self.commutes else 'no'}; exact: no; "
            f"first failure at square {f.corner[0]},{f.corner[1]} "
            f"(kind={f.kind}, dim Im phi={f.dim_image}, dim Ker psi={f.dim_kernel})"
        )


def square_maps(M: GridModule, s: Point):
    """The four edge maps of the unit square with lower-left corner ``s``.

    Returns ``(bottom, left, right, top)``: bottom and left leave ``s``;
    right and top enter ``s + (1, 1)``.
    """
    x, y = s
    return M.hmaps[(x, y)], M.vmaps[(x, y)], M.vmaps[(x + 1, y)], M.hmaps[(x, y + 1)]


def check_square(M: GridModule, s: Point) -> tuple[bool, Optional[SquareFailure]]:
    """Return ``(commutes, failure)`` for the unit square at ``s``."""
    F = M.field
    bottom, left, right, top = square_maps(M, s)
    commutes = np.array_equal(F.matmul(right, bottom), F.matmul(top, left))
    phi = np.vstack([bottom, left])
    psi = np.hstack([right, (-top) % F.p])
    dim_image = F.rank(phi)
    dim_kernel = psi.shape[1] - F.rank(psi)
    if dim_image != dim_kernel:
        return commutes, SquareFailure(s, "exact", dim_image, dim_kernel)
    if not commutes:
        return commutes, SquareFailure(s, "commute", dim_image, dim_kernel)
    return True, None


def validate(M: GridModule) -> ValidationReport:
    """Check commutativity and exactness of every unit square.

    A square is exact when ``Im phi = Ker psi`` for ``phi = (h, v)`` out of the
    lower-left corner and ``psi = v - h`` into the upper-right one.  Since
    ``Im phi ⊆ Ker psi`` is equivalent to commutativity, the test is
    "commutes and equal dimensions".  A failure is tagged ``exact`` when the
    dimensions disagree and ``commute`` otherwise.
    """
    commutes = True
    first = None
    for x in range(M.n):
        for y in range(M.m):
            ok, fail = check_square(M, (x, y))
            commutes = commutes and ok
            if first is None:
                first = fail
    return ValidationReport(commutes, first is None, first)


# -- constructions --------------------------------------------------------


def from_maps(F: PrimeField, dims, hmaps: dict, vmaps: dict) -> GridModule:
    """Build a module from nested lists; missing edges default to zero maps."""
    dims = np.asarray(dims, dtype=np.int64)
    n, m = dims.shape[0] - 1, dims.shape[1] - 1
    H, V = {}, {}
    for x in range(n):
        for y in range(m + 1):
            shape = (int(dims[x + 1, y]), int(dims[x, y]))
            H[(x, y)] = F.matrix(hmaps[(x, y)], shape) if (x, y) in hmaps else F.zeros(*shape)
    for x in range(n + 1):
        for y in range(m):
            shape = (int(dims[x, y + 1]), int(dims[x, y]))
            V[(x, y)] = F.matrix(vmaps[(x, y)], shape) if (x, y) in vmaps else F.zeros(*shape)
    return GridModule(F, n, m, dims, H, V)


def constant_module(n: int, m: int, dim: int, F: PrimeField) -> GridModule:
    dims = np.full((n + 1, m + 1), dim, dtype=np.int64)
    eye = F.identity(dim)
    H = {(x, y): eye for x in range(n) for y in range(m + 1)}
    V = {(x, y): eye for x in range(n + 1) for y in range(m)}
    return GridModule(F, n, m, dims, H, V)


def zero_module(n: int, m: int, F: PrimeField) -> GridModule:
    return constant_module(n, m, 0, F)


def direct_sum(A: GridModule, B: GridModule) -> GridModule:
    if A.field != B.field or (A.n, A.m) != (B.n, B.m):
        raise DimensionError("direct sum of modules over different grids or fields")
    H = {k: direct_sum_matrix([A.hmaps[k], B.hmaps[k]]) for k in A.hmaps}
    V = {k: direct_sum_matrix([A.vmaps[k], B.vmaps[k]]) for k in A.vmaps}
    return GridModule(A.field, A.n, A.m, A.dims + B.dims, H, V)


def conjugate(M: GridModule, seed: int | np.random.Generator) -> GridModule:
    """Change basis at every point by a seeded random invertible matrix.

    Each edge map ``rho: M_s -> M_t`` becomes ``S_t rho S_s^-1``; the result is
    isomorphic to ``M`` but hides any block structure visible in the matrices.
    """
    F = M.field
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    S, S_inv = {}, {}
    for t in M.points():
        S[t] = F.random_invertible(M.dim(t), rng)
        S_inv[t] = F.inverse(S[t])

    def conj(mat, s, t):
        return F.matmul(S[t], F.matmul(mat, S_inv[s]))

    H = {s: conj(mat, s, (s[0] + 1, s[1])) for s, mat in M.hmaps.items()}
    V = {s: conj(mat, s, (s[0], s[1] + 1)) for s, mat in M.vmaps.items()}
    return GridModule(F, M.n, M.m, M.dims.copy(), H, V)


def smoothing(M: GridModule, ex: int, ey: int) -> GridModule:
    """The smoothing by ``(ex, ey)``, reindexed so the new grid starts at the origin.

    The space at new point ``u`` is the image of ``rho_u^{u+eps}`` inside
    ``M_{u+eps}``, carried in its echelon basis; edge maps are the ones induced
    by ``M`` on those images.
    """
    if ex < 0 or ey < 0 or (ex, ey) == (0, 0):
        raise ValueError("smoothing vector must be nonnegative and nonzero")
    if ex > M.n or ey > M.m:
        raise ValueError(f"smoothing vector ({ex}, {ey}) exceeds grid ({M.n}, {M.m})")
    F = M.field
    n, m = M.n - ex, M.m - ey
    images = {}
    for x in range(n + 1):
        for y in range(m + 1):
            images[(x, y)] = F.image(M.transport((x, y), (x + ex, y + ey)))
    dims = np.array([[images[(x, y)].rank for y in range(m + 1)] for x in range(n + 1)], dtype=np.int64)
    dims = dims.reshape(n + 1, m + 1)

    def induced(u, w, mat):
        return images[w].coordinates(F.matmul(mat, images[u].basis))

    H = {(x, y): induced((x, y), (x + 1, y), M.hmaps[(x + ex, y + ey)]) for x in range(n) for y in range(m + 1)}
    V = {(x, y): induced((x, y), (x, y + 1), M.vmaps[(x + ex, y + ey)]) for x in range(n + 1) for y in range(m)}
    return GridModule(F, n, m, dims, H, V)


def pad_extend(M: GridModule, k: int, side: str = "high") -> GridModule:
    """Grow the grid by ``k`` in both directions, duplicating the border.

    ``side="high"`` copies the last row and column outward (the usual
    extension towards the upper right); ``side="low"`` copies the first row
    and column and shifts the original module by ``(k, k)``.  Duplicated
    spaces are connected by identities, which keeps the module exact.
    """
    if k < 0:
        raise ValueError("padding must be nonnegative")
    if k == 0:
        return M
    F = M.field
    n, m = M.n + k, M.m + k
    if side == "high":
        src = lambda x, y: (min(x, M.n), min(y, M.m))  # noqa: E731
        h_dup = lambda x, y: x >= M.n  # noqa: E731
        v_dup = lambda x, y: y >= M.m  # noqa: E731
    elif side == "low":
        src = lambda x, y: (max(x - k, 0), max(y - k, 0))  # noqa: E731
        h_dup = lambda x, y: x < k  # noqa: E731
        v_dup = lambda x, y: y < k  # noqa: E731
    else:
        raise ValueError(f"unknown side {side!r}")
    dims = np.array([[M.dims[src(x, y)] for y in range(m + 1)] for x in range(n + 1)], dtype=np.int64)
    H, V = {}, {}
    for x in range(n):
        for y in range(m + 1):
            H[(x, y)] = F.identity(int(dims[x, y])) if h_dup(x, y) else M.hmaps[src(x, y)]
    for x in range(n + 1):
        for y in range(m):
            V[(x, y)] = F.identity(int(dims[x, y])) if v_dup(x, y) else M.vmaps[src(x, y)]
    return GridModule(F, n, m, dims, H, V)


def crop(M: GridModule, lo: Point, hi: Point) -> GridModule:
    """Restriction to the box ``[lo, hi]``, reindexed to the origin."""
    if not (0 <= lo[0] <= hi[0] <= M.n and 0 <= lo[1] <= hi[1] <= M.m):
        raise ValueError(f"box {lo}..{hi} does not fit the grid")
    n, m = hi[0] - lo[0], hi[1] - lo[1]
    dims = M.dims[lo[0] : hi[0] + 1, lo[1] : hi[1] + 1].copy()
    H = {(x, y): M.hmaps[(x + lo[0], y + lo[1])] for x in range(n) for y in range(m + 1)}
    V = {(x, y): M.vmaps[(x + lo[0], y + lo[1])] for x in range(n + 1) for y in range(m)}
    return GridModule(M.field, n, m, dims, H, V)



# -- universal squares ------------------------------------------------------


def pushout(F: PrimeField, f: np.ndarray, g: np.ndarray) -> tuple[int, np.ndarray, np.ndarray]:
    """Pushout of ``B <-f- A -g-> C``, realized as ``(B + C) / Im(f, -g)``.

    Returns ``(dim D, inB, inC)`` with ``inB f = inC g``. The quotient is taken
    in coordinates complementary to the echelon pivots of ``Im(f, -g)``.
    """
    f, g = np.asarray(f, dtype=np.int64), np.asarray(g, dtype=np.int64)
    if f.shape[1] != g.shape[1]:
        raise DimensionError(f"pushout legs have domains {f.shape[1]} and {g.shape[1]}")
    b = f.shape[0]
    q = F.image(np.vstack([f, (-g) % F.p])).quotient_map()
    return q.shape[0], q[:, :b], q[:, b:]


def pullback(F: PrimeField, f: np.ndarray, g: np.ndarray) -> tuple[int, np.ndarray, np.ndarray]:
    """Pullback of ``B -f-> D <-g- C``, realized as ``Ker [f | -g]``.

    Returns ``(dim A, prB, prC)`` with ``f prB = g prC``.
    """
    f, g = np.asarray(f, dtype=np.int64), np.asarray(g, dtype=np.int64)
    if f.shape[0] != g.shape[0]:
        raise DimensionError(f"pullback legs have codomains {f.shape[0]} and {g.shape[0]}")
    b = f.shape[1]
    basis = F.kernel(np.hstack([f, (-g) % F.p])).basis
    return basis.shape[1], basis[:b], basis[b:]


def fill_pushouts(F: PrimeField, n: int, m: int, dims: dict, H: dict, V: dict, first: int):
    """Fill every point with ``x + y >= first`` by the pushout of its lower square.

    Works antidiagonal by antidiagonal, so the two lower neighbours and the
    maps out of the lower-left corner must already be known. Mutates
    ``dims``, ``H`` and ``V``.
    """
    for total in range(max(first, 2), n + m + 1):
        for x in range(max(1, total - m), min(n, total - 1) + 1):
            y = total - x
            corner = (x - 1, y - 1)
            dims[(x, y)], H[(x - 1, y)], V[(x, y - 1)] = pushout(F, V[corner], H[corner])


def fill_pullbacks(F: PrimeField, n: int, m: int, dims: dict, H: dict, V: dict, last: int):
    """Fill every point with ``x + y <= last`` by the pullback of its upper square.

    The mirror image of :func:`fill_pushouts`, working downwards.
    """
    for total in range(min(last, n + m - 2), -1, -1):
        for x in range(max(0, total - m + 1), min(n - 1, total) + 1):
            y = total - x
            dims[(x, y)], H[(x, y)], V[(x, y)] = pullback(F, V[(x + 1, y)], H[(x, y + 1)])


def module_from_dicts(F: PrimeField, n: int, m: int, dims: dict, H: dict, V: dict) -> GridModule:
    grid = np.array([[dims[(x, y)] for y in range(m + 1)] for x in range(n + 1)], dtype=np.int64)
    return GridModule(F, n, m, grid.reshape(n + 1, m + 1), H, V)

# -- restriction to paths -------------------------------------------------


@dataclass(frozen=True, eq=False)
class PathModule:
    """A module on a sequence of grid points.

    ``maps[i]`` relates ``points[i]`` and ``points[i + 1]`` and is a pair
    ``(direction, matrix)``: ``"fwd"`` means ``points[i] <= points[i + 1]``
    and the matrix goes from space ``i`` to space ``i + 1``; ``"bwd"`` is the
    reverse; ``None`` means the two points are unrelated (no map).
    """

    field: PrimeField
    points: list[Point]
    dims: list[int]
    maps: list[tuple[Optional[str], Optional[np.ndarray]]]


def restrict_path(M: GridModule, path: Sequence[Point], strict: bool = True) -> PathModule:
    """Restrict ``M`` to a path of grid points.

    Consecutive points must be comparable; with ``strict=False`` incomparable
    neighbours are allowed and simply carry no map.
    """
    pts = [tuple(int(c) for c in pt) for pt in path]
    if not pts:
        raise ValueError("empty path")
    for t in pts:
        if not M.contains_point(t):
            raise OrderError(f"path point {t} lies outside the grid")
    maps = []
    for a, b in zip(pts, pts[1:]):
        if a[0] <= b[0] and a[1] <= b[1]:
            maps.append(("fwd", M.transport(a, b)))
        elif b[0] <= a[0] and b[1] <= a[1]:
            maps.append(("bwd", M.transport(b, a)))
        elif strict:
            raise OrderError(f"consecutive path points {a} and {b} are incomparable")
        else:
            maps.append((None, None))
    return PathModule(M.field, pts, [M.dim(t) for t in pts], maps)


def parse_path(text: str) -> list[Point]:
    """Parse ``"x0,y0;x1,y1;..."``."""
    out = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        xs = chunk.split(",")
        if len(xs) != 2:
            raise ValueError(f"bad path point {chunk!r}")
        out.append((int(xs[0]), int(xs[1])))
    return out
