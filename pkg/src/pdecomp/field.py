"""Dense exact linear algebra over a prime field GF(p).

Matrices are plain ``numpy.int64`` arrays with entries in ``[0, p)``.
Subspaces of GF(p)^n are stored by a basis matrix in *reduced column
echelon form*: every basis column has a pivot row (its first nonzero
entry, equal to 1), pivot rows increase from left to right, and every
other column vanishes on each pivot row.  That form is unique, so two
:class:`Subspace` values describe the same set of vectors iff their
basis matrices are identical.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import ContainmentError, DimensionError

logger = logging.getLogger(__name__)

_INT64_LIMIT = 2**63 - 1
MAX_PRIME = 2**31


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class PrimeField:
    """The field GF(p) together with the matrix routines that need ``p``."""

    p: int = 2

    def __post_init__(self):
        if not isinstance(self.p, (int, np.integer)) or not is_prime(int(self.p)):
            raise ValueError(f"modulus {self.p!r} is not a prime")
        if self.p >= MAX_PRIME:
            raise ValueError(f"modulus {self.p} exceeds 2^31")
        object.__setattr__(self, "p", int(self.p))

    # -- construction -------------------------------------------------

    def matrix(self, rows, shape: tuple[int, int] | None = None) -> np.ndarray:
        """Coerce nested lists (or an array) to a reduced int64 matrix.

        ``shape`` disambiguates empty matrices, e.g. ``matrix([], (3, 0))``.
        """
        a = np.asarray(rows, dtype=np.int64)
        if shape is not None:
            if a.size == 0:
                a = np.zeros(shape, dtype=np.int64)
            elif a.shape != tuple(shape):
                raise DimensionError(f"expected a {shape} matrix, got {a.shape}")
        if a.ndim != 2:
            raise DimensionError(f"expected a 2-d matrix, got shape {a.shape}")
        return a % self.p

    def zeros(self, rows: int, cols: int) -> np.ndarray:
        return np.zeros((rows, cols), dtype=np.int64)

    def identity(self, n: int) -> np.ndarray:
        return np.eye(n, dtype=np.int64)

    # -- arithmetic ---------------------------------------------------

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if a.shape[1] != b.shape[0]:
            raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
        inner = a.shape[1]
        if inner == 0:
            return np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
        if (self.p - 1) ** 2 * inner <= _INT64_LIMIT:
            return (a @ b) % self.p
        # large primes: fall back to Python integers to avoid int64 overflow
        prod = (a.astype(object) @ b.astype(object)) % self.p
        return prod.astype(np.int64)

    def chain(self, mats: Sequence[np.ndarray], dim: int) -> np.ndarray:
        """Compose ``mats[-1] @ ... @ mats[0]``; identity of size ``dim`` if empty."""
        out = self.identity(dim)
        for m in mats:
            out = self.matmul(m, out)
        return out

    def inv(self, x: int) -> int:
        return pow(int(x), self.p - 2, self.p)

    def rref(self, a: np.ndarray) -> tuple[np.ndarray, list[int]]:
        """Reduced row echelon form; returns the nonzero rows and pivot columns."""
        p = self.p
        r_mat = np.array(a, dtype=np.int64) % p
        rows, cols = r_mat.shape
        pivots: list[int] = []
        r = 0
        for c in range(cols):
            if r == rows:
                break
            nz = np.flatnonzero(r_mat[r:, c])
            if nz.size == 0:
                continue
            k = r + int(nz[0])
            if k != r:
                r_mat[[r, k]] = r_mat[[k, r]]
            lead = int(r_mat[r, c])
            if lead != 1:
                r_mat[r] = (r_mat[r] * self.inv(lead)) % p
            col = r_mat[:, c].copy()
            col[r] = 0
            hit = np.flatnonzero(col)
            if hit.size:
                r_mat[hit] = (r_mat[hit] - np.outer(col[hit], r_mat[r])) % p
            pivots.append(c)
            r += 1
        return r_mat[:r], pivots

    def rank(self, a: np.ndarray) -> int:
        if a.size == 0:
            return 0
        return len(self.rref(a)[1])

    def col_echelon(self, a: np.ndarray) -> np.ndarray:
        """Reduced column echelon form of ``a`` with zero columns dropped."""
        return self._echelon(a)[0]

    def _echelon(self, a: np.ndarray) -> tuple[np.ndarray, tuple[int, ...]]:
        a = np.asarray(a, dtype=np.int64)
        if a.size == 0:
            return np.zeros((a.shape[0], 0), dtype=np.int64), ()
        reduced, pivots = self.rref(a.T)
        return np.ascontiguousarray(reduced.T), tuple(pivots)

    def inverse(self, a: np.ndarray) -> np.ndarray:
        n = a.shape[0]
        if a.shape != (n, n):
            raise DimensionError(f"cannot invert a non-square {a.shape} matrix")
        reduced, pivots = self.rref(np.hstack([a, self.identity(n)]))
        if pivots[:n] != list(range(n)):
            raise ZeroDivisionError("matrix is singular")
        return reduced[:, n:]

    def solve(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Solve ``a @ x = b`` for invertible square ``a``."""
        n = a.shape[0]
        reduced, pivots = self.rref(np.hstack([a, b]))
        if pivots[:n] != list(range(n)):
            raise ZeroDivisionError("matrix is singular")
        return reduced[:, n:]

    # -- subspaces ----------------------------------------------------

    def span(self, vectors: np.ndarray) -> Subspace:
        basis, pivots = self._echelon(vectors)
        return Subspace(basis, self.p, pivots)

    def image(self, a: np.ndarray) -> Subspace:
        return self.span(a)

    def kernel(self, a: np.ndarray) -> Subspace:
        rows, cols = a.shape
        if cols == 0:
            return Subspace.zero(0, self.p)
        if rows == 0 or not a.any():
            return Subspace.full(cols, self.p)
        reduced, pivots = self.rref(a)
        pivot_set = set(pivots)
        free = [c for c in range(cols) if c not in pivot_set]
        if not free:
            return Subspace.zero(cols, self.p)
        vecs = np.zeros((cols, len(free)), dtype=np.int64)
        for j, f in enumerate(free):
            vecs[f, j] = 1
            vecs[pivots, j] = (-reduced[:, f]) % self.p
        return self.span(vecs)

    def sum_intersect(self, u: Subspace, v: Subspace) -> tuple[Subspace, Subspace]:
        """Return ``(u + v, u & v)`` from a single Zassenhaus elimination."""
        n = _same_ambient(u, v)
        if u.rank == 0 or v.rank == n:
            return v, u
        if v.rank == 0 or u.rank == n:
            return u, v
        ut, vt = u.basis.T, v.basis.T
        block = np.vstack([np.hstack([ut, ut]), np.hstack([vt, np.zeros_like(vt)])])
        reduced, pivots = self.rref(block)
        split = sum(1 for c in pivots if c < n)
        total = Subspace(np.ascontiguousarray(reduced[:split, :n].T), self.p, tuple(pivots[:split]))
        common = Subspace(
            np.ascontiguousarray(reduced[split:, n:].T),
            self.p,
            tuple(c - n for c in pivots[split:]),
        )
        return total, common

    def apply(self, a: np.ndarray, u: Subspace) -> Subspace:
        if a.shape[1] != u.ambient:
            raise DimensionError(f"map with {a.shape[1]} columns applied to subspace of GF(p)^{u.ambient}")
        if u.rank == 0:
            return Subspace.zero(a.shape[0], self.p)
        return self.span(self.matmul(a, u.basis))

    def preimage(self, a: np.ndarray, w: Subspace) -> Subspace:
        if a.shape[0] != w.ambient:
            raise DimensionError(f"map with {a.shape[0]} rows pulled back along subspace of GF(p)^{w.ambient}")
        if w.rank == w.ambient:
            return Subspace.full(a.shape[1], self.p)
        return self.kernel(self.matmul(w.quotient_map(), a))

    def complement(self, u: Subspace, v: Subspace) -> Subspace:
        """A complement ``w`` of ``v`` inside ``u`` (so that ``u = w ⊕ v``).

        Deterministic: keeps the echelon columns of ``u`` whose pivot rows are
        not pivot rows of ``v``.
        """
        _same_ambient(u, v)
        if not u.contains(v):
            raise ContainmentError("complement requires v to be a subspace of u")
        taken = set(v.pivots)
        keep = [j for j, r in enumerate(u.pivots) if r not in taken]
        return self.span(u.basis[:, keep])

    # -- randomness ---------------------------------------------------

    def random_matrix(self, rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
        return rng.integers(0, self.p, size=(rows, cols), dtype=np.int64)

    def random_invertible(self, n: int, seed: int | np.random.Generator) -> np.ndarray:
        """A uniformly random invertible n×n matrix.

        Singular draws are rejected and redrawn from the same generator, so
        the result is a deterministic function of ``(n, seed, p)``.
        """
        rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        retries = 0
        while True:
            a = self.random_matrix(n, n, rng)
            if self.rank(a) == n:
                if retries:
                    logger.debug("random_invertible(n=%d, p=%d): %d singular draws", n, self.p, retries)
                return a
            retries += 1


@lru_cache(maxsize=None)
def _field(p: int) -> PrimeField:
    return PrimeField(p)


def _same_ambient(u: Subspace, v: Subspace) -> int:
    if u.ambient != v.ambient:
        raise DimensionError(f"subspaces of GF(p)^{u.ambient} and GF(p)^{v.ambient}")
    if u.p != v.p:
        raise DimensionError(f"subspaces over GF({u.p}) and GF({v.p})")
    return u.ambient


@dataclass(frozen=True, eq=False)
class Subspace:
    """A subspace of GF(p)^n held by its canonical echelon basis (n × rank)."""

    basis: np.ndarray
    p: int
    pivots: tuple[int, ...] = field(default=None, repr=False)

    def __post_init__(self):
        if self.pivots is None:
            pivots = tuple(int(np.flatnonzero(col)[0]) for col in self.basis.T)
            object.__setattr__(self, "pivots", pivots)

    @classmethod
    def zero(cls, n: int, p: int) -> Subspace:
        return cls(np.zeros((n, 0), dtype=np.int64), p, ())

    @classmethod
    def full(cls, n: int, p: int) -> Subspace:
        return cls(np.eye(n, dtype=np.int64), p, tuple(range(n)))

    @property
    def ambient(self) -> int:
        return self.basis.shape[0]

    @property
    def rank(self) -> int:
        return self.basis.shape[1]

    @property
    def gf(self) -> PrimeField:
        return _field(self.p)

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.p == other.p and self.basis.shape == other.basis.shape and np.array_equal(self.basis, other.basis)

    def __hash__(self):
        return hash((self.p, self.basis.shape, self.basis.tobytes()))

    def __repr__(self):
        return f"Subspace(ambient={self.ambient}, rank={self.rank}, p={self.p})"

    def __add__(self, other: Subspace) -> Subspace:
        return self.gf.sum_intersect(self, other)[0]

    def __and__(self, other: Subspace) -> Subspace:
        return self.gf.sum_intersect(self, other)[1]

    def __le__(self, other: Subspace) -> bool:
        return other.contains(self)

    @cached_property
    def _nonpivots(self) -> np.ndarray:
        mask = np.ones(self.ambient, dtype=bool)
        mask[list(self.pivots)] = False
        return np.flatnonzero(mask)

    def residual(self, vectors: np.ndarray) -> np.ndarray:
        """Reduce the columns of ``vectors`` modulo this subspace."""
        if self.rank == 0:
            return np.asarray(vectors, dtype=np.int64) % self.p
        coords = vectors[list(self.pivots)]
        return (vectors - self.gf.matmul(self.basis, coords)) % self.p

    def contains(self, other: Subspace | np.ndarray) -> bool:
        vecs = other.basis if isinstance(other, Subspace) else np.asarray(other, dtype=np.int64)
        if vecs.ndim == 1:
            vecs = vecs[:, None]
        if vecs.shape[0] != self.ambient:
            raise DimensionError(f"vectors of length {vecs.shape[0]} tested against GF(p)^{self.ambient}")
        if vecs.shape[1] == 0 or self.rank == self.ambient:
            return True
        return not self.residual(vecs).any()

    def coordinates(self, vectors: np.ndarray) -> np.ndarray:
        """Coordinates of vectors lying in the subspace, in terms of ``basis``."""
        if not self.contains(vectors):
            raise ContainmentError("vectors do not lie in the subspace")
        return np.asarray(vectors, dtype=np.int64)[list(self.pivots)] % self.p

    def quotient_map(self) -> np.ndarray:
        """A surjection GF(p)^n -> GF(p)^(n - rank) whose kernel is this subspace.

        The target coordinates are the non-pivot rows, in increasing order.
        """
        n = self.ambient
        rest = self._nonpivots
        q = np.zeros((len(rest), n), dtype=np.int64)
        q[np.arange(len(rest)), rest] = 1
        if self.rank:
            q[:, list(self.pivots)] = (-self.basis[rest]) % self.p
        return q


def direct_sum_matrix(blocks: Iterable[np.ndarray]) -> np.ndarray:
    """Block-diagonal matrix of the given (possibly empty) blocks."""
    blocks = list(blocks)
    rows = sum(b.shape[0] for b in blocks)
    cols = sum(b.shape[1] for b in blocks)
    out = np.zeros((rows, cols), dtype=np.int64)
    r = c = 0
    for b in blocks:
        out[r : r + b.shape[0], c : c + b.shape[1]] = b
        r += b.shape[0]
        c += b.shape[1]
    return out
