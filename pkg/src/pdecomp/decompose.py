"""Block decomposition of exact grid modules.

For a shape ``Fs`` and a point ``t`` of its support, the subspaces of ``M_t``

* ``Ima+`` - vectors alive since the support was entered,
* ``Ima-`` - vectors born before the support was entered and still alive,
* ``Ker+`` - vectors dead as soon as the support is left,
* ``Ker-`` - vectors dying before the support is left,

are assembled from the four cuts bounding the support.  With
``V+ = Ima+ ∩ Ker+`` and ``V- = Ima+ ∩ Ker- + Ima- ∩ Ker+``, the quotient
``V+/V-`` has the same dimension at every support point, and that dimension
is the multiplicity of the block ``Fs`` in ``M``.  On a grid every support is
a box with a minimum, so everything is evaluated at that minimum.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .blocks import Barcode, Shape, enumerate_shapes
from .errors import CertificationError, ContainmentError, InconsistencyError, NotExactError, SupportError
from .field import Subspace
from .grid import GridModule, Point, square_maps, validate


@dataclass(frozen=True)
class Cut:
    """Threshold ``c`` on an axis of length ``L``: ``c- = {i < c}``, ``c+ = {i >= c}``."""

    axis: str
    c: int
    length: int

    def __post_init__(self):
        if self.axis not in ("x", "y"):
            raise ValueError(f"unknown axis {self.axis!r}")
        if not 0 <= self.c <= self.length + 1:
            raise ValueError(f"cut position {self.c} outside [0, {self.length + 1}]")


@dataclass(frozen=True)
class ShapeCuts:
    l: Cut
    r: Cut
    v: Cut
    w: Cut


def shape_cuts(shape: Shape, n: int, m: int) -> ShapeCuts:
    """The four cuts delimiting the support box ``[l, r-1] x [v, w-1]``."""
    x0, x1, y0, y1 = shape.box(n, m)
    return ShapeCuts(Cut("x", x0, n), Cut("x", x1 + 1, n), Cut("y", y0, m), Cut("y", y1 + 1, m))


# -- cached images and kernels of structure maps ------------------------


def _image(M: GridModule, s: Point, t: Point) -> Subspace:
    key = ("im", s, t)
    hit = M._cache.get(key)
    if hit is None:
        hit = M.field.image(M.transport(s, t))
        M._cache[key] = hit
    return hit


def _kernel(M: GridModule, s: Point, t: Point) -> Subspace:
    key = ("ker", s, t)
    hit = M._cache.get(key)
    if hit is None:
        hit = M.field.kernel(M.transport(s, t))
        M._cache[key] = hit
    return hit


@dataclass(frozen=True)
class CutSubspaces:
    ima_minus: Optional[Subspace] = None
    ima_plus: Optional[Subspace] = None
    ker_minus: Optional[Subspace] = None
    ker_plus: Optional[Subspace] = None


def cut_subspaces(M: GridModule, t: Point, cut: Cut) -> CutSubspaces:
    """Image and kernel subspaces of ``M_t`` attached to one cut.

    Images are defined when ``t`` lies on the upper side of the cut, kernels
    when it lies on the lower side; the other pair is returned as ``None``.
    On a grid the limits are realized by the points adjacent to the cut.
    """
    i = t[0] if cut.axis == "x" else t[1]

    def on_line(k: int) -> Point:
        return (k, t[1]) if cut.axis == "x" else (t[0], k)

    c = cut.c
    if i >= c:
        minus = Subspace.zero(M.dim(t), M.p) if c == 0 else _image(M, on_line(c - 1), t)
        return CutSubspaces(ima_minus=minus, ima_plus=_image(M, on_line(c), t))
    plus = Subspace.full(M.dim(t), M.p) if c == cut.length + 1 else _kernel(M, t, on_line(c))
    return CutSubspaces(ker_minus=_kernel(M, t, on_line(c - 1)), ker_plus=plus)


@dataclass(frozen=True)
class ShapeSubspaces:
    ima_minus: Subspace
    ima_plus: Subspace
    ker_minus: Subspace
    ker_plus: Subspace
    cuts: dict = field(default_factory=dict, repr=False, compare=False)


def shape_subspaces(M: GridModule, shape: Shape, t: Point) -> ShapeSubspaces:
    if not shape.contains(t, M.n, M.m):
        raise SupportError(f"{t} is not in the support of {shape!r}")
    sc = shape_cuts(shape, M.n, M.m)
    parts = {name: cut_subspaces(M, t, getattr(sc, name)) for name in ("l", "r", "v", "w")}
    l, r, v, w = parts["l"], parts["r"], parts["v"], parts["w"]
    ima_plus = l.ima_plus & v.ima_plus
    ima_minus = (l.ima_minus + v.ima_minus) & ima_plus
    ker_plus = r.ker_plus & w.ker_plus
    ker_minus = (r.ker_minus + w.ker_minus) & ker_plus
    return ShapeSubspaces(ima_minus, ima_plus, ker_minus, ker_plus, parts)


def v_spaces(M: GridModule, shape: Shape, t: Point) -> tuple[Subspace, Subspace]:
    """``(V-, V+)`` at ``t``."""
    ss = shape_subspaces(M, shape, t)
    v_plus = ss.ima_plus & ss.ker_plus
    v_minus = (ss.ima_plus & ss.ker_minus) + (ss.ima_minus & ss.ker_plus)
    return v_minus, v_plus


def multiplicity(M: GridModule, shape: Shape) -> int:
    """Multiplicity of the block ``shape`` in ``M`` (assumed exact)."""
    v_minus, v_plus = v_spaces(M, shape, shape.min_point(M.n, M.m))
    return v_plus.rank - v_minus.rank


def _thread_count(threads: Optional[int]) -> int:
    if threads is None:
        threads = int(os.environ.get("PDECOMP_THREADS", "1") or 1)
    if threads <= 0:
        threads = os.cpu_count() or 1
    return threads


def decompose(M: GridModule, threads: Optional[int] = None, check: bool = True) -> Barcode:
    """The barcode of an exact module.

    Refuses non-exact input.  After computing every multiplicity, checks that
    the blocks account for every dimension of every space and raises
    :class:`InconsistencyError` otherwise.
    """
    if check:
        report = validate(M)
        if not report.exact:
            raise NotExactError(f"module is not exact: {report.summary()}", report)
    shapes = enumerate_shapes(M.n, M.m)
    workers = _thread_count(threads)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            mults = list(pool.map(lambda s: multiplicity(M, s), shapes))
    else:
        mults = [multiplicity(M, s) for s in shapes]
    bad = [s for s, k in zip(shapes, mults) if k < 0]
    if bad:
        raise InconsistencyError(f"negative multiplicity for {bad[0]!r}")
    B = Barcode(M.n, M.m, {s: k for s, k in zip(shapes, mults) if k})
    covered = B.pointwise_dims()
    if not np.array_equal(covered, M.dims):
        x, y = (int(c) for c in np.argwhere(covered != M.dims)[0])
        raise InconsistencyError(
            f"blocks cover dimension {covered[x, y]} at ({x}, {y}) but the space has dimension {M.dims[x, y]}"
        )
    return B


# -- certification ---------------------------------------------------------


@dataclass
class Certificate:
    """Explicit isomorphism between ``M`` and the direct sum of its blocks.

    ``anchors[Fs]`` spans a complement of ``V-`` in ``V+`` at the minimum of
    the support of ``Fs``.  ``bases[t]`` is the invertible matrix whose columns
    are the transported anchor vectors of every block alive at ``t``, labelled
    by ``labels[t]``.
    """

    anchors: dict[Shape, np.ndarray]
    bases: dict[Point, np.ndarray]
    labels: dict[Point, list[tuple[Shape, int]]]


def certify(M: GridModule, B: Barcode) -> Certificate:
    """Build and check explicit block bases for ``M`` with barcode ``B``.

    The checks alone prove ``M`` isomorphic to the direct sum of the blocks
    of ``B``, so no prior validation is needed; any failure, including on a
    non-exact module, raises :class:`CertificationError`.
    """
    if (B.n, B.m) != (M.n, M.m):
        raise CertificationError(f"barcode grid {B.n}x{B.m} does not match module grid {M.n}x{M.m}")
    F = M.field
    n, m = M.n, M.m
    anchors: dict[Shape, np.ndarray] = {}
    for shape in enumerate_shapes(n, m):
        v_minus, v_plus = v_spaces(M, shape, shape.min_point(n, m))
        found = v_plus.rank - v_minus.rank
        claimed = B.entries.get(shape, 0)
        if found != claimed:
            raise CertificationError(f"{shape!r}: module multiplicity {found}, barcode claims {claimed}")
        if claimed:
            try:
                anchors[shape] = F.complement(v_plus, v_minus).basis
            except ContainmentError:
                raise CertificationError(f"{shape!r}: V- is not contained in V+ at the witness point") from None

    bases: dict[Point, np.ndarray] = {}
    labels: dict[Point, list[tuple[Shape, int]]] = {}
    for t in M.points():
        cols, lab = [], []
        for shape, w0 in anchors.items():
            if shape.contains(t, n, m):
                cols.append(F.matmul(M.transport(shape.min_point(n, m), t), w0))
                lab.extend((shape, i) for i in range(w0.shape[1]))
        basis = np.hstack(cols) if cols else F.zeros(M.dim(t), 0)
        if basis.shape != (M.dim(t), M.dim(t)) or F.rank(basis) != M.dim(t):
            raise CertificationError(
                f"point {t}: transported block vectors have shape {basis.shape} and rank "
                f"{F.rank(basis)}, expected an invertible {M.dim(t)}x{M.dim(t)} matrix"
            )
        bases[t], labels[t] = basis, lab

    for kind, s, t, mat in M.edges():
        if not mat.size:
            continue
        got = F.solve(bases[t], F.matmul(mat, bases[s]))
        want = np.zeros_like(got)
        where = {lab: row for row, lab in enumerate(labels[t])}
        for col, lab in enumerate(labels[s]):
            if lab in where:
                want[where[lab], col] = 1
        if not np.array_equal(got, want):
            raise CertificationError(f"{kind}-edge {s}->{t} is not block diagonal in the certified bases")
    return Certificate(anchors, bases, labels)


# -- lemma checks ------------------------------------------------------------


@dataclass
class LemmaReport:
    checks: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def expect(self, ok: bool, message: str):
        self.checks += 1
        if not ok:
            self.failures.append(message)


def _switching(M: GridModule, s: Point, report: LemmaReport):
    F = M.field
    bottom, left, right, top = square_maps(M, s)
    report.expect(F.kernel(right) == F.apply(bottom, F.kernel(left)), f"switching (right) fails at square {s}")
    report.expect(F.kernel(top) == F.apply(left, F.kernel(bottom)), f"switching (top) fails at square {s}")


def check_lemmas(M: GridModule, samples: int, seed: int, literal_kernels: bool = True) -> LemmaReport:
    """Spot-check the structural lemmas on random shapes and point pairs.

    Each sample draws a shape and ``s <= t`` in its support and checks that
    the structure map carries images and V-spaces onto each other, pulls
    kernels back onto each other, that ``dim V+ - dim V-`` does not depend
    on the point, that both forms of the combined ``Ima-``/``Ker-`` agree, and
    the switching identity on a random unit square.

    With ``literal_kernels=False`` the pulled-back kernels are first
    intersected with ``Ker+`` at ``s``. Off the birth quadrants a vector can
    die along one axis while surviving along the other (e.g. an ``HBand(0,0)``
    vector at the corner of ``Death(0,1)``), and then only this restricted
    form holds.
    """
    F = M.field
    rng = np.random.default_rng(seed)
    shapes = enumerate_shapes(M.n, M.m)
    report = LemmaReport()
    for _ in range(samples):
        shape = shapes[int(rng.integers(0, len(shapes)))]
        x0, x1, y0, y1 = shape.box(M.n, M.m)
        s = (int(rng.integers(x0, x1 + 1)), int(rng.integers(y0, y1 + 1)))
        t = (int(rng.integers(s[0], x1 + 1)), int(rng.integers(s[1], y1 + 1)))
        rho = M.transport(s, t)
        at_s, at_t = shape_subspaces(M, shape, s), shape_subspaces(M, shape, t)
        tag = f"{shape!r} s={s} t={t}"
        for name in ("ima_minus", "ima_plus"):
            report.expect(F.apply(rho, getattr(at_s, name)) == getattr(at_t, name), f"transport of {name}: {tag}")
        for name in ("ker_minus", "ker_plus"):
            pulled = F.preimage(rho, getattr(at_t, name))
            if not literal_kernels:
                pulled = pulled & at_s.ker_plus
            report.expect(pulled == getattr(at_s, name), f"pullback of {name}: {tag}")
        vs, vt = v_spaces(M, shape, s), v_spaces(M, shape, t)
        report.expect(F.apply(rho, vs[0]) == vt[0], f"transport of V-: {tag}")
        report.expect(F.apply(rho, vs[1]) == vt[1], f"transport of V+: {tag}")
        mult = multiplicity(M, shape)
        report.expect(vs[1].rank - vs[0].rank == mult, f"multiplicity differs at s: {tag}")
        report.expect(vt[1].rank - vt[0].rank == mult, f"multiplicity differs at t: {tag}")
        for ss, where in ((at_s, s), (at_t, t)):
            report.expect(ss.ima_minus <= ss.ima_plus and ss.ker_minus <= ss.ker_plus, f"inclusions at {where}: {tag}")
            report.expect(_two_forms_agree(ss), f"two forms of Ima-/Ker- differ at {where}: {tag}")
        if M.n and M.m:
            _switching(M, (int(rng.integers(0, M.n)), int(rng.integers(0, M.m))), report)
    return report


def _two_forms_agree(ss: ShapeSubspaces) -> bool:
    l, r, v, w = (ss.cuts[k] for k in ("l", "r", "v", "w"))
    ima = (l.ima_minus & v.ima_plus) + (v.ima_minus & l.ima_plus)
    ker = (r.ker_minus & w.ker_plus) + (w.ker_minus & r.ker_plus)
    return ima == ss.ima_minus and ker == ss.ker_minus
