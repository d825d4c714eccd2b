import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pdecomp.blocks import Barcode, Birth, Death, HBand, VBand, block_module, random_exact_module, synth
from pdecomp.decompose import decompose
from pdecomp.errors import OrderError, StructureError
from pdecomp.field import PrimeField
from pdecomp.grid import (
    GridModule,
    conjugate,
    constant_module,
    crop,
    direct_sum,
    from_maps,
    pad_extend,
    parse_path,
    restrict_path,
    smoothing,
    validate,
    zero_module,
)


def non_exact_square(F):
    """k at three corners, k^2 at the top; the two paths land on e1 and e2."""
    dims = [[1, 1], [1, 2]]
    return from_maps(
        F,
        dims,
        {(0, 0): [[1]], (0, 1): [[0], [1]]},
        {(0, 0): [[1]], (1, 0): [[1], [0]]},
    )


def test_identity_module_is_exact(F):
    for n, m in [(0, 0), (1, 0), (3, 2)]:
        report = validate(constant_module(n, m, 2, F))
        assert report.commutes and report.exact and report.first_failure is None


def test_non_exact_square_is_rejected(F):
    M = non_exact_square(F)
    report = validate(M)
    assert not report.exact
    f = report.first_failure
    assert (f.kind, f.dim_image, f.dim_kernel, f.corner) == ("exact", 1, 0, (0, 0))
    assert "kind=exact" in report.summary()


def test_non_commuting_square_is_tagged_commute(F2):
    # dim Im = dim Ker = 1 but the square does not commute
    M = from_maps(F2, [[1, 1], [1, 1]], {(0, 0): [[1]], (0, 1): [[1]]}, {(0, 0): [[1]], (1, 0): [[0]]})
    report = validate(M)
    assert not report.commutes and report.first_failure.kind == "commute"


def test_direct_sum_of_blocks_is_exact(F):
    shapes = [Birth(1, 0), Death(1, 1), HBand(0, 1), VBand(1, 1)]
    for A in shapes:
        for B in shapes:
            M = direct_sum(block_module(A, 2, 2, F), block_module(B, 2, 2, F))
            assert validate(M).exact


def test_direct_sum_single_point(F):
    M = direct_sum(block_module(Birth(0, 0), 0, 0, F), block_module(Birth(0, 0), 0, 0, F))
    assert M.dims.tolist() == [[2]]


def test_malformed_shapes_rejected(F2):
    with pytest.raises(StructureError):
        GridModule(F2, 1, 0, np.array([[1], [1]]), {(0, 0): np.zeros((2, 1), dtype=np.int64)}, {})
    with pytest.raises(StructureError):
        GridModule(F2, 1, 0, np.array([[1], [1]]), {}, {})
    with pytest.raises(StructureError):
        GridModule(F2, 0, 0, np.array([[-1]]), {}, {})


def test_transport_basics(F):
    M, _ = random_exact_module(2, 1, 5, 3, F)
    for t in M.points():
        assert np.array_equal(M.transport(t, t), F.identity(M.dim(t)))
    assert np.array_equal(M.transport((0, 0), (1, 0)), M.hmaps[(0, 0)])
    with pytest.raises(OrderError):
        M.transport((1, 0), (0, 1))


def test_transport_is_path_independent(F):
    M, _ = random_exact_module(2, 1, 6, 11, F)
    via_v = F.chain([M.vmaps[(0, 0)], M.hmaps[(0, 1)], M.hmaps[(1, 1)]], M.dim((0, 0)))
    via_h = F.chain([M.hmaps[(0, 0)], M.hmaps[(1, 0)], M.vmaps[(2, 0)]], M.dim((0, 0)))
    assert np.array_equal(M.transport((0, 0), (2, 1)), via_v)
    assert np.array_equal(via_v, via_h)


def test_conjugate_preserves_dims_and_exactness(F):
    M = synth(Barcode(2, 2, {Birth(1, 0): 1, Death(0, 1): 2, VBand(0, 1): 1}), F)
    C = conjugate(M, 5)
    assert np.array_equal(C.dims, M.dims)
    assert validate(C).exact
    assert decompose(C) == decompose(M)
    Z = zero_module(0, 0, F)
    assert conjugate(Z, 1).dims.tolist() == [[0]]


def test_smoothing_identity_module(F):
    M = constant_module(3, 2, 1, F)
    S = smoothing(M, 1, 1)
    assert (S.n, S.m) == (2, 1)
    assert (S.dims == 1).all()
    assert all(np.array_equal(mat, F.identity(1)) for _, _, _, mat in S.edges())


@pytest.mark.parametrize("a,b", [(a, b) for a in range(3) for b in range(3)])
def test_smoothing_birth_block(a, b, F2):
    # the image of the unit step right is nonzero exactly where both ends lie in the quadrant
    S = smoothing(block_module(Birth(a, b), 2, 2, F2), 1, 0)
    expected = Barcode(1, 2, {} if a == 2 else {Birth(a, b): 1})
    assert decompose(S) == expected


def test_smoothing_bounds(F2):
    M = constant_module(1, 1, 1, F2)
    with pytest.raises(ValueError):
        smoothing(M, 0, 0)
    with pytest.raises(ValueError):
        smoothing(M, 2, 0)


def test_pad_extend_and_crop(F):
    M, truth = random_exact_module(2, 2, 6, 4, F)
    assert pad_extend(M, 0) is M
    P = pad_extend(M, 2)
    assert (P.n, P.m) == (4, 4) and validate(P).exact
    C = crop(P, (0, 0), (2, 2))
    assert np.array_equal(C.dims, M.dims)
    assert decompose(C) == truth
    L = pad_extend(M, 1, side="low")
    assert decompose(crop(L, (1, 1), (3, 3))) == truth


def test_restrict_path_single_point(F2):
    P = restrict_path(constant_module(1, 1, 3, F2), [(1, 0)])
    assert P.dims == [3] and P.maps == []


def test_restrict_path_antidiagonal(F2):
    M = block_module(VBand(0, 1), 2, 2, F2)
    with pytest.raises(OrderError):
        restrict_path(M, [(0, 1), (1, 0)])
    P = restrict_path(M, [(0, 1), (1, 0)], strict=False)
    assert P.dims == [1, 1] and P.maps == [(None, None)]


def test_restrict_monotone_path_through_birth(F2):
    M = block_module(Birth(1, 1), 2, 2, F2)
    P = restrict_path(M, [(0, 0), (1, 0), (1, 1), (2, 1), (2, 2)])
    assert P.dims == [0, 0, 1, 1, 1]
    assert [d for d, _ in P.maps] == ["fwd"] * 4
    assert P.maps[2][1].tolist() == [[1]] and P.maps[3][1].tolist() == [[1]]
    assert P.maps[1][1].shape == (1, 0)


def test_parse_path():
    assert parse_path("0,1; 1,0;") == [(0, 1), (1, 0)]
    with pytest.raises(ValueError):
        parse_path("0,1,2")


# -- properties -----------------------------------------------------------------


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 4), st.integers(0, 4), st.integers(1, 8), st.integers(0, 2**31), st.sampled_from([2, 101]))
def test_synth_is_exact_on_every_rectangle(n, m, blocks, seed, p):
    F = PrimeField(p)
    M, _ = random_exact_module(n, m, blocks, seed, F)
    assert validate(M).exact
    # exactness of unit squares implies it for all rectangles
    for x0 in range(n):
        for y0 in range(m):
            for x1 in range(x0 + 1, n + 1):
                for y1 in range(y0 + 1, m + 1):
                    h, v = M.transport((x0, y0), (x1, y0)), M.transport((x0, y0), (x0, y1))
                    r, t = M.transport((x1, y0), (x1, y1)), M.transport((x0, y1), (x1, y1))
                    phi = np.vstack([h, v])
                    psi = np.hstack([r, (-t) % p])
                    assert F.rank(phi) == psi.shape[1] - F.rank(psi)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.integers(1, 8), st.integers(0, 2**31))
def test_switching_on_exact_squares(n, m, blocks, seed):
    F = PrimeField(3)
    M, _ = random_exact_module(n, m, blocks, seed, F)
    for x in range(n):
        for y in range(m):
            bottom, left = M.hmaps[(x, y)], M.vmaps[(x, y)]
            right, top = M.vmaps[(x + 1, y)], M.hmaps[(x, y + 1)]
            assert F.kernel(right) == F.apply(bottom, F.kernel(left))
            assert F.kernel(top) == F.apply(left, F.kernel(bottom))
