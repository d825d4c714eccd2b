import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pdecomp.blocks import Barcode, Birth, Death, HBand, VBand, block_module, enumerate_shapes, random_exact_module, synth
from pdecomp.decompose import (
    Cut,
    certify,
    check_lemmas,
    cut_subspaces,
    decompose,
    multiplicity,
    shape_subspaces,
    v_spaces,
)
from pdecomp.errors import CertificationError, InconsistencyError, NotExactError, SupportError
from pdecomp.field import PrimeField, Subspace
from pdecomp.grid import conjugate, constant_module, from_maps, validate

from test_grid import non_exact_square


def test_cut_conventions(F):
    M = constant_module(2, 2, 1, F)
    lo = cut_subspaces(M, (1, 1), Cut("x", 0, 2))
    assert lo.ima_minus.rank == 0 and lo.ima_plus.rank == 1 and lo.ker_minus is None
    hi = cut_subspaces(M, (1, 1), Cut("y", 3, 2))
    assert hi.ker_plus == Subspace.full(1, F.p) and hi.ima_plus is None
    mid = cut_subspaces(M, (1, 1), Cut("x", 1, 2))
    assert (mid.ima_minus.rank, mid.ima_plus.rank) == (1, 1)
    mid = cut_subspaces(M, (1, 1), Cut("y", 2, 2))
    assert (mid.ker_minus.rank, mid.ker_plus.rank) == (0, 0)


def test_own_shape_subspaces(F):
    for a, b in [(0, 0), (1, 2), (2, 1)]:
        M = block_module(Birth(a, b), 2, 2, F)
        ss = shape_subspaces(M, Birth(a, b), (2, 2))
        assert (ss.ima_minus.rank, ss.ima_plus.rank, ss.ker_minus.rank, ss.ker_plus.rank) == (0, 1, 0, 1)
    with pytest.raises(SupportError):
        shape_subspaces(M, Birth(2, 2), (0, 0))


def test_v_spaces_examples(F):
    for shape in enumerate_shapes(2, 2):
        M = block_module(shape, 2, 2, F)
        x0, x1, y0, y1 = shape.box(2, 2)
        for t in itertools.product(range(x0, x1 + 1), range(y0, y1 + 1)):
            v_minus, v_plus = v_spaces(M, shape, t)
            assert (v_minus.rank, v_plus.rank) == (0, 1)
        for other in enumerate_shapes(2, 2):
            if other != shape:
                v_minus, v_plus = v_spaces(M, other, other.min_point(2, 2))
                assert v_minus == v_plus
    Z = synth(Barcode(2, 2), F)
    assert [s.rank for s in v_spaces(Z, Death(1, 1), (0, 0))] == [0, 0]


def test_multiplicity_examples(F):
    for shape in [Birth(1, 0), Death(0, 1), HBand(1, 1), VBand(0, 1)]:
        M = block_module(shape, 2, 2, F, mult=3)
        for other in enumerate_shapes(2, 2):
            assert multiplicity(M, other) == (3 if other == shape else 0)


def test_decompose_examples(F):
    assert decompose(constant_module(2, 3, 1, F)) == Barcode(2, 3, {Birth(0, 0): 1})
    B = Barcode(2, 2, {Birth(1, 0): 1, Birth(0, 1): 1})
    assert decompose(conjugate(synth(B, F), 3)) == B
    assert decompose(synth(Barcode(0, 0), F)) == Barcode(0, 0)


def test_decompose_rejects_non_exact(F):
    with pytest.raises(NotExactError):
        decompose(non_exact_square(F))


def test_decompose_reports_broken_identity(F2):
    # skipping the exactness check lets the pointwise identity catch the problem
    with pytest.raises(InconsistencyError):
        decompose(non_exact_square(F2), check=False)


@pytest.mark.parametrize("n,m", [(1, 0), (1, 1), (2, 1), (2, 2)])
def test_every_barcode_with_small_multiplicities(n, m):
    F = PrimeField(3)
    shapes = enumerate_shapes(n, m)
    rng = np.random.default_rng(n * 10 + m)
    for _ in range(30):
        mults = rng.integers(0, 3, size=len(shapes))
        B = Barcode(n, m, dict(zip(shapes, (int(k) for k in mults))))
        M = conjugate(synth(B, F), rng)
        assert decompose(M) == B


def test_every_single_block_recovered():
    F = PrimeField(2)
    for n, m in [(0, 0), (1, 1), (2, 2)]:
        for shape in enumerate_shapes(n, m):
            assert decompose(conjugate(block_module(shape, n, m, F), 1)) == Barcode(n, m, {shape: 1})


def test_threads_give_same_result():
    M, truth = random_exact_module(5, 4, 12, 9, PrimeField(101))
    assert decompose(M, threads=1) == decompose(M, threads=3) == truth


def test_witness_point_independence(F):
    M, _ = random_exact_module(3, 3, 10, 17, F)
    for shape in enumerate_shapes(3, 3):
        x0, x1, y0, y1 = shape.box(3, 3)
        diffs = {
            v[1].rank - v[0].rank
            for v in (v_spaces(M, shape, t) for t in itertools.product(range(x0, x1 + 1), range(y0, y1 + 1)))
        }
        assert diffs == {multiplicity(M, shape)}


def test_lemma_suite_on_blocks(F):
    for shape in enumerate_shapes(2, 2):
        M = block_module(shape, 2, 2, F, mult=2)
        assert check_lemmas(M, 30, seed=1, literal_kernels=False).passed


def test_literal_kernel_pullback_fails_on_a_single_band():
    M = block_module(VBand(0, 0), 2, 2, PrimeField(2))
    failures = check_lemmas(M, 30, seed=1).failures
    assert failures and all(f.startswith("pullback of ker") for f in failures)


def test_kernel_pullback_needs_restriction(F2):
    # the HBand(0,0) vector at (0,0) dies going up but survives going right,
    # so it lies in the pullback of Ker+ at (0,1) but not in Ker+ at (0,0)
    M = block_module(HBand(0, 0), 1, 2, F2)
    shape = Death(0, 1)
    at_s, at_t = shape_subspaces(M, shape, (0, 0)), shape_subspaces(M, shape, (0, 1))
    pulled = F2.preimage(M.transport((0, 0), (0, 1)), at_t.ker_plus)
    assert pulled.rank == 1 and at_s.ker_plus.rank == 0
    assert pulled & at_s.ker_plus == at_s.ker_plus


def test_restricted_lemmas_hold_on_random_modules():
    for seed in range(15):
        M, _ = random_exact_module(4, 3, 10, seed, PrimeField(2 if seed % 2 else 101))
        report = check_lemmas(M, 40, seed, literal_kernels=False)
        assert report.passed, report.failures[:3]


def test_literal_kernels_hold_for_birth_quadrants():
    for seed in range(10):
        B = Barcode(3, 3, {Birth(int(a), int(b)): 1 for a, b in np.random.default_rng(seed).integers(0, 4, (4, 2))})
        M = conjugate(synth(B, PrimeField(3)), seed)
        assert check_lemmas(M, 40, seed).passed


def test_switching_fails_on_non_exact_square(F):
    # k at the two side corners, zero at the bottom and top: the square commutes but is not exact
    M = from_maps(F, [[0, 1], [1, 0]], {}, {})
    assert validate(M).first_failure.kind == "exact"
    report = check_lemmas(M, 5, seed=0, literal_kernels=False)
    assert any("switching" in f for f in report.failures)


def test_certify_single_block(F):
    cert = certify(block_module(Birth(1, 0), 2, 1, F), Barcode(2, 1, {Birth(1, 0): 1}))
    for t, basis in cert.bases.items():
        assert basis.shape == ((1, 1) if t[0] >= 1 else (0, 0))
        if basis.size:
            assert basis.tolist() == [[1]]


def test_certify_random_modules(F):
    for seed in range(8):
        M, truth = random_exact_module(4, 3, 10, seed, F)
        cert = certify(M, truth)
        for t in M.points():
            assert F.rank(cert.bases[t]) == M.dim(t)


def test_certify_rejects_wrong_barcode(F2):
    M, truth = random_exact_module(3, 3, 6, 2, F2)
    wrong = truth.union(Barcode(3, 3, {Birth(0, 0): 1}))
    with pytest.raises(CertificationError):
        certify(M, wrong)
    with pytest.raises(CertificationError):
        certify(M, Barcode(2, 3, {}))


def test_certify_rejects_non_exact(F):
    M = non_exact_square(F)
    with pytest.raises(CertificationError):
        certify(M, Barcode(1, 1, {Birth(0, 0): 1, Birth(1, 1): 1}))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 4), st.integers(0, 4), st.integers(1, 10), st.integers(0, 2**31), st.sampled_from([2, 101]))
def test_round_trip_property(n, m, blocks, seed, p):
    M, truth = random_exact_module(n, m, blocks, seed, PrimeField(p))
    B = decompose(M)
    assert B == truth
    assert np.array_equal(B.pointwise_dims(), M.dims)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 3), st.integers(0, 3), st.integers(1, 8), st.integers(0, 2**31))
def test_inclusion_chain_and_two_forms(n, m, blocks, seed):
    M, _ = random_exact_module(n, m, blocks, seed, PrimeField(2))
    for shape in enumerate_shapes(n, m):
        ss = shape_subspaces(M, shape, shape.min_point(n, m))
        assert ss.ima_minus <= ss.ima_plus and ss.ker_minus <= ss.ker_plus
        v_minus, v_plus = v_spaces(M, shape, shape.min_point(n, m))
        assert v_minus <= v_plus
    assert check_lemmas(M, 10, seed, literal_kernels=False).passed
