import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pdecomp.blocks import Barcode, HBand, VBand, block_module
from pdecomp.errors import StructureError
from pdecomp.field import PrimeField
from pdecomp.grid import conjugate, restrict_path, validate
from pdecomp.zigzag import (
    BWD,
    FWD,
    IntervalBarcode,
    Zigzag,
    decompose_path,
    direct_sum_zigzag,
    extend_to_grid,
    normalize,
    pullback,
    pushout,
    random_intervals,
    random_zigzag,
    staircase,
    synth_zigzag,
    zigzag_decompose,
)

from conftest import all_vectors


def brute_pullback_size(F, f, g):
    b, c = f.shape[1], g.shape[1]
    return sum(
        1
        for v in all_vectors(F.p, b + c)
        if np.array_equal(f @ v[:b] % F.p, g @ v[b:] % F.p)
    )


# -- universal squares ----------------------------------------------------------


def test_pushout_examples(F):
    one = F.identity(1)
    d, inb, inc = pushout(F, one, one)
    assert d == 1 and F.rank(inb) == 1 and F.rank(inc) == 1
    d, inb, inc = pushout(F, F.zeros(2, 0), F.zeros(1, 0))
    assert d == 3 and F.rank(np.hstack([inb, inc])) == 3


def test_pullback_examples(F):
    one = F.identity(1)
    d, prb, prc = pullback(F, one, one)
    assert d == 1 and np.array_equal(prb, prc)
    d, _, _ = pullback(F, F.zeros(0, 2), F.zeros(0, 1))
    assert d == 3
    # identity against zero: every pair (0, c) qualifies, a line
    d, prb, prc = pullback(F, one, F.zeros(1, 1))
    assert d == 1 and not prb.any() and prc.any()


def test_pullback_against_enumeration():
    F = PrimeField(3)
    rng = np.random.default_rng(0)
    for _ in range(30):
        b, c, d = (int(v) for v in rng.integers(0, 3, 3))
        f, g = F.random_matrix(d, b, rng), F.random_matrix(d, c, rng)
        dim, prb, prc = pullback(F, f, g)
        assert 3**dim == brute_pullback_size(F, f, g)
        assert np.array_equal(F.matmul(f, prb), F.matmul(g, prc))
        assert F.rank(np.vstack([prb, prc])) == dim


def test_squares_commute(F):
    rng = np.random.default_rng(1)
    for _ in range(20):
        a, b, c = (int(v) for v in rng.integers(0, 4, 3))
        f, g = F.random_matrix(b, a, rng), F.random_matrix(c, a, rng)
        d, inb, inc = pushout(F, f, g)
        assert np.array_equal(F.matmul(inb, f), F.matmul(inc, g))
        assert F.rank(np.hstack([inb, inc])) == d


# -- structure -------------------------------------------------------------------


def test_zigzag_validation(F2):
    with pytest.raises(StructureError):
        Zigzag(F2, ())
    with pytest.raises(StructureError):
        Zigzag(F2, (1, 1), ())
    with pytest.raises(StructureError):
        Zigzag(F2, (1, 1), (("up", [[1]]),))
    with pytest.raises(StructureError):
        Zigzag(F2, (1, 2), ((FWD, [[1]]),))


def test_normalize_inserts_identities(F2):
    Z = Zigzag(F2, (1, 2, 1), ((BWD, [[1, 0]]), (BWD, [[1], [1]])))
    N, position = normalize(Z)
    assert N.is_alternating()
    assert [d for d, _ in N.maps] == [FWD, BWD, FWD, BWD]
    assert N.dims == (1, 1, 2, 2, 1)
    assert [N.dims[i] for i in position] == list(Z.dims)
    assert position == [0, 2, 4]


def test_staircase_is_a_zigzag_path():
    for L in range(8):
        stairs = staircase(L)
        for j, (a, b) in enumerate(zip(stairs, stairs[1:])):
            if j % 2 == 0:
                assert b[0] == a[0] + 1 and b[1] == a[1]
            else:
                assert b[0] == a[0] and b[1] == a[1] - 1


def test_extend_single_space(F):
    M, stairs = extend_to_grid(Zigzag(F, (3,)))
    assert (M.n, M.m) == (0, 0) and M.dims.tolist() == [[3]] and stairs == [(0, 0)]


def test_extend_interval_zigzag(F):
    Z = synth_zigzag(IntervalBarcode(5, {(0, 5): 1}), F)
    M, stairs = extend_to_grid(Z)
    assert (M.dims == 1).all()
    assert all(F.rank(mat) == 1 for _, _, _, mat in M.edges())
    assert validate(M).exact
    assert [M.dim(t) for t in stairs] == [1] * 6


def test_extend_requires_alternating(F2):
    Z = Zigzag(F2, (1, 1), ((BWD, [[1]]),))
    with pytest.raises(StructureError):
        extend_to_grid(Z)


# -- decomposition ---------------------------------------------------------------


def test_decompose_examples(F):
    assert zigzag_decompose(synth_zigzag(IntervalBarcode(4, {(0, 4): 1}), F)) == IntervalBarcode(4, {(0, 4): 1})
    I = IntervalBarcode(3, {(0, 2): 1, (1, 3): 2})
    Z = synth_zigzag(I, F, seed=3)
    assert Z.dims == (1, 3, 3, 2)
    assert zigzag_decompose(Z) == I


def test_synth_examples(F):
    Z = synth_zigzag(IntervalBarcode(3), F)
    assert Z.dims == (0, 0, 0, 0)
    Z = synth_zigzag(IntervalBarcode(3, {(2, 2): 1}), F)
    assert Z.dims == (0, 0, 1, 0)
    assert zigzag_decompose(Z) == IntervalBarcode(3, {(2, 2): 1})


def test_non_alternating_round_trip(F):
    rng = np.random.default_rng(5)
    for _ in range(20):
        L = int(rng.integers(0, 8))
        I = random_intervals(L, 5, rng)
        directions = [FWD if rng.integers(0, 2) else BWD for _ in range(L)]
        Z = synth_zigzag(I, F, directions=directions, seed=int(rng.integers(0, 1000)))
        assert zigzag_decompose(Z) == I


def test_direct_sum_is_additive(F2):
    A = synth_zigzag(IntervalBarcode(4, {(0, 1): 1, (2, 4): 1}), F2, seed=1)
    B = synth_zigzag(IntervalBarcode(4, {(1, 3): 2}), F2, seed=2)
    assert zigzag_decompose(direct_sum_zigzag(A, B)) == IntervalBarcode(4, {(0, 1): 1, (2, 4): 1, (1, 3): 2})


def test_band_crossed_twice():
    F = PrimeField(2)
    M = conjugate(block_module(VBand(0, 1), 2, 2, F), 4)
    P = restrict_path(M, [(0, 2), (2, 2), (1, 0)])
    assert [d for d, _ in P.maps] == [FWD, BWD]
    assert decompose_path(P) == IntervalBarcode(2, {(0, 0): 1, (2, 2): 1})


def test_band_on_unordered_antidiagonal():
    F = PrimeField(2)
    M = block_module(VBand(0, 1), 2, 2, F)
    P = restrict_path(M, [(0, 2), (1, 1), (2, 0)], strict=False)
    assert decompose_path(P) == IntervalBarcode(2, {(0, 0): 1, (1, 1): 1})
    P = restrict_path(M, [(0, 1), (1, 0)], strict=False)
    assert decompose_path(P) == IntervalBarcode(1, {(0, 0): 1, (1, 1): 1})


def test_horizontal_band_restriction_counts_runs():
    F = PrimeField(3)
    M = conjugate(block_module(HBand(1, 2), 3, 3, F), 1)
    path = [(0, 0), (0, 1), (0, 3), (0, 1), (3, 1), (3, 0), (3, 3)]
    P = restrict_path(M, path)
    # inside at indices 1, 3, 4: runs [1,1] and [3,4]
    assert decompose_path(P) == IntervalBarcode(6, {(1, 1): 1, (3, 4): 1})


# -- properties -------------------------------------------------------------------


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 12), st.integers(0, 2**31), st.sampled_from([2, 101]))
def test_round_trip_property(L, seed, p):
    F = PrimeField(p)
    rng = np.random.default_rng(seed)
    I = random_intervals(L, 6, rng)
    assert zigzag_decompose(synth_zigzag(I, F, seed=seed)) == I


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10), st.integers(0, 2**31), st.sampled_from([2, 3]))
def test_random_zigzag_consistency(L, seed, p):
    F = PrimeField(p)
    rng = np.random.default_rng(seed)
    Z = random_zigzag(L, 3, rng, F)
    I = zigzag_decompose(Z)
    assert [I.count_containing(i) for i in range(L + 1)] == list(Z.dims)
    for j, (_, mat) in enumerate(Z.maps):
        assert F.rank(mat) == I.count_containing(j, j + 1)


def test_brute_force_indecomposable_count_small():
    # over GF(2) with dims <= 1 every zigzag is a sum of intervals we can read off directly
    F = PrimeField(2)
    for dirs in itertools.product([FWD, BWD], repeat=3):
        for entries in itertools.product([0, 1], repeat=3):
            Z = Zigzag(F, (1, 1, 1, 1), tuple((d, [[e]]) for d, e in zip(dirs, entries)))
            runs, start = {}, 0
            for j, e in enumerate(entries):
                if not e:
                    runs[(start, j)] = runs.get((start, j), 0) + 1
                    start = j + 1
            runs[(start, 3)] = runs.get((start, 3), 0) + 1
            assert zigzag_decompose(Z) == IntervalBarcode(3, runs)
