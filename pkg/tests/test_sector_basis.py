from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ptchaos.errors import ArgumentError
from ptchaos.sector_basis import build_basis, build_split_map, neel_state, popcount


@pytest.mark.parametrize("L,N,dim", [(14, 7, 3432), (12, 6, 924), (2, 1, 2)])
def test_dimensions(L, N, dim):
    assert build_basis(L, N).dim == dim


def test_two_site_states():
    b = build_basis(2, 1)
    assert b.states.tolist() == [0b01, 0b10]


@pytest.mark.parametrize("L,N", [(3, 4), (21, 10), (4, -1)])
def test_invalid_sector(L, N):
    with pytest.raises(ArgumentError):
        build_basis(L, N)


@given(st.integers(1, 12).flatmap(lambda L: st.tuples(st.just(L), st.integers(0, L))))
@settings(max_examples=40, deadline=None)
def test_basis_invariants(LN):
    L, N = LN
    b = build_basis(L, N)
    assert b.dim == comb(L, N)
    assert np.all(np.diff(b.states) > 0)
    assert np.all(popcount(b.states) == N)
    assert all(b.index_of(int(w)) == i for i, w in enumerate(b.states))


def test_split_map_small():
    split = build_split_map(build_basis(4, 2), 2)
    assert [b.shape for b in split.blocks] == [(1, 1), (2, 2), (1, 1)]
    assert split.size == 6
    assert [b.shape for b in build_split_map(build_basis(2, 1), 1).blocks] == [(1, 1), (1, 1)]


def test_split_map_vandermonde():
    split = build_split_map(build_basis(14, 7), 7)
    direct = sum(comb(7, n) ** 2 for n in range(8))
    assert split.size == direct == 3432


@given(st.integers(2, 12).flatmap(
    lambda L: st.tuples(st.just(L), st.integers(0, L), st.integers(1, L - 1))))
@settings(max_examples=40, deadline=None)
def test_split_map_completeness(args):
    L, N, cut = args
    b = build_basis(L, N)
    split = build_split_map(b, cut)
    seen = np.concatenate([blk.flat.ravel() for blk in split.blocks])
    assert sorted(seen.tolist()) == list(range(b.dim))
    for blk in split.blocks:
        assert blk.shape == (comb(cut, blk.n_left), comb(L - cut, N - blk.n_left))
        words = b.states[blk.flat]
        assert np.all(popcount(words & ((1 << cut) - 1)) == blk.n_left)


@pytest.mark.parametrize("cut", [0, 4])
def test_split_map_range(cut):
    with pytest.raises(ArgumentError):
        build_split_map(build_basis(4, 2), cut)


def test_neel():
    b = build_basis(4, 2)
    psi = neel_state(b)
    assert psi[b.index_of(0b1010)] == 1 and np.vdot(psi, psi).real == 1
    b2 = build_basis(2, 1)
    assert neel_state(b2)[b2.index_of(0b10)] == 1  # site 0 empty, site 1 occupied
    with pytest.raises(ArgumentError):
        neel_state(build_basis(4, 1))
