"""Fixed particle-number sector of an L-site chain of two-level sites.

Site ``i`` is bit ``i`` of an occupation word (site 0 is the least significant
bit). A set bit means the site is occupied.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from math import comb

import numpy as np

from .errors import ArgumentError

MAX_SITES = 20


def popcount(words: np.ndarray) -> np.ndarray:
    words = np.asarray(words, dtype=np.int64)
    count = np.zeros(words.shape, dtype=np.int64)
    w = words.copy()
    while np.any(w):
        count += w & 1
        w >>= 1
    return count


def _words_with_popcount(n_sites: int, n: int) -> np.ndarray:
    if n < 0 or n > n_sites:
        return np.zeros(0, dtype=np.int64)
    words = [sum(1 << i for i in c) for c in combinations(range(n_sites), n)]
    return np.sort(np.asarray(words, dtype=np.int64))


@dataclass(frozen=True, eq=False)
class SectorBasis:
    """Ascending occupation words of the (L, N) sector."""

    L: int
    N: int
    states: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return int(self.states.size)

    def index_of(self, word: int) -> int:
        i = int(np.searchsorted(self.states, word))
        if i >= self.dim or self.states[i] != word:
            raise KeyError(f"word {word:#b} not in sector (L={self.L}, N={self.N})")
        return i

    def indices_of(self, words: np.ndarray) -> np.ndarray:
        """Vectorised ``index_of``; every word must belong to the sector."""
        idx = np.searchsorted(self.states, words)
        if np.any(idx >= self.dim) or np.any(self.states[np.minimum(idx, self.dim - 1)] != words):
            raise KeyError("some words are outside the sector")
        return idx

    def site_bits(self, site: int) -> np.ndarray:
        return self._bits[site]

    @cached_property
    def _bits(self) -> np.ndarray:
        return np.stack([(self.states >> i) & 1 for i in range(self.L)]).astype(np.int8)

    def __hash__(self):
        return hash((self.L, self.N))

    def __eq__(self, other):
        return isinstance(other, SectorBasis) and (self.L, self.N) == (other.L, other.N)


@dataclass(frozen=True, eq=False)
class Block:
    """States whose first ``cut`` sites hold ``n_left`` particles.

    ``flat[a, b]`` is the sector index of the state built from the a-th R1
    configuration (ascending) and the b-th R2 configuration (ascending).
    """

    n_left: int
    flat: np.ndarray = field(repr=False)

    @property
    def shape(self) -> tuple[int, int]:
        return self.flat.shape


@dataclass(frozen=True, eq=False)
class SplitMap:
    """Block decomposition of the sector across R1 = sites [0, cut), R2 = the rest."""

    basis: SectorBasis
    cut: int
    blocks: tuple[Block, ...]

    @property
    def size(self) -> int:
        return sum(b.flat.size for b in self.blocks)


def build_basis(L: int, N: int) -> SectorBasis:
    if not (0 <= N <= L <= MAX_SITES) or L < 1:
        raise ArgumentError(f"need 0 <= N <= L <= {MAX_SITES}, got L={L}, N={N}")
    states = _words_with_popcount(L, N)
    assert states.size == comb(L, N)
    return SectorBasis(L, N, states)


def build_split_map(basis: SectorBasis, cut: int) -> SplitMap:
    L, N = basis.L, basis.N
    if not 1 <= cut <= L - 1:
        raise ArgumentError(f"cut must lie in [1, {L - 1}], got {cut}")
    left = basis.states & ((1 << cut) - 1)
    right = basis.states >> cut
    n_left = popcount(left)
    blocks = []
    for n in range(max(0, N - (L - cut)), min(cut, N) + 1):
        lwords = _words_with_popcount(cut, n)
        rwords = _words_with_popcount(L - cut, N - n)
        sel = np.flatnonzero(n_left == n)
        flat = np.empty((lwords.size, rwords.size), dtype=np.int64)
        flat[np.searchsorted(lwords, left[sel]), np.searchsorted(rwords, right[sel])] = sel
        blocks.append(Block(n, flat))
    split = SplitMap(basis, cut, tuple(blocks))
    assert split.size == basis.dim
    return split


def neel_state(basis: SectorBasis) -> np.ndarray:
    """Alternating occupation 0101... on sites 0, 1, 2, ... (odd sites occupied)."""
    if basis.L % 2 or 2 * basis.N != basis.L:
        raise ArgumentError("Neel state needs even L at half filling")
    word = sum(1 << i for i in range(1, basis.L, 2))
    psi = np.zeros(basis.dim, dtype=complex)
    psi[basis.index_of(word)] = 1.0
    return psi
