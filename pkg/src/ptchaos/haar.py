"""Haar benchmarks: closed-form reference lines and Monte-Carlo reference ensembles."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations
from math import log

import numpy as np

from .entropy import bipartite_entropies
from .errors import ArgumentError, ResourceError
from .interventions import INTERVENTION_SITE, InterventionSet, site_diagonal
from .ppe import DEFAULT_BINS, EntanglementStats, weighted_stats
from .sector_basis import SectorBasis, build_split_map

DEFAULT_SAMPLES = 2**14
CHUNK = 1024
MAX_MOMENT_ENTRIES = 2**24


@dataclass(frozen=True)
class HaarReference:
    kind: str  # QDE_LINE | STE_LINE | STATE_SAMPLES
    params: dict
    value: float | None = None
    stats: EntanglementStats | None = field(default=None, repr=False)
    valid: bool = True


def haar_qde(n_B: int, d_S: int = 2) -> float:
    return n_B * log(d_S)


def haar_ste(n_B: int, d_S: int, d_R1: int) -> float:
    return n_B * log(d_S) + log(d_R1)


def qde_reference(n_B: int, d_S: int, d_R: int) -> HaarReference:
    """Haar QDE line; flagged invalid once n_B log d_S reaches log d_R."""
    value = haar_qde(n_B, d_S)
    return HaarReference("QDE_LINE", {"n_B": n_B, "d_S": d_S, "d_R": d_R}, value,
                         valid=value < log(d_R))


def ste_regime_violated(L: int, L_R1: int, n_B: int, d_S: int = 2) -> bool:
    """True when d_R2 <= d_B d_R1, outside the regime the STE estimate assumes."""
    return 2 ** (L - L_R1) <= d_S**n_B * 2**L_R1


def ste_reference(L: int, L_R1: int, n_B: int, d_S: int = 2) -> HaarReference:
    return HaarReference("STE_LINE", {"L": L, "L_R1": L_R1, "n_B": n_B, "d_S": d_S},
                         haar_ste(n_B, d_S, 2**L_R1), valid=not ste_regime_violated(L, L_R1, n_B, d_S))


def _chunk_rng(seed: int, j: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(j,)))


def haar_state_chunks(dim: int, count: int, seed: int, chunk: int = CHUNK):
    """Yield unit-norm complex Gaussian rows; chunk j draws from its own seeded stream."""
    for j, start in enumerate(range(0, count, chunk)):
        m = min(chunk, count - start)
        rng = _chunk_rng(seed, j)
        z = rng.standard_normal((m, dim)) + 1j * rng.standard_normal((m, dim))
        yield z / np.linalg.norm(z, axis=1, keepdims=True)


def sample_haar_states(basis: SectorBasis, cut: int, count: int = DEFAULT_SAMPLES, seed: int = 0,
                       bins: int = DEFAULT_BINS) -> EntanglementStats:
    if count < 100:
        raise ArgumentError("need at least 100 samples")
    split = build_split_map(basis, cut)
    S = np.concatenate([bipartite_entropies(z, split) for z in haar_state_chunks(basis.dim, count, seed)])
    return weighted_stats(S, None, bins)


def average_state_purity(dim: int, count: int, seed: int = 0) -> float:
    """tr(rho_bar^2) for rho_bar the empirical mean of ``count`` Haar states."""
    rho = np.zeros((dim, dim), dtype=complex)
    for z in haar_state_chunks(dim, count, seed):
        rho += z.T @ z.conj()
    rho /= count
    return float(np.vdot(rho, rho).real)


def expected_average_state_purity(dim: int, count: int) -> float:
    return 1.0 / count + (1.0 - 1.0 / count) / dim


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """QR of a Ginibre matrix with the R-diagonal phases absorbed."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * ph


@dataclass(frozen=True, eq=False)
class FactorizedOperator:
    remainder: np.ndarray = field(repr=False)
    butterfly: np.ndarray = field(repr=False)

    def dense(self) -> np.ndarray:
        return np.kron(self.remainder, self.butterfly)

    @property
    def trace(self) -> float:
        return float(np.trace(self.remainder).real * np.trace(self.butterfly).real)


def haar_average_process(d_R: int, d_S: int, n_B: int) -> FactorizedOperator:
    d_B = d_S**n_B
    if d_R * d_B > 2**12:
        raise ResourceError(f"dense factor dimension {d_R * d_B} too large", estimate=(d_R * d_B) ** 2 * 16)
    return FactorizedOperator(np.eye(d_R) / d_R, np.eye(d_B) / d_B)


def _haar_outputs(diags, init, n_B, rng):
    dim = init.size
    X = init[None, :]
    for _ in range(n_B):
        U = haar_unitary(dim, rng)
        X = ((X @ U.T)[:, None, :] * diags[None]).reshape(-1, dim)
    return X


def haar_process_average(basis: SectorBasis, iset: InterventionSet, n_B: int, samples: int, seed: int = 0,
                         init: np.ndarray | None = None) -> np.ndarray:
    """Mean butterfly state over runs with an independent Haar unitary before each intervention."""
    diags = np.stack([site_diagonal(op, basis, INTERVENTION_SITE) for op in iset.ops])
    if init is None:
        init = np.zeros(basis.dim, dtype=complex)
        init[0] = 1.0
    acc = np.zeros((iset.r**n_B,) * 2, dtype=complex)
    for j in range(samples):
        X = _haar_outputs(diags, init, n_B, _chunk_rng(seed, j))
        acc += X @ X.conj().T
    return acc / samples


def _permutation_operator(d: int, perm) -> np.ndarray:
    k = len(perm)
    eye = np.eye(d**k).reshape((d,) * (2 * k))
    # output tensor factor i carries input factor perm^{-1}(i)
    inv = np.argsort(perm)
    return eye.transpose(list(inv) + list(range(k, 2 * k))).reshape(d**k, d**k)


def symmetric_moment(d_R: int, k: int) -> np.ndarray:
    """Normalised projector-sum over S_k: the k-th moment of Haar-random states."""
    if k < 1 or k > 3:
        raise ArgumentError("k must be 1, 2 or 3")
    if d_R ** (2 * k) > MAX_MOMENT_ENTRIES:
        raise ResourceError(f"moment operator with {d_R ** (2 * k)} entries too large",
                            estimate=d_R ** (2 * k) * 16)
    total = sum(_permutation_operator(d_R, p) for p in permutations(range(k)))
    norm = np.prod([d_R + i for i in range(k)], dtype=float)
    return total / norm


def haar_ppe_moment(basis: SectorBasis, iset: InterventionSet, n_B: int, k: int, samples: int,
                    seed: int = 0) -> np.ndarray:
    """Monte-Carlo k-th PPE moment with independent Haar unitaries between interventions."""
    dim = basis.dim
    if dim ** (2 * k) > MAX_MOMENT_ENTRIES:
        raise ResourceError("moment operator too large", estimate=dim ** (2 * k) * 16)
    diags = np.stack([site_diagonal(op, basis, INTERVENTION_SITE) for op in iset.ops])
    init = np.zeros(dim, dtype=complex)
    init[0] = 1.0
    acc = np.zeros((dim**k, dim**k), dtype=complex)
    for j in range(samples):
        rng = _chunk_rng(seed, j)
        X = _haar_outputs(diags, init, n_B, rng)
        X = X @ haar_unitary(dim, rng).T
        p = np.einsum("ij,ij->i", X.conj(), X).real
        keep = p > 1e-12
        psi = X[keep] / np.sqrt(p[keep])[:, None]
        tens = psi
        for _ in range(k - 1):
            tens = np.einsum("mi,mj->mij", tens, psi).reshape(psi.shape[0], -1)
        acc += (tens.T * p[keep]) @ tens.conj()
    return acc / samples
