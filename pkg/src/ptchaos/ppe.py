"""Projected process ensemble: normalised output states weighted by their probabilities."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .entropy import bipartite_entropies
from .errors import ArgumentError, ConsistencyError, DegenerateEnsembleError, ResourceError
from .process import ProcessOutputs
from .sector_basis import SplitMap

P_CUTOFF = 1e-12
DEFAULT_BINS = 50
MAX_MOMENT_ENTRIES = 2**24
_CHUNK = 4096


@dataclass(frozen=True, eq=False)
class PPEnsemble:
    probs: np.ndarray
    states: np.ndarray = field(repr=False)  # unit-norm rows
    strings: np.ndarray  # lexicographic index of each surviving intervention string
    kind: str

    def __len__(self):
        return self.probs.size


@dataclass(frozen=True)
class EntanglementStats:
    mean: float
    std: float
    edges: np.ndarray = field(repr=False)
    density: np.ndarray = field(repr=False)
    sample_count: int

    @property
    def cv(self) -> float:
        return self.std / self.mean if self.mean > 0 else float("nan")


def build_ensemble(outputs: ProcessOutputs) -> PPEnsemble:
    p = outputs.norms2
    keep = np.flatnonzero(p >= P_CUTOFF)
    if keep.size == 0:
        raise DegenerateEnsembleError("every trajectory has probability below cutoff")
    total = p.sum()
    if abs(total - 1) > 1e-10:
        raise ConsistencyError(f"trajectory probabilities sum to {total:.12f}")
    states = outputs.outputs[keep] / np.sqrt(p[keep])[:, None]
    return PPEnsemble(p[keep], states, keep, outputs.iset.kind)


def trajectory_entropies(ens: PPEnsemble, split: SplitMap) -> np.ndarray:
    out = np.empty(len(ens))
    for start in range(0, len(ens), _CHUNK):
        out[start:start + _CHUNK] = bipartite_entropies(ens.states[start:start + _CHUNK], split)
    return out


def weighted_stats(S: np.ndarray, w: np.ndarray | None = None, bins: int = DEFAULT_BINS) -> EntanglementStats:
    if bins < 1:
        raise ArgumentError("bins must be >= 1")
    S = np.asarray(S, dtype=float)
    w = np.full(S.size, 1.0 / S.size) if w is None else np.asarray(w, dtype=float) / np.sum(w)
    mean = float(np.dot(w, S))
    std = float(np.sqrt(max(np.dot(w, (S - mean) ** 2), 0.0)))
    hi = S.max() + 1e-9 * max(1.0, S.max())
    density, edges = np.histogram(S, bins=bins, range=(0.0, hi), weights=w, density=True)
    return EntanglementStats(mean, std, edges, density, int(S.size))


def entanglement_stats(ens: PPEnsemble, split: SplitMap, bins: int = DEFAULT_BINS) -> EntanglementStats:
    """p-weighted mean, standard deviation and density histogram of per-trajectory entanglement."""
    return weighted_stats(trajectory_entropies(ens, split), ens.probs, bins)


def kth_moment(ens: PPEnsemble, k: int) -> np.ndarray:
    """sum_x p_x (|psi_x><psi_x|)^{(x) k} as a dense (dim^k, dim^k) matrix."""
    dim = ens.states.shape[1]
    if k < 1:
        raise ArgumentError("k must be >= 1")
    if dim ** (2 * k) > MAX_MOMENT_ENTRIES:
        raise ResourceError(f"moment operator with {dim ** (2 * k)} entries exceeds {MAX_MOMENT_ENTRIES}",
                            estimate=dim ** (2 * k) * 16)
    psi = ens.states
    for _ in range(k - 1):
        psi = np.einsum("mi,mj->mij", psi, ens.states).reshape(len(ens), -1)
    return (psi.T * ens.probs) @ psi.conj()
