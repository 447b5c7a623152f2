"""Renyi-2 entropies of the process tensor and of its output states (natural log)."""
from __future__ import annotations

import logging

import numpy as np

from .errors import ArgumentError, ConsistencyError
from .process import ButterflyState, ProcessOutputs, butterfly_marginal
from .sector_basis import SplitMap

log = logging.getLogger(__name__)

TRACE_TOL = 1e-8
MI_FLOOR = -1e-9


class EntropyValue(float):
    """A float in nats tagged with the diagnostic it came from."""

    def __new__(cls, value, kind):
        obj = super().__new__(cls, value)
        obj.kind = kind
        return obj

    @property
    def bits(self) -> float:
        return float(self) / np.log(2)

    def __repr__(self):
        return f"EntropyValue({float(self)!r}, kind={self.kind!r})"


def _from_purity(purity: float, trace: float, kind: str) -> EntropyValue:
    if abs(trace - 1) > TRACE_TOL:
        raise ConsistencyError(f"{kind}: trace {trace:.12f} deviates from 1")
    if purity <= 0:
        raise ConsistencyError(f"{kind}: non-positive purity {purity}")
    return EntropyValue(max(-np.log(purity), 0.0), kind)


def purity(rho: np.ndarray) -> float:
    # tr(rho^2) = ||rho||_F^2 for Hermitian rho
    return float(np.vdot(rho, rho).real)


def renyi2(rho: np.ndarray, kind: str = "RENYI2") -> EntropyValue:
    rho = np.asarray(rho)
    return _from_purity(purity(rho), np.trace(rho).real, kind)


def outputs_purity(X: np.ndarray) -> float:
    """tr(Y_B^2) = tr(Y_R^2), via whichever Gram side is smaller."""
    M = X @ X.conj().T if X.shape[0] <= X.shape[1] else X.T @ X.conj()
    return purity(M)


def qde(state) -> EntropyValue:
    """Entanglement across B:R. Accepts a ButterflyState or ProcessOutputs."""
    if isinstance(state, ButterflyState):
        return renyi2(state.gram, "QDE")
    if isinstance(state, ProcessOutputs):
        X = state.outputs
        return _from_purity(outputs_purity(X), np.vdot(X, X).real, "QDE")
    raise TypeError(f"cannot compute QDE of {type(state).__name__}")


def _block_gram(X: np.ndarray, block) -> np.ndarray:
    """sum over rows x and R1 configs a of conj(M_x[a, b]) M_x[a, b']."""
    rows, cols = block.shape
    Y = X[:, block.flat.ravel()].reshape(-1, cols)
    return Y.conj().T @ Y


def ste(outputs: ProcessOutputs, split: SplitMap) -> EntropyValue:
    """Entanglement across BR1:R2, computed as the Renyi-2 entropy of the R2 marginal."""
    X = outputs.outputs
    pur = tr = 0.0
    for block in split.blocks:
        g = _block_gram(X, block)
        pur += purity(g)
        tr += np.trace(g).real
    return _from_purity(pur, tr, "STE")


def reduced_r2(v: np.ndarray, split: SplitMap) -> list[np.ndarray]:
    """Diagonal blocks of tr_R1 |v><v|, one per R2 particle number (conjugated layout)."""
    return [_block_gram(np.asarray(v)[None, :], b) for b in split.blocks]


def bipartite_entropy(v: np.ndarray, split: SplitMap) -> EntropyValue:
    v = np.asarray(v)
    nrm = np.vdot(v, v).real
    if abs(nrm - 1) > 1e-10:
        raise ArgumentError(f"state norm^2 {nrm:.12f} != 1")
    pur = sum(purity(g) for g in reduced_r2(v, split))
    return _from_purity(pur, nrm, "BIPARTITE")


def bipartite_entropies(states: np.ndarray, split: SplitMap) -> np.ndarray:
    """Vectorised per-row Renyi-2 entanglement across R1:R2 for normalised rows."""
    states = np.atleast_2d(states)
    pur = np.zeros(states.shape[0])
    for block in split.blocks:
        rows, cols = block.shape
        M = states[:, block.flat]  # (m, rows, cols)
        small = M @ M.conj().transpose(0, 2, 1) if rows <= cols else M.conj().transpose(0, 2, 1) @ M
        pur += np.einsum("mij,mij->m", small.conj(), small).real
    return np.maximum(-np.log(pur), 0.0)


def mutual_information(bf: ButterflyState, n_B1: int) -> EntropyValue:
    """I(B1:B2) with B1 the first ``n_B1`` slots."""
    n = bf.n_B
    if not 1 <= n_B1 < n:
        raise ArgumentError(f"need 1 <= n_B1 < n_B = {n}")
    s = float(qde(bf))
    s1 = float(qde(butterfly_marginal(bf, range(n_B1))))
    s2 = float(qde(butterfly_marginal(bf, range(n_B1, n))))
    value = s1 + s2 - s
    if value < MI_FLOOR:
        log.warning("negative Renyi-2 mutual information %.3e (n_B=%d, n_B1=%d)", value, n, n_B1)
    elif value < 0:
        value = 0.0
    return EntropyValue(value, "MI")


def markov_bound(qde_full: float, qde_B1: float, n_B: int, n_B1: int, n_B2: int, d_S: int = 2) -> EntropyValue:
    """Upper bound on I(B1:B2) from the QDE growth rate between n_B1 and n_B steps."""
    if n_B != n_B1 + n_B2 or n_B2 < 1:
        raise ArgumentError("need n_B = n_B1 + n_B2 with n_B2 >= 1")
    rate = (qde_full - qde_B1) / (n_B - n_B1)
    return EntropyValue(n_B2 * (np.log(d_S) - rate), "MI_BOUND")
