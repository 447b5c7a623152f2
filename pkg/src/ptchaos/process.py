"""Conditional output states of the intervened process and its reduced states.

Output rows are ordered lexicographically in the intervention string
(x_1, ..., x_n), x_1 most significant. The interleaved Schroedinger form
A_{x_n} U(dt_n) ... A_{x_1} U(dt_1) |psi> is used; it differs from the
Heisenberg-picture product only by a common trailing unitary, which leaves
every Gram matrix and every remainder-side entropy unchanged.
"""
from __future__ import annotations

import json
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError, ConsistencyError, ResourceError
from .interventions import INTERVENTION_SITE, InterventionSet, site_diagonal
from .models import SpectralModel

MAX_AMPLITUDES = 2**31
MAX_REMAINDER_DIM = 1000
_MAGIC = b"PTOUT001"


@dataclass(frozen=True, eq=False)
class ProcessOutputs:
    outputs: np.ndarray = field(repr=False)  # (r**n_B, dim)
    intervals: np.ndarray
    iset: InterventionSet
    model: SpectralModel | None = field(default=None, repr=False)

    @property
    def n_B(self) -> int:
        return len(self.intervals)

    @property
    def times(self) -> np.ndarray:
        return np.cumsum(self.intervals)

    @property
    def dim(self) -> int:
        return self.outputs.shape[1]

    @property
    def norms2(self) -> np.ndarray:
        return np.einsum("ij,ij->i", self.outputs.conj(), self.outputs).real


@dataclass(frozen=True, eq=False)
class ButterflyState:
    gram: np.ndarray = field(repr=False)
    n_B: int
    r: int = 2

    @property
    def dim(self) -> int:
        return self.gram.shape[0]


def _intervals(n_B, dt) -> np.ndarray:
    if n_B < 1:
        raise ArgumentError("need at least one intervention")
    arr = np.broadcast_to(np.asarray(dt, dtype=float), (n_B,)).copy() if np.ndim(dt) == 0 else np.asarray(dt, float)
    if arr.shape != (n_B,):
        raise ArgumentError(f"expected {n_B} intervals, got {arr.shape}")
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise ArgumentError("intervals must be finite and non-negative")
    return arr


def check_memory(n_B: int, dim: int, r: int = 2) -> int:
    entries = r**n_B * dim
    if entries > MAX_AMPLITUDES:
        raise ResourceError(f"{r}^{n_B} x {dim} = {entries} amplitudes exceeds {MAX_AMPLITUDES}",
                            estimate=entries * 16)
    return entries


def _matmul_rows(X, M, workers):
    if workers <= 1 or X.shape[0] < 2 * workers:
        return X @ M
    chunks = np.array_split(np.arange(X.shape[0]), workers)
    with ThreadPoolExecutor(workers) as pool:
        parts = list(pool.map(lambda c: X[c] @ M, chunks))
    return np.concatenate(parts)


def iter_levels(model: SpectralModel, init: np.ndarray, iset: InterventionSet, n_B: int, dt, workers: int = 1):
    """Yield the outputs of the k-step process for k = 1..n_B.

    Breadth-first prefix tree: each shared prefix is propagated exactly once,
    and every level is one batched matrix product.
    """
    intervals = _intervals(n_B, dt)
    basis = model.basis
    check_memory(n_B, basis.dim, iset.r)
    diags = np.stack([site_diagonal(op, basis, INTERVENTION_SITE) for op in iset.ops])
    cache: dict[float, np.ndarray] = {}
    X = np.asarray(init, dtype=complex)[None, :]
    for k, step in enumerate(intervals, start=1):
        if step not in cache:
            cache[step] = model.propagator(step).T
        X = _matmul_rows(X, cache[step], workers)
        X = (X[:, None, :] * diags[None, :, :]).reshape(-1, basis.dim)
        yield ProcessOutputs(X, intervals[:k].copy(), iset, model)


def generate_outputs(model: SpectralModel, init: np.ndarray, iset: InterventionSet, n_B: int, dt,
                     workers: int = 1) -> ProcessOutputs:
    """All r**n_B conditional output vectors; ``dt`` is a scalar or per-interval sequence."""
    init = np.asarray(init, dtype=complex)
    if abs(np.vdot(init, init).real - 1) > 1e-10:
        raise ArgumentError("initial state must be normalised")
    out = None
    for out in iter_levels(model, init, iset, n_B, dt, workers):
        pass
    return out


def butterfly_gram(outputs: ProcessOutputs) -> ButterflyState:
    X = outputs.outputs
    G = X @ X.conj().T  # G[x, y] = <Y_y | Y_x>
    tr = np.trace(G).real
    if abs(tr - 1) > 1e-8:
        raise ConsistencyError(f"butterfly state trace {tr:.12f} != 1")
    return ButterflyState(G, outputs.n_B, outputs.iset.r)


def remainder_state(outputs: ProcessOutputs) -> np.ndarray:
    if outputs.dim > MAX_REMAINDER_DIM:
        raise ResourceError(f"dense remainder state of dimension {outputs.dim} exceeds {MAX_REMAINDER_DIM}",
                            estimate=outputs.dim**2 * 16)
    X = outputs.outputs
    return X.T @ X.conj()


def butterfly_marginal(bf: ButterflyState, keep) -> ButterflyState:
    """Partial trace over intervention slots not in ``keep`` (0-based slot indices)."""
    keep = sorted(set(int(k) for k in keep))
    n, r = bf.n_B, bf.r
    if not keep or keep[0] < 0 or keep[-1] >= n:
        raise ArgumentError(f"keep must be a nonempty subset of range({n})")
    if len(keep) == n:
        return bf
    t = bf.gram.reshape((r,) * (2 * n))
    drop = [j for j in range(n) if j not in keep]
    # trace the highest slots first so earlier axis numbers stay valid
    for j in reversed(drop):
        m = t.ndim // 2
        t = np.trace(t, axis1=j, axis2=m + j)
    d = r ** len(keep)
    return ButterflyState(t.reshape(d, d), len(keep), r)


def save_outputs(path, outputs: ProcessOutputs, meta: dict | None = None) -> None:
    """Binary dump: magic, u32 header length, JSON header, little-endian complex64 payload."""
    basis = outputs.model.basis if outputs.model is not None else None
    header = {
        "L": basis.L if basis else None,
        "N": basis.N if basis else None,
        "n_B": outputs.n_B,
        "dt": outputs.intervals.tolist(),
        "kind": outputs.iset.kind,
        "family": outputs.iset.family,
        "model_hash": outputs.model.spec.digest() if outputs.model is not None and outputs.model.spec else None,
        "shape": list(outputs.outputs.shape),
    }
    header.update(meta or {})
    raw = json.dumps(header, sort_keys=True).encode()
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<I", len(raw)))
        fh.write(raw)
        fh.write(outputs.outputs.astype("<c8").tobytes())


def load_outputs(path) -> tuple[dict, np.ndarray]:
    with open(path, "rb") as fh:
        if fh.read(len(_MAGIC)) != _MAGIC:
            raise ArgumentError(f"{path} is not a process-output dump")
        (n,) = struct.unpack("<I", fh.read(4))
        header = json.loads(fh.read(n))
        data = np.frombuffer(fh.read(), dtype="<c8").reshape(header["shape"])
    return header, data
