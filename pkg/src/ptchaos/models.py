"""Dense sector Hamiltonians for the four chain families, and their propagators.

Conventions: periodic boundary, hbar = 1, sigma^z |n> = (2n - 1) |n>, so the
flip-flop part of sigma^x sigma^x + sigma^y sigma^y has amplitude 2.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from functools import cached_property

import numpy as np

from .errors import ArgumentError, ConsistencyError, ResourceError
from .sector_basis import SectorBasis, popcount

FAMILIES = ("XXZ", "XXZ_NNN", "IAA", "FREE_FERMION")
GOLDEN_Q = 2.0 / (np.sqrt(5.0) + 1.0)
MAX_DENSE_DIM = 4000
DEGENERACY_RTOL = 1e-10


@dataclass(frozen=True)
class ModelSpec:
    family: str
    J: float = 1.0
    Delta: float = 0.55
    h: float = 0.0
    g: float = 0.0
    lam: float = 0.0
    q: float = GOLDEN_Q

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ArgumentError(f"unknown model family {self.family!r}; expected one of {FAMILIES}")

    @property
    def is_fermionic(self) -> bool:
        return self.family == "FREE_FERMION"

    def to_dict(self) -> dict:
        return asdict(self)

    def digest(self) -> str:
        return hashlib.sha256(json.dumps(self.to_dict(), sort_keys=True).encode()).hexdigest()[:16]


PRESETS = {
    "xxz": ModelSpec("XXZ", J=1.0, Delta=0.55),
    "xxz-nnn": ModelSpec("XXZ_NNN", J=1.0, Delta=0.55, h=0.6, g=0.1),
    "iaa-chaotic": ModelSpec("IAA", J=1.0, Delta=-1.0, lam=1.0),
    "iaa-mbl": ModelSpec("IAA", J=1.0, Delta=-1.0, lam=5.0),
    "free-fermion": ModelSpec("FREE_FERMION", J=1.0),
}


def preset(name: str) -> ModelSpec:
    try:
        return PRESETS[name]
    except KeyError:
        raise ArgumentError(f"unknown model preset {name!r}; choose from {sorted(PRESETS)}") from None


def _zz_diagonal(basis: SectorBasis, distance: int) -> np.ndarray:
    z = 2.0 * basis._bits - 1.0
    return sum(z[i] * z[(i + distance) % basis.L] for i in range(basis.L))


def _add_hopping(H, basis, amplitude, fermionic):
    """Add amplitude * (b_i^+ b_j + h.c.) for every periodic bond (i, i+1)."""
    L, states = basis.L, basis.states
    for i in range(L):
        j = (i + 1) % L
        bi, bj = basis._bits[i], basis._bits[j]
        src = np.flatnonzero(bi != bj)
        if src.size == 0:
            continue
        dst = basis.indices_of(states[src] ^ ((1 << i) | (1 << j)))
        amp = np.full(src.size, amplitude, dtype=float)
        if fermionic:
            lo, hi = min(i, j), max(i, j)
            between = ((1 << hi) - 1) ^ ((1 << (lo + 1)) - 1)
            amp *= 1 - 2 * (popcount(states[src] & between) % 2)
        np.add.at(H, (dst, src), amp)


def build_hamiltonian(spec: ModelSpec, basis: SectorBasis) -> np.ndarray:
    if basis.dim > MAX_DENSE_DIM:
        raise ResourceError(f"sector dimension {basis.dim} exceeds dense limit {MAX_DENSE_DIM}",
                            estimate=basis.dim)
    H = np.zeros((basis.dim, basis.dim))
    if spec.family == "FREE_FERMION":
        _add_hopping(H, basis, spec.J, fermionic=True)
        return H

    sign = -1.0 if spec.family == "IAA" else 1.0
    _add_hopping(H, basis, sign * 2.0 * spec.J, fermionic=False)
    diag = sign * spec.J * spec.Delta * _zz_diagonal(basis, 1)
    z = 2.0 * basis._bits - 1.0
    if spec.family == "XXZ_NNN":
        diag = diag + spec.h * _zz_diagonal(basis, 2) + spec.g * z[0]
    elif spec.family == "IAA":
        # potential index runs 1..L
        pot = 2.0 * spec.lam * np.cos(2.0 * np.pi * spec.q * np.arange(1, basis.L + 1))
        diag = diag + pot @ z
    H[np.diag_indices_from(H)] += diag
    return H


@dataclass(frozen=True, eq=False)
class SpectralModel:
    eigenvalues: np.ndarray = field(repr=False)
    eigenvectors: np.ndarray = field(repr=False)
    basis: SectorBasis
    spec: ModelSpec | None = None

    @property
    def dim(self) -> int:
        return self.eigenvalues.size

    @cached_property
    def degeneracy_labels(self) -> np.ndarray:
        """Integer block label per eigenvalue; consecutive levels within tolerance share one."""
        E = self.eigenvalues
        tol = DEGENERACY_RTOL * max(np.abs(E).max(), 1.0) if E.size else 0.0
        return np.concatenate([[0], np.cumsum(np.diff(E) > tol)]).astype(np.int64)

    def propagator(self, t: float) -> np.ndarray:
        """Dense exp(-iHt) in the sector basis."""
        if t == 0:
            return np.eye(self.dim, dtype=complex)
        V = self.eigenvectors
        return (V * np.exp(-1j * self.eigenvalues * t)) @ V.conj().T

    def hamiltonian(self) -> np.ndarray:
        V = self.eigenvectors
        return (V * self.eigenvalues) @ V.conj().T


def diagonalize(H: np.ndarray, basis: SectorBasis | None = None, spec: ModelSpec | None = None) -> SpectralModel:
    if H.shape[0] > MAX_DENSE_DIM:
        raise ResourceError(f"matrix dimension {H.shape[0]} exceeds dense limit {MAX_DENSE_DIM}",
                            estimate=H.shape[0])
    try:
        E, V = np.linalg.eigh(H)
    except np.linalg.LinAlgError as exc:
        raise ConsistencyError(f"eigensolver did not converge: {exc}") from exc
    scale = max(np.linalg.norm(H, 2) if H.size else 0.0, 1.0)
    residual = np.linalg.norm(H @ V - V * E) / np.sqrt(max(H.shape[0], 1))
    if residual > 1e-10 * scale:
        raise ConsistencyError(f"eigen-decomposition residual {residual:.3e} too large")
    V = V.astype(complex)
    return SpectralModel(E, V, basis, spec)


def build_model(spec: ModelSpec, basis: SectorBasis) -> SpectralModel:
    return diagonalize(build_hamiltonian(spec, basis), basis, spec)


def evolve(model: SpectralModel, v: np.ndarray, t: float) -> np.ndarray:
    """exp(-iHt) v via the eigenbasis. ``v`` may hold several vectors as rows."""
    if t == 0:
        return np.array(v, dtype=complex)
    V = model.eigenvectors
    phase = np.exp(-1j * model.eigenvalues * t)
    return ((v @ V.conj()) * phase) @ V.T
