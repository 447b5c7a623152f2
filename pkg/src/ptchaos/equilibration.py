"""Infinite-time-averaged process, effective dimension, and equilibration bounds."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .entropy import renyi2
from .errors import ArgumentError, ResourceError
from .interventions import INTERVENTION_SITE, InterventionSet, site_diagonal
from .models import SpectralModel
from .process import ButterflyState, butterfly_gram, generate_outputs

MAX_DIM = 100


def _block_mask(model: SpectralModel) -> np.ndarray:
    lab = model.degeneracy_labels
    return lab[:, None] == lab[None, :]


def dephase(rho: np.ndarray, model: SpectralModel) -> np.ndarray:
    """Keep only matrix elements inside energy degeneracy blocks."""
    V = model.eigenvectors
    r = V.conj().T @ rho @ V
    return V @ (r * _block_mask(model)) @ V.conj().T


def effective_dimension(init: np.ndarray, model: SpectralModel) -> float:
    c = model.eigenvectors.conj().T @ np.asarray(init)
    weights = np.bincount(model.degeneracy_labels, weights=np.abs(c) ** 2)
    return float(1.0 / np.sum(weights**2))


@dataclass(frozen=True, eq=False)
class EquilibriumProcess:
    omega: ButterflyState
    n_blocks: int
    model: SpectralModel = field(repr=False)


def equilibrium_process(model: SpectralModel, init: np.ndarray, iset: InterventionSet,
                        n_B: int) -> EquilibriumProcess:
    """Omega_B[x, y] = tr[A_xn $(... $(A_x1 $(psi psi^+) A_y1^+) ...) A_yn^+].

    Works in the energy eigenbasis where the dephasing map is a mask; the
    diagonal interventions become dense operators there.
    """
    dim = model.dim
    if dim > MAX_DIM:
        raise ResourceError(f"equilibrium recursion limited to dim <= {MAX_DIM}, got {dim}", estimate=dim)
    V = model.eigenvectors
    mask = _block_mask(model)
    A = [V.conj().T @ (site_diagonal(op, model.basis, INTERVENTION_SITE)[:, None] * V) for op in iset.ops]
    c = V.conj().T @ np.asarray(init)
    rhos = (np.outer(c, c.conj()) * mask)[None]  # pairs in lexicographic (x, y) order
    r = iset.r
    for step in range(n_B):
        m = int(round(np.sqrt(rhos.shape[0])))
        rhos = rhos.reshape(m, m, dim, dim)
        new = np.empty((m, r, m, r, dim, dim), dtype=complex)
        for a in range(r):
            for b in range(r):
                new[:, a, :, b] = A[a] @ rhos @ A[b].conj().T
        rhos = new.reshape(-1, dim, dim)
        if step < n_B - 1:
            rhos = rhos * mask
    d = r**n_B
    omega = np.trace(rhos, axis1=1, axis2=2).reshape(d, d)
    return EquilibriumProcess(ButterflyState(omega, n_B, r), int(model.degeneracy_labels[-1]) + 1, model)


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    return 0.5 * float(np.abs(np.linalg.eigvalsh(rho - sigma)).sum())


def distance_bound(M_B: float, d_S: int, n_B: int, d_eff: float) -> float:
    return 0.5 * M_B * d_S**n_B * np.sqrt((2.0**n_B - 1) / d_eff)


def entropy_equilibration_bound(mean_D: float, d_S: int, n_B: int) -> float:
    d = d_S**n_B
    if d < 2:
        raise ArgumentError("need d_S^n_B >= 2")
    return 2 * mean_D - (d - 2) / (d - 1) * mean_D**2


def markov_probability_bound(d_eff: float, M_B: float, d_S: int, n_B: int, mean_D: float):
    """Return (threshold a, probability cap) for P(|dS| >= a)."""
    if d_eff <= 0:
        raise ArgumentError("d_eff must be positive")
    d = d_S**n_B
    a = d_eff**-0.25 * (2 - (d - 2) / (d - 1) * mean_D)
    cap = M_B * d * np.sqrt(2.0**n_B - 1) / (2 * d_eff**0.25)
    return a, cap


@dataclass
class EquilibrationReport:
    d_eff: float
    omega: ButterflyState = field(repr=False)
    distances: np.ndarray = field(repr=False)
    entropy_gaps: np.ndarray = field(repr=False)
    mean_gram: np.ndarray = field(repr=False)
    distance_bound: float = 0.0
    entropy_bound: float = 0.0
    threshold: float = 0.0
    probability_cap: float = 0.0

    @property
    def mean_D(self) -> float:
        return float(self.distances.mean())

    @property
    def mean_gap(self) -> float:
        return float(self.entropy_gaps.mean())

    @property
    def exceedance(self) -> float:
        return float(np.mean(self.entropy_gaps >= self.threshold))

    @property
    def omega_error(self) -> float:
        return float(np.linalg.norm(self.mean_gram - self.omega.gram))


def sample_intervals(n_B: int, samples: int, t_max: float, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.uniform(0.0, t_max, size=(samples, n_B))


def equilibration_report(model: SpectralModel, init: np.ndarray, iset: InterventionSet, n_B: int,
                         samples: int = 500, t_max: float = 1e4, seed: int = 0,
                         workers: int = 1) -> EquilibrationReport:
    """Compare sampled-time processes with the equilibrium process and evaluate all three bounds."""
    eq = equilibrium_process(model, init, iset, n_B)
    s_omega = float(renyi2(eq.omega.gram))
    d_eff = effective_dimension(init, model)
    intervals = sample_intervals(n_B, samples, t_max, seed)

    def one(dts):
        G = butterfly_gram(generate_outputs(model, init, iset, n_B, dts)).gram
        return G, trace_distance(G, eq.omega.gram), abs(float(renyi2(G)) - s_omega)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            res = list(pool.map(one, intervals))
    else:
        res = [one(dts) for dts in intervals]
    grams = np.stack([g for g, _, _ in res])
    D = np.array([d for _, d, _ in res])
    gaps = np.array([s for _, _, s in res])
    M_B = iset.r**n_B
    d_S = 2
    a, cap = markov_probability_bound(d_eff, M_B, d_S, n_B, D.mean())
    return EquilibrationReport(
        d_eff=d_eff, omega=eq.omega, distances=D, entropy_gaps=gaps, mean_gram=grams.mean(axis=0),
        distance_bound=distance_bound(M_B, d_S, n_B, d_eff),
        entropy_bound=entropy_equilibration_bound(D.mean(), d_S, n_B),
        threshold=a, probability_cap=cap,
    )
