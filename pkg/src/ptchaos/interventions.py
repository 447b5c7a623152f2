"""Local single-site intervention bases and their action on sector vectors.

Local operators are 2x2 matrices in the occupation basis (|0> empty, |1> occupied).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError, ClassificationError, SectorViolationError
from .sector_basis import SectorBasis

INTERVENTION_SITE = 0
KINDS = ("deterministic", "projective")

_NUMBER = np.diag([0.0, 1.0]).astype(complex)
_SZ = np.diag([-1.0, 1.0]).astype(complex)
_P0 = np.diag([1.0, 0.0]).astype(complex)
_P1 = np.diag([0.0, 1.0]).astype(complex)
_C = np.array([[0, 1], [0, 0]], dtype=complex)  # annihilation, |0><1|


@dataclass(frozen=True, eq=False)
class InterventionSet:
    kind: str
    family: str
    ops: tuple = field(repr=False)
    labels: tuple = (0, 1)

    @property
    def r(self) -> int:
        return len(self.ops)

    @property
    def delta_ns(self) -> tuple:
        return tuple(delta_n(op) for op in self.ops)

    @property
    def diagonals(self) -> np.ndarray:
        """(r, 2) diagonal entries; valid because every shipped set is number conserving."""
        return np.array([np.diag(op) for op in self.ops])

    def with_phases(self, phases) -> "InterventionSet":
        ops = tuple(np.exp(1j * p) * op for p, op in zip(phases, self.ops))
        return InterventionSet(self.kind, self.family, ops, self.labels)


def _family_class(family: str) -> str:
    f = family.lower()
    if f in ("spin", "xxz", "xxz_nnn", "iaa"):
        return "spin"
    if f in ("fermion", "free_fermion"):
        return "fermion"
    raise ArgumentError(f"unknown family {family!r}")


def build_set(kind: str, family: str = "spin") -> InterventionSet:
    if kind not in KINDS:
        raise ArgumentError(f"kind must be one of {KINDS}, got {kind!r}")
    fam = _family_class(family)
    s = 1 / np.sqrt(2)
    if fam == "spin":
        ops = (np.eye(2, dtype=complex) * s, _SZ * s) if kind == "deterministic" else (_P0, _P1)
    else:
        cdag = _C.conj().T
        if kind == "deterministic":
            ops = ((cdag @ _C + _C @ cdag) * s, (cdag @ _C - _C @ cdag) * s)
        else:
            ops = (cdag @ _C, _C @ cdag)
    return InterventionSet(kind, fam, ops)


def delta_n(op: np.ndarray, atol: float = 1e-12) -> int:
    """Particle-number change of an eigenoperator of [n, .]."""
    op = np.asarray(op, dtype=complex)
    norm2 = np.vdot(op, op).real
    if norm2 == 0:
        raise ClassificationError("zero operator has no number label")
    comm = _NUMBER @ op - op @ _NUMBER
    value = np.vdot(op, comm).real / norm2
    dn = int(round(value))
    if abs(value - dn) > atol or not np.allclose(comm, dn * op, atol=atol):
        raise ClassificationError(f"operator is not a number eigenoperator (tr A^+[N,A] = {value:.3g})")
    return dn


def check_set(iset: InterventionSet, atol: float = 1e-14) -> None:
    """Raise if completeness or Hilbert-Schmidt orthonormality fails."""
    total = sum(op.conj().T @ op for op in iset.ops)
    if not np.allclose(total, np.eye(2), atol=atol):
        raise ArgumentError("Kraus operators are not complete")
    gram = np.array([[np.trace(a.conj().T @ b) for b in iset.ops] for a in iset.ops])
    if not np.allclose(gram, np.eye(iset.r), atol=atol):
        raise ArgumentError("Kraus operators are not Hilbert-Schmidt orthonormal")


def site_diagonal(op: np.ndarray, basis: SectorBasis, site: int = INTERVENTION_SITE) -> np.ndarray:
    """Per-sector-state multiplier of a number-conserving local operator."""
    if delta_n(op) != 0 or abs(op[0, 1]) > 0 or abs(op[1, 0]) > 0:
        raise SectorViolationError("only number-conserving (diagonal) local operators stay in-sector")
    return np.asarray(op).diagonal()[basis.site_bits(site)]


def apply_at_site(op: np.ndarray, site: int, basis: SectorBasis, v: np.ndarray) -> np.ndarray:
    return site_diagonal(op, basis, site) * v
