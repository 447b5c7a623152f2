"""Symmetry-restricted pure process tensors and chaos diagnostics for 1D chains."""

__version__ = "0.1.0"

from .errors import (
    ArgumentError,
    ClassificationError,
    ConsistencyError,
    DegenerateEnsembleError,
    ResourceError,
    SectorViolationError,
)
from .sector_basis import SectorBasis, SplitMap, build_basis, build_split_map, neel_state
from .models import ModelSpec, SpectralModel, build_hamiltonian, diagonalize, evolve, preset
from .interventions import InterventionSet, apply_at_site, build_set, delta_n
from .process import (
    ButterflyState,
    ProcessOutputs,
    butterfly_gram,
    butterfly_marginal,
    generate_outputs,
    remainder_state,
)
from .entropy import (
    EntropyValue,
    bipartite_entropy,
    markov_bound,
    mutual_information,
    qde,
    renyi2,
    ste,
)
from .ppe import EntanglementStats, PPEnsemble, build_ensemble, entanglement_stats, kth_moment
