import numpy as np
import pytest

from conftest import cached_basis, cached_model
from ptchaos.equilibration import (
    dephase,
    distance_bound,
    effective_dimension,
    entropy_equilibration_bound,
    equilibration_report,
    equilibrium_process,
    markov_probability_bound,
    sample_intervals,
    trace_distance,
)
from ptchaos.errors import ArgumentError, ResourceError
from ptchaos.interventions import build_set
from ptchaos.models import diagonalize
from ptchaos.process import butterfly_gram, generate_outputs
from ptchaos.sector_basis import neel_state

DET = build_set("deterministic", "spin")


def _rho(dim, seed):
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    r = z @ z.conj().T
    return r / np.trace(r)


@pytest.mark.parametrize("name", ["xxz", "xxz-nnn", "free-fermion"])
def test_dephase_properties(name):
    m = cached_model(name, 6)
    rho = _rho(m.dim, 0)
    d = dephase(rho, m)
    assert abs(np.trace(d) - 1) < 1e-12
    assert np.abs(dephase(d, m) - d).max() < 1e-12
    assert np.linalg.eigvalsh(d).min() > -1e-12
    V = m.eigenvectors
    diag = V @ np.diag(np.linspace(0, 1, m.dim)) @ V.conj().T
    assert np.abs(dephase(diag, m) - diag).max() < 1e-12


def test_effective_dimension_examples():
    m = cached_model("xxz-nnn", 6)
    V = m.eigenvectors
    assert effective_dimension(V[:, 3], m) == pytest.approx(1)
    v = V[:, [1, 5, 9, 12]].sum(axis=1) / 2
    assert effective_dimension(v, m) == pytest.approx(4)


def test_effective_dimension_ordering():
    chaotic, mbl = cached_model("xxz-nnn", 8), cached_model("iaa-mbl", 8)
    psi = neel_state(cached_basis(8))
    d_c, d_m = effective_dimension(psi, chaotic), effective_dimension(psi, mbl)
    assert d_c > 3 * d_m
    assert d_c == pytest.approx(D_EFF_XXZ_NNN_L8, rel=1e-9)
    assert d_m == pytest.approx(D_EFF_IAA_MBL_L8, rel=1e-9)


@pytest.mark.parametrize("name", ["xxz", "xxz-nnn"])
@pytest.mark.parametrize("kind", ["deterministic", "projective"])
def test_omega_is_a_state(name, kind):
    m = cached_model(name, 6)
    eq = equilibrium_process(m, neel_state(m.basis), build_set(kind, "spin"), 3)
    G = eq.omega.gram
    assert abs(np.trace(G) - 1) < 1e-12
    assert np.abs(G - G.conj().T).max() < 1e-12
    assert np.linalg.eigvalsh(G).min() > -1e-10


def test_omega_for_trivial_hamiltonian():
    b = cached_basis(6)
    m = diagonalize(np.zeros((b.dim, b.dim)), b)
    psi = neel_state(b)
    psi = (psi + np.roll(psi, 3)) / np.sqrt(2)
    eq = equilibrium_process(m, psi, DET, 3)
    G = butterfly_gram(generate_outputs(m, psi, DET, 3, 2.5)).gram
    assert np.abs(eq.omega.gram - G).max() < 1e-12
    assert eq.n_blocks == 1


def _time_average(m, psi, n_B, samples, seed):
    dts = sample_intervals(n_B, samples, 1e4, seed)
    return np.mean([butterfly_gram(generate_outputs(m, psi, DET, n_B, t)).gram for t in dts], axis=0)


def test_omega_matches_time_average():
    m = cached_model("xxz-nnn", 6)
    psi = neel_state(m.basis)
    omega = equilibrium_process(m, psi, DET, 1).omega.gram
    assert np.linalg.norm(_time_average(m, psi, 1, 500, 0) - omega) < 2e-2
    small = np.linalg.norm(_time_average(m, psi, 2, 30, 1) - equilibrium_process(m, psi, DET, 2).omega.gram)
    large = np.linalg.norm(_time_average(m, psi, 2, 600, 1) - equilibrium_process(m, psi, DET, 2).omega.gram)
    assert large < small


def test_degenerate_spectrum_uses_blocks():
    """Integrable XXZ has degenerate levels; the block form still matches the time average."""
    m = cached_model("xxz", 6)
    assert m.degeneracy_labels[-1] + 1 < m.dim
    psi = neel_state(m.basis)
    omega = equilibrium_process(m, psi, DET, 2).omega.gram
    assert np.linalg.norm(_time_average(m, psi, 2, 500, 2) - omega) < 2e-2


def test_guard():
    with pytest.raises(ResourceError):
        equilibrium_process(cached_model("xxz", 10), neel_state(cached_basis(10)), DET, 1)


def test_bound_formulas():
    assert distance_bound(1, 2, 0, 5.0) == 0
    assert distance_bound(4, 2, 2, 1e300) < 1e-140
    assert distance_bound(2, 2, 1, 4.0) == pytest.approx(1.0)
    assert entropy_equilibration_bound(0.0, 2, 3) == 0
    assert entropy_equilibration_bound(1.0, 2, 1) == pytest.approx(2)
    with pytest.raises(ArgumentError):
        entropy_equilibration_bound(0.5, 1, 1)
    a, cap = markov_probability_bound(16.0, 2, 2, 1, 0.0)
    assert cap == pytest.approx(2 / 16**0.25) and a == pytest.approx(2 / 16**0.25)
    caps = [markov_probability_bound(d, 4, 2, 2, 0.1)[1] for d in np.geomspace(1, 1e6, 20)]
    assert np.all(np.diff(caps) < 0)
    with pytest.raises(ArgumentError):
        markov_probability_bound(0.0, 2, 2, 1, 0.1)


def test_trace_distance():
    r = _rho(4, 1)
    assert trace_distance(r, r) == pytest.approx(0, abs=1e-14)
    assert trace_distance(np.diag([1, 0]), np.diag([0, 1])) == pytest.approx(1)


def test_report_small():
    m = cached_model("xxz-nnn", 6)
    rep = equilibration_report(m, neel_state(m.basis), DET, 2, samples=60, seed=3)
    assert rep.mean_D <= rep.distance_bound
    assert rep.mean_gap <= rep.entropy_bound
    assert rep.exceedance <= rep.probability_cap
    again = equilibration_report(m, neel_state(m.basis), DET, 2, samples=60, seed=3, workers=2)
    assert np.array_equal(rep.distances, again.distances)


D_EFF_XXZ_NNN_L8 = 9.759255522563315
D_EFF_IAA_MBL_L8 = 3.0293100852981216
