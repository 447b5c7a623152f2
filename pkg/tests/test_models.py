import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fullspace import hamiltonian as full_hamiltonian
from ptchaos.models import PRESETS, ModelSpec, build_hamiltonian, build_model, diagonalize, evolve
from ptchaos.sector_basis import build_basis


def _project(Hfull, basis):
    idx = basis.states
    return Hfull[np.ix_(idx, idx)]


@pytest.mark.parametrize("name", sorted(PRESETS))
@pytest.mark.parametrize("L", [2, 4, 6])
def test_matches_full_space(name, L):
    b = build_basis(L, L // 2)
    H = build_hamiltonian(PRESETS[name], b)
    Hf = full_hamiltonian(name, L)
    assert np.allclose(H, _project(Hf, b), atol=1e-12)
    # sector closure: H_full maps the sector into itself
    others = np.setdiff1d(np.arange(2**L), b.states)
    assert np.abs(Hf[np.ix_(others, b.states)]).max(initial=0) < 1e-12
    assert np.allclose(H, H.conj().T, atol=1e-12)


def test_xxz_two_sites():
    # two periodic bonds between the same pair: flip-flop 2*2J, zz -J*Delta*2
    H = build_hamiltonian(ModelSpec("XXZ", J=1.0, Delta=0.55), build_basis(2, 1))
    assert np.allclose(H, [[-1.1, 4.0], [4.0, -1.1]])


def test_iaa_zero_lambda():
    b = build_basis(8, 4)
    H_iaa = build_hamiltonian(ModelSpec("IAA", J=1.0, Delta=-1.0, lam=0.0), b)
    H_xxz = build_hamiltonian(ModelSpec("XXZ", J=1.0, Delta=-1.0), b)
    assert np.abs(H_iaa + H_xxz).max() <= 1e-15


def _pair_sums(L, twist):
    hop = np.zeros((L, L))
    for i in range(L):
        j = (i + 1) % L
        hop[i, j] = hop[j, i] = -1.0 if (twist and j == 0) else 1.0
    eps = np.linalg.eigvalsh(hop)
    return sorted(eps[a] + eps[b] for a in range(L) for b in range(a + 1, L))


def test_free_fermion_single_particle_filling():
    # string signs make the wrap bond a genuinely periodic fermion hop, so the
    # two-particle spectrum is pair sums of the periodic 4x4 hopping matrix
    H = build_hamiltonian(PRESETS["free-fermion"], build_basis(4, 2))
    E = np.linalg.eigvalsh(H)
    assert np.allclose(E, _pair_sums(4, twist=False), atol=1e-12)
    assert not np.allclose(E, _pair_sums(4, twist=True), atol=1e-6)


def test_diagonalize_trivial():
    m = diagonalize(np.eye(3))
    assert np.allclose(m.eigenvalues, 1)
    assert np.allclose(diagonalize(np.diag([3.0, 1.0, 2.0])).eigenvalues, [1, 2, 3])


def test_reconstruction():
    b = build_basis(8, 4)
    H = build_hamiltonian(PRESETS["xxz"], b)
    m = diagonalize(H, b)
    assert np.linalg.norm(m.hamiltonian() - H) / np.linalg.norm(H) < 1e-10
    V = m.eigenvectors
    assert np.allclose(V.conj().T @ V, np.eye(b.dim), atol=1e-10)
    assert np.abs(H @ V - V * m.eigenvalues).max() < 1e-10 * np.linalg.norm(H, 2)


@pytest.fixture(scope="module")
def chaotic8():
    return build_model(PRESETS["xxz-nnn"], build_basis(8, 4))


def test_evolve_identities(chaotic8):
    m = chaotic8
    rng = np.random.default_rng(1)
    v = rng.standard_normal(m.dim) + 1j * rng.standard_normal(m.dim)
    v /= np.linalg.norm(v)
    assert np.abs(evolve(m, v, 0.0) - v).max() < 1e-14
    k = 17
    vk = m.eigenvectors[:, k]
    assert np.abs(evolve(m, vk, 2.3) - np.exp(-2.3j * m.eigenvalues[k]) * vk).max() < 1e-12
    assert np.abs(evolve(m, evolve(m, v, 0.7), 1.9) - evolve(m, v, 2.6)).max() < 1e-12
    assert np.allclose(m.propagator(1.3) @ v, evolve(m, v, 1.3), atol=1e-12)


@given(st.floats(0, 50))
@settings(max_examples=25, deadline=None)
def test_norm_and_energy(chaotic8, t):
    m = chaotic8
    H = m.hamiltonian()
    v = np.zeros(m.dim, complex)
    v[[3, 11]] = 1 / np.sqrt(2)
    w = evolve(m, v, t)
    assert abs(np.linalg.norm(w) - 1) < 1e-12
    e0, e1 = np.vdot(v, H @ v).real, np.vdot(w, H @ w).real
    assert abs(e1 - e0) <= 1e-10 * np.linalg.norm(H, 2)
