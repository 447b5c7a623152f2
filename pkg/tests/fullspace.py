"""Brute-force 2^L reference implementation used only as a test oracle.

Everything here works in the unrestricted Hilbert space with Kronecker-product
operators, scipy's expm for propagation, naive enumeration of intervention
strings, and reshaped partial traces. It shares no code with the package.
"""
from functools import reduce
from itertools import product

import numpy as np
from scipy.linalg import expm

I2 = np.eye(2)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]])
SZ = np.diag([-1.0, 1.0]).astype(complex)  # (empty, occupied)
PARITY = np.diag([1.0, -1.0]).astype(complex)
LOWER = np.array([[0, 1], [0, 0]], dtype=complex)

TABLE = {
    "xxz": dict(family="XXZ", J=1.0, Delta=0.55, h=0.0, g=0.0, lam=0.0),
    "xxz-nnn": dict(family="XXZ_NNN", J=1.0, Delta=0.55, h=0.6, g=0.1, lam=0.0),
    "iaa-chaotic": dict(family="IAA", J=1.0, Delta=-1.0, h=0.0, g=0.0, lam=1.0),
    "iaa-mbl": dict(family="IAA", J=1.0, Delta=-1.0, h=0.0, g=0.0, lam=5.0),
    "free-fermion": dict(family="FREE_FERMION", J=1.0),
}


def site_op(op, i, L):
    """Embed a one-site operator; site 0 is the least significant bit."""
    return np.kron(np.kron(np.eye(2 ** (L - 1 - i)), op), np.eye(2**i))


def sites_op(ops: dict, L):
    return reduce(lambda a, b: a @ b, [site_op(o, i, L) for i, o in ops.items()])


def annihilator(i, L):
    ops = {k: PARITY for k in range(i)}
    ops[i] = LOWER
    return sites_op(ops, L)


def hamiltonian(name, L):
    p = TABLE[name]
    H = np.zeros((2**L, 2**L), dtype=complex)
    if p["family"] == "FREE_FERMION":
        for i in range(L):
            j = (i + 1) % L
            ci, cj = annihilator(i, L), annihilator(j, L)
            H += p["J"] * (ci.conj().T @ cj + cj.conj().T @ ci)
        return H
    for i in range(L):
        j = (i + 1) % L
        H += p["J"] * (sites_op({i: SX}, L) @ sites_op({j: SX}, L)
                       + sites_op({i: SY}, L) @ sites_op({j: SY}, L)
                       + p["Delta"] * sites_op({i: SZ}, L) @ sites_op({j: SZ}, L))
    if p["family"] == "IAA":
        H = -H
        q = 2 / (np.sqrt(5) + 1)
        for i in range(L):
            H += 2 * p["lam"] * np.cos(2 * np.pi * q * (i + 1)) * site_op(SZ, i, L)
    if p["family"] == "XXZ_NNN":
        for i in range(L):
            H += p["h"] * site_op(SZ, i, L) @ site_op(SZ, (i + 2) % L, L)
        H += p["g"] * site_op(SZ, 0, L)
    return H


def kraus(kind, fermionic):
    s = 1 / np.sqrt(2)
    if kind == "deterministic":
        return [I2 * s, SZ * s]
    n = LOWER.conj().T @ LOWER
    return [n, I2 - n] if fermionic else [I2 - n, n]


def neel(L):
    psi = np.zeros(2**L, dtype=complex)
    psi[sum(1 << i for i in range(1, L, 2))] = 1
    return psi


def outputs(name, L, kind, n_B, dt):
    H = hamiltonian(name, L)
    U = expm(-1j * H * dt)
    ops = [site_op(a, 0, L) for a in kraus(kind, TABLE[name]["family"] == "FREE_FERMION")]
    rows = []
    for xs in product(range(len(ops)), repeat=n_B):
        v = neel(L)
        for x in xs:
            v = ops[x] @ (U @ v)
        rows.append(v)
    return np.array(rows)


def renyi2(rho):
    return -np.log(np.trace(rho @ rho).real)


def gram(X):
    return np.array([[np.vdot(y, x) for y in X] for x in X])


def trace_slots(G, n, keep):
    t = G.reshape((2,) * (2 * n))
    letters = "abcdefghijklmnopqrstuvwxyz"
    left = [letters[i] for i in range(n)]
    right = [letters[i] if i not in keep else letters[n + i] for i in range(n)]
    out = "".join(left[i] for i in keep) + "".join(right[i] for i in keep)
    t = np.einsum("".join(left) + "".join(right) + "->" + out, t)
    d = 2 ** len(keep)
    return t.reshape(d, d)


def reduced_r2(v, L, cut):
    m = v.reshape(2 ** (L - cut), 2**cut)  # rows: sites cut..L-1, cols: sites 0..cut-1
    return m @ m.conj().T


def diagnostics(name, L, kind, n_B, dt, cut, n_B1):
    X = outputs(name, L, kind, n_B, dt)
    G = gram(X)
    qde = renyi2(G)
    ste = renyi2(sum(reduced_r2(v, L, cut) for v in X))
    s1 = renyi2(trace_slots(G, n_B, list(range(n_B1))))
    s2 = renyi2(trace_slots(G, n_B, list(range(n_B1, n_B))))
    p = np.array([np.vdot(v, v).real for v in X])
    S, w = [], []
    for v, pv in zip(X, p):
        if pv < 1e-12:
            continue
        S.append(renyi2(reduced_r2(v / np.sqrt(pv), L, cut)))
        w.append(pv)
    S, w = np.array(S), np.array(w)
    mean = np.sum(w * S) / np.sum(w)
    std = np.sqrt(max(np.sum(w * (S - mean) ** 2) / np.sum(w), 0.0))
    return dict(qde=qde, ste=ste, mi=s1 + s2 - qde, ppe_mean=mean, ppe_std=std, outputs=X)
