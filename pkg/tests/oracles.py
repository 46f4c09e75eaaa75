"""Brute-force wavefunctions built gate by gate, independent of the tensors."""

from __future__ import annotations

from functools import reduce

import numpy as np
import scipy.linalg as sla

X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)


def kron_all(ops):
    return reduce(np.kron, ops)


def site_op(op, k, n, d=2):
    ops = [np.eye(d)] * n
    ops[k] = op
    return kron_all(ops)


def product_field(beta, n, gen=X):
    e = sla.expm(beta * gen)
    return kron_all([e] * n)


def ghz(beta, n):
    psi = np.zeros(2**n, dtype=complex)
    psi[0] = psi[-1] = 1
    return product_field(beta, n) @ psi


def plus(n):
    return np.ones(2**n, dtype=complex)


def ising_chain(beta, n):
    """``e^{beta sum Z_k Z_{k+1}} |+...+>`` on an open chain."""
    zz = sum(site_op(Z, k, n) @ site_op(Z, k + 1, n) for k in range(n - 1))
    return np.exp(beta * np.real(np.diag(zz))) * plus(n)


def cluster_with_tail(beta, n):
    """``e^{beta sum X}`` on (cluster state of ``n - 1`` qubits) tensor ``|0>``."""
    m = n - 1
    bits = (np.arange(2**m)[:, None] >> np.arange(m)[::-1]) & 1
    signs = (-1.0) ** np.sum(bits[:, :-1] * bits[:, 1:], axis=1)
    psi = np.kron(signs.astype(complex), np.array([1, 0]))
    return product_field(beta, n) @ psi


def nogo(beta, beta_prime, n):
    return product_field(beta, n) @ ising_chain(beta_prime, n)


def dipole(n_sites, N, eta, beta):
    """Phase product ``prod omega^{eta g_k (g_{k+1} - g_k)}`` with the last qudit in 0."""
    g = np.indices([N] * n_sites).reshape(n_sites, -1).T
    phase = np.sum(eta * g[:, :-1] * (g[:, 1:] - g[:, :-1]), axis=1)
    amp = np.exp(2j * np.pi * phase / N) * (g[:, -1] == 0)
    shift = np.roll(np.eye(N), 1, axis=0)
    e = sla.expm(beta * (shift + shift.T))
    return kron_all([e] * n_sites) @ amp


def expectation(psi, ops: dict, n: int, d: int = 2) -> complex:
    """``<psi| prod_k ops[k] |psi>`` applying each single-site operator in place."""
    t = psi.reshape([d] * n)
    phi = t
    for k, op in ops.items():
        phi = np.moveaxis(np.tensordot(op, phi, axes=([1], [k])), 0, k)
    return complex(np.vdot(t, phi))


def overlap(p, q):
    return abs(np.vdot(p, q)) ** 2 / (np.vdot(p, p).real * np.vdot(q, q).real)


def aklt_valence_bond(n, left, right):
    """Singlets on every bond, each site's spin pair projected to spin one.

    Site ``k`` maps its two spin-1/2 legs to the Cartesian triplet with
    ``P^a = sigma_a eps^-1``; ``left``/``right`` fix the two dangling spins.
    """
    eps = np.array([[0, 1], [-1, 0]], dtype=complex)
    sig = [X, np.array([[0, -1j], [1j, 0]]), Z]
    pmap = np.array([(s @ np.linalg.inv(eps)).reshape(-1) for s in sig])
    singlet = eps.reshape(-1)
    chain = kron_all([np.asarray(left, dtype=complex)] + [singlet] * (n - 1) + [eps @ np.asarray(right, dtype=complex)])
    return kron_all([pmap] * n) @ chain
