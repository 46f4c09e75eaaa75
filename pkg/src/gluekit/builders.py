"""Tensors for the worked examples: deformed GHZ, cluster and trivial chains,
AKLT, the full-rank non-flat counterexample and the Z_N dipole SPT chain."""

from __future__ import annotations

from math import gcd

import numpy as np
import scipy.linalg as sla

from .errors import InvalidArg, NotCoprime
from .mps import MpsTensor, normalize

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)

EXAMPLES = ("deformed_ghz", "deformed_cluster", "deformed_trivial", "aklt", "nogo_combined", "dipole_spt")


def shift(n: int) -> np.ndarray:
    """Clock-shift ``X |g> = |g + 1 mod n>``."""
    return np.roll(np.eye(n, dtype=complex), 1, axis=0)


def clock(n: int) -> np.ndarray:
    """``Z |g> = omega^g |g>``."""
    return np.diag(np.exp(2j * np.pi * np.arange(n) / n))


def _junction(phys: np.ndarray, right: np.ndarray) -> MpsTensor:
    """Delta junction with ``phys`` on the physical leg and ``right`` on the right leg.

    ``A^s_{ij} = phys[s, i] * right[i, j]``.
    """
    return normalize(MpsTensor(np.einsum("si,ij->isj", phys, right)))


def deformed_ghz(beta: float) -> MpsTensor:
    return _junction(sla.expm(beta * PAULI_X), np.eye(2))


def deformed_cluster(beta: float) -> MpsTensor:
    return _junction(sla.expm(beta * PAULI_X), HADAMARD)


def deformed_trivial(beta: float) -> MpsTensor:
    """``A^s_{ij} = delta_{si} [e^{alpha X}]_{ij}`` with ``tanh(alpha) = e^{-2 beta}``.

    ``e^{alpha X}`` is used in the form ``1 + tanh(alpha) X`` (equal up to
    scale), which stays finite at ``beta = 0``.
    """
    f = np.eye(2) + np.exp(-2 * beta) * PAULI_X
    return normalize(MpsTensor(np.einsum("si,ij->isj", np.eye(2), f)))


def aklt() -> MpsTensor:
    """Spin-1 AKLT chain, ``A^a = sigma^a / sqrt(3)`` for ``a = x, y, z``."""
    return normalize(MpsTensor.from_matrices([PAULI_X, PAULI_Y, PAULI_Z]))


def nogo_combined(beta: float, beta_prime: float) -> MpsTensor:
    """``e^{beta sum X} e^{beta' sum ZZ} |+...+>``: full-rank and non-flat."""
    return normalize(deformed_trivial(beta_prime).apply_physical(sla.expm(beta * PAULI_X)))


def dipole_hadamard(n: int, eta: int) -> np.ndarray:
    """``H_eta = sum_{g,h} omega^{eta g (h - g)} |g><h| / sqrt(n)``."""
    g = np.arange(n)
    expo = (eta * g[:, None] * (g[None, :] - g[:, None])) % n
    return np.exp(2j * np.pi * expo / n) / np.sqrt(n)


def dipole_spt(n: int, eta: int, beta: float) -> MpsTensor:
    if n < 2:
        raise InvalidArg("N must be at least 2")
    if gcd(eta, n) != 1:
        raise NotCoprime(f"gcd(eta={eta}, N={n}) = {gcd(eta, n)} != 1")
    x = shift(n)
    return _junction(sla.expm(beta * (x + x.conj().T)), dipole_hadamard(n, eta))


_REQUIRED = {
    "deformed_ghz": ("beta",),
    "deformed_cluster": ("beta",),
    "deformed_trivial": ("beta",),
    "aklt": (),
    "nogo_combined": ("beta", "beta_prime"),
    "dipole_spt": ("N", "eta", "beta"),
}


def build_example(name: str, params: dict | None = None) -> MpsTensor:
    """Build a named example tensor, normalized.

    Args:
        name: one of :data:`EXAMPLES`.
        params: ``beta`` for the deformed chains, ``beta`` and ``beta_prime``
            for ``nogo_combined``; ``N``, ``eta`` and ``beta`` for ``dipole_spt``.
    """
    params = dict(params or {})
    if name not in _REQUIRED:
        raise InvalidArg(f"unknown example {name!r}; choose from {', '.join(EXAMPLES)}")
    missing = [k for k in _REQUIRED[name] if k not in params]
    if missing:
        raise InvalidArg(f"{name} needs parameters {missing}")
    if name == "deformed_ghz":
        return deformed_ghz(float(params["beta"]))
    if name == "deformed_cluster":
        return deformed_cluster(float(params["beta"]))
    if name == "deformed_trivial":
        return deformed_trivial(float(params["beta"]))
    if name == "aklt":
        return aklt()
    if name == "nogo_combined":
        return nogo_combined(float(params["beta"]), float(params["beta_prime"]))
    return dipole_spt(int(params["N"]), int(params["eta"]), float(params["beta"]))
