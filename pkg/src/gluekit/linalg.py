"""Small dense linear-algebra helpers used across the package."""

from __future__ import annotations

import numpy as np
import scipy.linalg as sla


def nearest_unitary(m: np.ndarray) -> np.ndarray:
    """Unitary factor of the polar decomposition ``m = u p``."""
    u, _ = sla.polar(m, side="right")
    return u


def unitarity_residual(m: np.ndarray) -> float:
    """Frobenius distance from ``m`` to the nearest unitary."""
    return float(np.linalg.norm(m - nearest_unitary(m)))


def is_unitary(m: np.ndarray, tol: float = 1e-9) -> bool:
    m = np.asarray(m)
    return bool(np.linalg.norm(m.conj().T @ m - np.eye(m.shape[1])) <= tol)


def phase_fix(m: np.ndarray, tol: float = 1e-12) -> tuple[np.ndarray, complex]:
    """Rotate ``m`` so its largest-magnitude entry is real and positive.

    Ties within ``tol`` go to the first entry in row-major order.
    Returns the fixed matrix and the removed phase (``m = phase * fixed``).
    """
    flat = np.asarray(m).ravel()
    mags = np.abs(flat)
    top = mags.max()
    if top == 0:
        return np.asarray(m).copy(), 1.0 + 0j
    idx = int(np.flatnonzero(mags >= top - tol * max(top, 1.0))[0])
    phase = flat[idx] / mags[idx]
    return np.asarray(m) / phase, complex(phase)


def hs_overlap(p: np.ndarray, q: np.ndarray) -> float:
    """Normalized Hilbert-Schmidt overlap ``|tr(p^dag q)| / (|p| |q|)``."""
    npq = np.linalg.norm(p) * np.linalg.norm(q)
    if npq == 0:
        return 0.0
    return float(abs(np.vdot(p, q)) / npq)


def equal_up_to_phase(p: np.ndarray, q: np.ndarray, tol: float = 1e-9) -> bool:
    return hs_overlap(p, q) >= 1 - tol


def proportional_to_identity(m: np.ndarray, tol: float = 1e-9) -> bool:
    return equal_up_to_phase(m, np.eye(m.shape[0]), tol)


def null_space(m: np.ndarray, rel_tol: float) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal null-space basis (as columns) and the full singular values.

    A direction counts as null when its singular value is at most
    ``rel_tol`` times the largest one (or one, whichever is larger).
    """
    _, s, vh = np.linalg.svd(m)
    n = m.shape[1]
    s_full = np.zeros(n)
    s_full[: len(s)] = s
    scale = max(s_full.max(initial=0.0), 1.0)
    mask = s_full <= rel_tol * scale
    return vh.conj().T[:, mask], s_full


def psd_sqrt(h: np.ndarray) -> np.ndarray:
    """Square root of a Hermitian positive semi-definite matrix."""
    h = 0.5 * (h + h.conj().T)
    w, v = np.linalg.eigh(h)
    # roundoff-level eigenvalues would otherwise contribute ~sqrt(eps)
    floor = len(w) * np.finfo(float).eps * max(float(np.abs(w).max(initial=0.0)), 0.0)
    w = np.where(w > floor, w, 0.0)
    return (v * np.sqrt(w)) @ v.conj().T


def sort_spectrum(values) -> np.ndarray:
    """Sort by magnitude descending, then complex argument ascending."""
    values = np.asarray(values, dtype=complex)
    mags = np.round(np.abs(values), 12)
    args = np.round(np.angle(values), 12)
    order = np.lexsort((args, -mags))
    return values[order]
