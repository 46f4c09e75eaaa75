"""Dense translation-invariant MPS tensors and their spectra.

Index order is always ``(left, physical, right)``: ``data[i, s, j] = A^s_{ij}``.
Pairs of virtual indices are flattened row-major, ``(i, j) -> i * chi + j``,
so that ``vec(P X Q) = (P kron Q^T) vec(X)``.  With this convention the
transfer matrix ``T = sum_s A^s kron conj(A^s)`` is exactly the matrix of
the right map ``X -> sum_s A^s X A^s^dag`` and ``T^dag`` that of the left map.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .config import DEFAULT, Config
from .errors import CanonicalizationFailed, InvalidArg, InvalidTensor, NotCanonical, TooLarge
from .linalg import psd_sqrt, sort_spectrum


@dataclass(frozen=True)
class MpsTensor:
    data: np.ndarray

    def __post_init__(self):
        data = np.array(self.data, dtype=complex)
        if data.ndim != 3 or data.shape[0] != data.shape[2] or 0 in data.shape:
            raise InvalidTensor(f"expected shape (chi, d, chi), got {data.shape}")
        if not np.all(np.isfinite(data)):
            raise InvalidTensor("tensor has non-finite entries")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @property
    def chi(self) -> int:
        return self.data.shape[0]

    @property
    def d(self) -> int:
        return self.data.shape[1]

    def matrices(self) -> np.ndarray:
        """Stack of ``A^s`` with shape ``(d, chi, chi)``."""
        return self.data.transpose(1, 0, 2)

    def physical_matrix(self) -> np.ndarray:
        """``A`` as a ``d x chi^2`` map from virtual pairs to the physical leg."""
        return self.matrices().reshape(self.d, self.chi**2)

    @classmethod
    def from_matrices(cls, mats) -> "MpsTensor":
        return cls(np.asarray(mats, dtype=complex).transpose(1, 0, 2))

    def gauge(self, x: np.ndarray) -> "MpsTensor":
        """Return ``X^-1 A^s X``."""
        xinv = np.linalg.inv(x)
        return MpsTensor(np.einsum("ab,bsc,cd->asd", xinv, self.data, x))

    def apply_physical(self, u: np.ndarray) -> "MpsTensor":
        """Return ``sum_s' u[s, s'] A^s'`` (acts on the physical leg)."""
        return MpsTensor(np.einsum("ts,isj->itj", u, self.data))

    def scaled(self, c: complex) -> "MpsTensor":
        return MpsTensor(self.data * c)

    def reversed(self) -> "MpsTensor":
        """Swap the virtual legs (``A^s -> (A^s)^T``), the mirror-image chain."""
        return MpsTensor(self.data.transpose(2, 1, 0))


@dataclass(frozen=True)
class TransferMatrix:
    matrix: np.ndarray
    eigenvalues: np.ndarray
    numerical_rank: int
    singular_values: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def spectral_radius(self) -> float:
        return float(abs(self.eigenvalues[0]))

    def correlation_lengths(self) -> np.ndarray:
        """``xi = 1 / log(1/|lambda|)`` for each eigenvalue (0 for zeros, inf on the unit circle)."""
        mags = np.abs(self.eigenvalues) / self.spectral_radius
        with np.errstate(divide="ignore"):
            logs = np.log(1.0 / np.clip(mags, 0.0, 1.0))
            return np.where(mags <= 0, 0.0, 1.0 / logs)


@dataclass(frozen=True)
class SchmidtSpectrum:
    values: np.ndarray

    def __post_init__(self):
        vals = np.clip(np.real(np.asarray(self.values, dtype=complex)), 0.0, None)
        vals = np.sort(vals)[::-1]
        total = vals.sum()
        if total <= 0:
            raise CanonicalizationFailed("Schmidt spectrum vanishes")
        vals = vals / total
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def is_flat(self, tol: float = 1e-8) -> bool:
        return bool(self.values.max() - self.values.min() <= tol)


@dataclass(frozen=True)
class DefiniteFormTensor:
    chi: int
    matrix: np.ndarray

    def as_tensor(self) -> MpsTensor:
        """Read the PSD matrix as a tensor with physical dimension ``chi^2``."""
        chi = self.chi
        return MpsTensor(self.matrix.reshape(chi**2, chi, chi).transpose(1, 0, 2))


@dataclass(frozen=True)
class CanonicalForm:
    """Right-canonical tensor together with its gauge data.

    ``tensor = gauge^-1 A gauge / sqrt(spectral radius)``.  ``degenerate``
    flags a degenerate dominant eigenvalue (long-range entanglement); the
    left fixed point is then one selected element of the dominant space.
    """

    tensor: MpsTensor
    spectrum: SchmidtSpectrum
    gauge: np.ndarray
    left_fixed_point: np.ndarray
    degenerate: bool

    def __iter__(self):
        return iter((self.tensor, self.spectrum, self.gauge))


def _check(a: MpsTensor) -> MpsTensor:
    if not isinstance(a, MpsTensor):
        a = MpsTensor(a)
    return a


def transfer_operator(a: MpsTensor) -> np.ndarray:
    """``T = sum_s A^s kron conj(A^s)`` as a ``chi^2 x chi^2`` array."""
    mats = _check(a).matrices()
    chi = a.chi
    t = np.einsum("sij,skl->ikjl", mats, mats.conj())
    return t.reshape(chi * chi, chi * chi)


def transfer_matrix(a: MpsTensor, config: Config = DEFAULT) -> TransferMatrix:
    a = _check(a)
    t = transfer_operator(a)
    eig = sort_spectrum(np.linalg.eigvals(t))
    sv = np.linalg.svd(t, compute_uv=False)
    rank = int(np.sum(sv > config.rank_tol * sv[0])) if sv[0] > 0 else 0
    return TransferMatrix(matrix=t, eigenvalues=eig, numerical_rank=rank, singular_values=sv)


def spectral_radius(a: MpsTensor) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(transfer_operator(a)))))


def normalize(a: MpsTensor) -> MpsTensor:
    """Scale so that the dominant transfer-matrix eigenvalue is one."""
    a = _check(a)
    rho = spectral_radius(a)
    if not rho > 0:
        raise InvalidTensor("transfer matrix has zero spectral radius")
    return a.scaled(rho**-0.5)


def _dominant_fixed_point(op: np.ndarray, chi: int, tol: float) -> tuple[np.ndarray, float, int]:
    """Positive fixed point of a completely positive map given as a matrix.

    The identity is projected onto the dominant eigenspace and Hermitized;
    for a unique fixed point this is just that eigenvector with a positive
    trace.  Returns the fixed point, the spectral radius and the dimension
    of the dominant eigenspace.
    """
    w, v = np.linalg.eig(op)
    rho = np.max(np.abs(w))
    if rho <= 0:
        raise CanonicalizationFailed("transfer matrix is nilpotent")
    dominant = np.abs(w - rho) <= max(tol, 1e-9) * rho
    space, _ = np.linalg.qr(v[:, dominant])
    ident = np.eye(chi).reshape(-1)
    fp = (space @ (space.conj().T @ ident)).reshape(chi, chi)
    fp = 0.5 * (fp + fp.conj().T)
    tr = np.trace(fp).real
    if abs(tr) <= 1e-14:
        raise CanonicalizationFailed("dominant eigenspace has no positive element")
    fp = fp / tr
    return fp, float(rho), int(dominant.sum())


def right_fixed_point(a: MpsTensor, config: Config = DEFAULT) -> tuple[np.ndarray, float, int]:
    return _dominant_fixed_point(transfer_operator(a), a.chi, config.canonical_tol)


def left_fixed_point(a: MpsTensor, config: Config = DEFAULT) -> tuple[np.ndarray, float, int]:
    return _dominant_fixed_point(transfer_operator(a).conj().T, a.chi, config.canonical_tol)


def canonical_residual(a: MpsTensor) -> float:
    """``|sum_s A^s A^s^dag - 1|_F``."""
    mats = _check(a).matrices()
    return float(np.linalg.norm(np.einsum("sij,skj->ik", mats, mats.conj()) - np.eye(a.chi)))


def _require_positive(fp: np.ndarray, what: str, tol: float) -> np.ndarray:
    w = np.linalg.eigvalsh(fp)
    if w.min() < -tol * max(w.max(), 1.0):
        raise CanonicalizationFailed(f"{what} fixed point is not positive semi-definite")
    if w.min() <= tol * w.max():
        raise CanonicalizationFailed(
            f"{what} fixed point is singular (zeros in the entanglement spectrum, chi is not minimal)"
        )
    return w


def to_right_canonical(a: MpsTensor, config: Config = DEFAULT) -> tuple[MpsTensor, np.ndarray, bool]:
    """Gauge ``A`` so the identity is its dominant right fixed point.

    Uses only the Hermitian square root of the right fixed point, so a
    tensor that is already right-canonical comes back unchanged.
    """
    a = _check(a)
    r, rho, ndom = right_fixed_point(a, config)
    _require_positive(r, "right", config.canonical_tol)
    # scaled so the gauge is trivial when r is proportional to the identity
    x = psd_sqrt(r) * np.sqrt(a.chi / np.trace(r).real)
    out = a.gauge(x).scaled(rho**-0.5)
    return out, x, ndom > 1


def right_canonicalize(a: MpsTensor, config: Config = DEFAULT) -> CanonicalForm:
    """Right-canonical form with a diagonal left fixed point ``Lambda^2``."""
    a = _check(a)
    b, x, degenerate = to_right_canonical(a, config)
    lfp, _, _ = left_fixed_point(b, config)
    _require_positive(lfp, "left", config.canonical_tol)
    w, u = np.linalg.eigh(lfp)
    order = np.argsort(-w, kind="stable")
    w, u = w[order], u[:, order]
    out = b.gauge(u)
    res = canonical_residual(out)
    if res > 1e3 * config.canonical_tol:
        raise CanonicalizationFailed(f"canonical residual {res:.3g} too large")
    return CanonicalForm(
        tensor=out,
        spectrum=SchmidtSpectrum(w),
        gauge=x @ u,
        left_fixed_point=np.diag(w / w.sum()).astype(complex),
        degenerate=degenerate,
    )


def entanglement_spectrum(a: MpsTensor, config: Config = DEFAULT) -> SchmidtSpectrum:
    return right_canonicalize(a, config).spectrum


def definite_form(a: MpsTensor, config: Config = DEFAULT) -> tuple[DefiniteFormTensor, np.ndarray]:
    """Physical change of basis making ``A`` a PSD map from virtual pairs.

    Computed from the polar decomposition ``M = W Q`` of the ``d x chi^2``
    matrix ``M``; ``Q = sqrt(M^dag M)`` is the definite-form tensor and
    ``W`` the physical isometry (``M = W Q``).
    """
    a = _check(a)
    m = a.physical_matrix()
    w, q = sla.polar(m, side="right")
    q = 0.5 * (q + q.conj().T)
    return DefiniteFormTensor(chi=a.chi, matrix=q), w


def vertical_transfer(a: MpsTensor) -> np.ndarray:
    """``M^dag M``, the transfer matrix read from virtual (ket) to virtual (bra)."""
    m = _check(a).physical_matrix()
    return m.conj().T @ m


def definite_form_sqrt(a: MpsTensor) -> np.ndarray:
    """Second route to the definite form: Hermitian square root of ``M^dag M``."""
    return psd_sqrt(vertical_transfer(a))


def boundary_vectors(a: MpsTensor, config: Config = DEFAULT) -> tuple[np.ndarray, np.ndarray]:
    """Default boundary vectors for closing a finite chain.

    Left: the all-ones vector weighted by ``sqrt(L)`` (``L`` the left fixed
    point); right: the all-ones vector.
    """
    lfp, _, _ = left_fixed_point(a, config)
    ones = np.ones(a.chi)
    return psd_sqrt(lfp).T @ ones, ones.astype(complex)


def expand_statevector(
    a: MpsTensor,
    n_sites: int,
    open_virtual: bool = False,
    left: np.ndarray | None = None,
    right: np.ndarray | None = None,
    config: Config = DEFAULT,
) -> np.ndarray:
    """Contract ``n_sites`` copies of ``A`` into a normalized state vector.

    With ``open_virtual`` the outer virtual legs stay as boundary qudits and
    the vector is indexed ``(left, s_1, ..., s_n, right)``; otherwise they are
    closed with ``left``/``right`` (defaults from :func:`boundary_vectors`).
    """
    a = _check(a)
    if n_sites < 1:
        raise InvalidArg("n_sites must be positive")
    size = a.chi * a.d**n_sites * a.chi
    if size > config.memory_guard:
        raise TooLarge(f"{size} amplitudes exceed the memory guard {config.memory_guard}")
    psi = a.data
    for _ in range(n_sites - 1):
        psi = np.tensordot(psi, a.data, axes=([-1], [0]))
    if not open_virtual:
        if left is None or right is None:
            dl, dr = boundary_vectors(a, config)
            left = dl if left is None else left
            right = dr if right is None else right
        psi = np.tensordot(np.asarray(left), psi, axes=([0], [0]))
        psi = np.tensordot(psi, np.asarray(right), axes=([-1], [0]))
    vec = psi.reshape(-1)
    nrm = np.linalg.norm(vec)
    if nrm == 0:
        raise InvalidArg("boundary choice annihilates the state")
    return vec / nrm


def _insert(a: np.ndarray, op: np.ndarray, env: np.ndarray) -> np.ndarray:
    # env'_{j'j} = sum O[s', s] conj(A[i', s', j']) env[i', i] A[i, s, j]
    return np.einsum("ts,ptq,pi,isj->qj", op, a.conj(), env, a)


def two_point_correlator(
    a: MpsTensor, o1: np.ndarray, o2: np.ndarray, separation: int, config: Config = DEFAULT
) -> complex:
    """``<O1(x) O2(x + r)>`` on the infinite chain of a right-canonical tensor."""
    a = _check(a)
    if canonical_residual(a) > config.canonical_tol:
        raise NotCanonical("two_point_correlator needs a right-canonical tensor")
    if separation < 1:
        raise InvalidArg("separation must be at least one site")
    lfp, _, _ = left_fixed_point(a, config)
    ident = np.eye(a.d)
    env = _insert(a.data, np.asarray(o1), lfp)
    for _ in range(separation - 1):
        env = _insert(a.data, ident, env)
    env = _insert(a.data, np.asarray(o2), env)
    return complex(np.trace(env))


def block(a: MpsTensor, k: int = 2) -> MpsTensor:
    """Block ``k`` consecutive sites into one tensor with physical dimension ``d^k``."""
    a = _check(a)
    out = a.data
    for _ in range(k - 1):
        out = np.tensordot(out, a.data, axes=([-1], [0]))
    chi = a.chi
    return MpsTensor(out.reshape(chi, -1, chi))
