"""Unitary error bases: Pauli, Z_N clock-shift, tensor products and user bases."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .builders import PAULI_X, PAULI_Z, clock, shift
from .errors import InvalidArg, InvalidBasis
from .linalg import equal_up_to_phase, phase_fix, proportional_to_identity, unitarity_residual


@dataclass(frozen=True)
class ErrorBasis:
    chi: int
    ops: tuple
    labels: tuple

    def __post_init__(self):
        ops = tuple(np.array(v, dtype=complex) for v in self.ops)
        if len(ops) != self.chi**2:
            raise InvalidBasis(f"need chi^2 = {self.chi**2} operators, got {len(ops)}")
        for v in ops:
            if v.shape != (self.chi, self.chi) or not np.all(np.isfinite(v)):
                raise InvalidBasis("operators must be finite chi x chi arrays")
            v.setflags(write=False)
        labels = tuple(str(x) for x in self.labels) if self.labels else tuple(f"V{a}" for a in range(len(ops)))
        if len(labels) != len(ops):
            raise InvalidBasis("one label per operator")
        object.__setattr__(self, "ops", ops)
        object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return len(self.ops)

    def __getitem__(self, idx) -> np.ndarray:
        return self.ops[idx]

    @property
    def normalized(self) -> bool:
        return bool(np.array_equal(self.ops[0], np.eye(self.chi)))

    def stacked(self) -> np.ndarray:
        return np.stack(self.ops)

    def index_of(self, v: np.ndarray, tol: float = 1e-9) -> int | None:
        """Index of the element equal to ``v`` up to phase, or ``None``."""
        for a, w in enumerate(self.ops):
            if equal_up_to_phase(w, v, tol):
                return a
        return None


@dataclass(frozen=True)
class BasisValidation:
    orthonormality_residual: float
    unitarity_residuals: tuple
    unitary: bool
    normalized: bool
    traceless: bool
    closed: bool
    nice: bool
    notes: list = field(default_factory=list)


@dataclass(frozen=True)
class PhaseTable:
    """``phases[b, a]`` holds ``chi_{b,a}`` with ``V_a V_b V_a^dag = chi_{b,a} V_b``.

    The table is Hermitian (``chi_{a,b} = conj(chi_{b,a})``).  Entries are
    NaN where the group commutator is not a multiple of the identity.
    """

    chi2: int
    phases: np.ndarray
    abelian: bool


def _gauge(ops) -> list:
    return [phase_fix(np.asarray(v, dtype=complex))[0] for v in ops]


def pauli_basis() -> ErrorBasis:
    """``{1, X, Z, ZX}`` (``ZX = [[0, 1], [-1, 0]]``)."""
    ops = [np.eye(2), PAULI_X, PAULI_Z, PAULI_Z @ PAULI_X]
    return ErrorBasis(2, tuple(_gauge(ops)), ("I", "X", "Z", "ZX"))


def clock_shift_basis(n: int) -> ErrorBasis:
    """``X^a Z^b`` ordered by ``b * n + a``; for ``n = 2`` this is the Pauli order."""
    if n < 2:
        raise InvalidArg("clock-shift basis needs N >= 2")
    x, z = shift(n), clock(n)
    ops, labels = [], []
    for b in range(n):
        for a in range(n):
            ops.append(np.linalg.matrix_power(x, a) @ np.linalg.matrix_power(z, b))
            labels.append("I" if a == b == 0 else f"X{a}Z{b}".replace("X0", "").replace("Z0", ""))
    return ErrorBasis(n, tuple(_gauge(ops)), tuple(labels))


def tensor_basis(first: ErrorBasis, second: ErrorBasis) -> ErrorBasis:
    ops = [np.kron(p, q) for p in first.ops for q in second.ops]
    labels = [f"{a}*{b}" for a in first.labels for b in second.labels]
    labels[0] = "I"
    return ErrorBasis(first.chi * second.chi, tuple(_gauge(ops)), tuple(labels))


def user_basis(ops, labels=None, gauge_fix: bool = True) -> ErrorBasis:
    ops = [np.asarray(v, dtype=complex) for v in ops]
    if not ops or ops[0].ndim != 2:
        raise InvalidBasis("basis must be a non-empty list of square matrices")
    chi = ops[0].shape[0]
    if gauge_fix:
        ops = _gauge(ops)
    return ErrorBasis(chi, tuple(ops), tuple(labels) if labels else ())


def gram_residual(basis: ErrorBasis) -> float:
    """``|tr(V_a^dag V_b) - chi delta_ab|_F``."""
    flat = basis.stacked().reshape(len(basis), -1)
    gram = flat.conj() @ flat.T
    return float(np.linalg.norm(gram - basis.chi * np.eye(len(basis))))


def validate(basis: ErrorBasis, tol: float = 1e-9) -> BasisValidation:
    """Report orthonormality, unitarity and niceness; never raises."""
    notes = []
    ortho = gram_residual(basis)
    unit = tuple(unitarity_residual(v) for v in basis.ops)
    unitary = max(unit) <= tol
    traceless = all(abs(np.trace(v)) <= tol * basis.chi for v in basis.ops[1:])
    closed = False
    if unitary:
        closed = all(
            basis.index_of(p @ q, tol) is not None for p in basis.ops for q in basis.ops
        )
    else:
        notes.append("non-unitary elements; closure not tested")
    if ortho > tol:
        notes.append("not trace-orthonormal")
    nice = unitary and ortho <= tol and traceless and closed and proportional_to_identity(basis.ops[0])
    return BasisValidation(
        orthonormality_residual=ortho,
        unitarity_residuals=unit,
        unitary=unitary,
        normalized=basis.normalized,
        traceless=traceless,
        closed=closed,
        nice=nice,
        notes=notes,
    )


def phase_table(basis: ErrorBasis, tol: float = 1e-9) -> PhaseTable:
    k = len(basis)
    phases = np.full((k, k), np.nan + 0j)
    abelian = True
    for a, va in enumerate(basis.ops):
        for b, vb in enumerate(basis.ops):
            g = va @ vb @ va.conj().T
            c = np.vdot(vb, g) / basis.chi
            if abs(abs(c) - 1) <= tol and np.linalg.norm(g - c * vb) <= tol * np.sqrt(basis.chi):
                phases[b, a] = c / abs(c)
            else:
                abelian = False
    return PhaseTable(chi2=k, phases=phases, abelian=abelian)


def completeness_residual(basis: ErrorBasis, m: np.ndarray) -> float:
    """``|sum_a V_a M V_a^dag - chi tr(M) 1|_F``."""
    acc = sum(v @ m @ v.conj().T for v in basis.ops)
    return float(np.linalg.norm(acc - basis.chi * np.trace(m) * np.eye(basis.chi)))
