"""Constructing gluable tensors from an error basis.

Conventions: a push ``V -> V'`` constrains the definite-form tensor to
commute with ``conj(V) kron V'`` (row-major virtual pairs).  For abelian
bases the definite form is ``sum_a mu_a conj(V_a) kron V_a``, whose
eigenvalue on ``vec(conj V_b)`` is ``sum_a mu_a conj(chi_{b,a})``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd

import numpy as np

from .bases import ErrorBasis, PhaseTable, clock_shift_basis, phase_table
from .builders import clock, shift
from .config import DEFAULT, Config
from .errors import (
    ConversionFailed,
    EmptyFamily,
    InvalidArg,
    NonAbelianBasis,
    NotCoprime,
    NotUniform,
    RuleViolation,
)
from .linalg import equal_up_to_phase, null_space, psd_sqrt
from .mps import DefiniteFormTensor, MpsTensor, normalize, transfer_matrix
from .push import UNIFORM, GluabilityReport, PushRecord, _closure, gluability_check, push_sequence


@dataclass(frozen=True)
class CommutantBasis:
    dim: int
    generators_checked: tuple
    basis: tuple

    def max_commutator(self) -> float:
        worst = 0.0
        for b in self.basis:
            for s in self.generators_checked:
                worst = max(worst, float(np.linalg.norm(b @ s - s @ b)))
        return worst

    def projection_residual(self, m: np.ndarray) -> float:
        """Distance from ``m`` to the span of the basis (Frobenius)."""
        coeffs = [np.vdot(b, m) for b in self.basis]
        return float(np.linalg.norm(m - sum(c * b for c, b in zip(coeffs, self.basis))))


@dataclass
class GluableFamily:
    commutant: CommutantBasis
    chi: int
    pairs: list = field(default_factory=list)

    def sample_definite(self, rng: np.random.Generator) -> np.ndarray:
        """Random PSD element ``|H|`` with ``H`` a random Hermitian commutant element."""
        k = self.commutant.dim
        coef = rng.standard_normal(k) + 1j * rng.standard_normal(k)
        m = sum(c * b for c, b in zip(coef, self.commutant.basis))
        h = 0.5 * (m + m.conj().T)
        return psd_sqrt(h @ h)

    def sample(self, rng: np.random.Generator | int | None = None) -> MpsTensor:
        rng = np.random.default_rng(rng)
        q = self.sample_definite(rng)
        return normalize(DefiniteFormTensor(self.chi, q).as_tensor())


def commutant(mats, tol: float = 1e-9) -> CommutantBasis:
    """Joint commutant of square matrices via the null space of stacked commutator maps."""
    mats = [np.asarray(m, dtype=complex) for m in mats]
    if not mats:
        raise InvalidArg("need at least one generator")
    dim = mats[0].shape[0]
    if any(m.shape != (dim, dim) for m in mats):
        raise InvalidArg("generators must be square with equal dimensions")
    ident = np.eye(dim)
    # row-major vec(S X - X S) = (S kron 1 - 1 kron S^T) vec(X)
    stacked = np.concatenate([np.kron(s, ident) - np.kron(ident, s.T) for s in mats], axis=0)
    vecs, _ = null_space(stacked, tol)
    basis = tuple(vecs[:, k].reshape(dim, dim) for k in range(vecs.shape[1]))
    return CommutantBasis(dim=len(basis), generators_checked=tuple(mats), basis=basis)


def pair_generator(v: np.ndarray, v_next: np.ndarray) -> np.ndarray:
    return np.kron(np.conj(v), v_next)


def uniform_sequences(basis: ErrorBasis) -> list:
    return [[v, v] for v in basis.ops]


def sequences_from_report(report: GluabilityReport) -> list:
    """Per-error operator lists long enough to cover every consecutive pair."""
    recs = list(report.per_error.values())
    if not all(r.resolved for r in recs):
        raise InvalidArg("report has unresolved push sequences")
    depth = max((r.preperiod or 0) + (r.period or 1) + len(r.steps) for r in recs)
    return [[r.v_at(n) for n in range(depth + 1)] for r in recs]


def gluable_family(basis: ErrorBasis, sequences=None, tol: float = 1e-9) -> GluableFamily:
    """Definite-form tensors for which every sequence pushes as given.

    Args:
        basis: the error basis (only its dimension is used when sequences are given).
        sequences: per-error lists ``V^{[0]}, V^{[1]}, ...`` covering a full
            period; ``None`` means every error is uniform (``V -> V``).
    """
    seqs = uniform_sequences(basis) if sequences is None else sequences
    pairs = []
    for seq in seqs:
        for v, w in zip(seq[:-1], seq[1:]):
            g = pair_generator(v, w)
            if not any(np.allclose(g, p, atol=tol) for p in pairs):
                pairs.append(g)
    comm = commutant(pairs, tol)
    if comm.dim <= 1:
        raise EmptyFamily("commutant contains only multiples of the identity")
    return GluableFamily(commutant=comm, chi=basis.chi, pairs=pairs)


def _require_abelian(basis: ErrorBasis) -> PhaseTable:
    table = phase_table(basis)
    if not table.abelian:
        raise NonAbelianBasis("basis elements do not commute up to phase")
    return table


def normalized_t(t) -> np.ndarray:
    t = np.asarray(t, dtype=complex).reshape(-1)
    nrm = np.linalg.norm(t)
    if nrm == 0:
        raise InvalidArg("t-vector must be non-zero")
    return t / nrm


def from_t_vector(basis: ErrorBasis, t) -> MpsTensor:
    """``A^a = t_a V_a`` with physical dimension ``chi^2`` (``t`` normalized first)."""
    _require_abelian(basis)
    t = normalized_t(t)
    if len(t) != len(basis):
        raise InvalidArg(f"t-vector needs {len(basis)} entries")
    return MpsTensor.from_matrices(t[:, None, None] * basis.stacked())


def sigma_to_basis_t(t_sigma) -> np.ndarray:
    """Pauli coefficients in the order (1, X, Y, Z) to the basis order (1, X, Z, ZX).

    Uses ``ZX = iY`` so the coefficient of ``ZX`` is ``-i t_Y``.
    """
    t1, tx, ty, tz = np.asarray(t_sigma, dtype=complex)
    return np.array([t1, tx, tz, -1j * ty])


def basis_to_sigma_t(t_basis) -> np.ndarray:
    t1, tx, tz, tzx = np.asarray(t_basis, dtype=complex)
    return np.array([t1, tx, 1j * tzx, tz])


def conversion_matrix(basis: ErrorBasis) -> np.ndarray:
    """``K[b, a] = chi * conj(chi_{b,a})`` so that ``t = K mu``."""
    table = _require_abelian(basis)
    return basis.chi * table.phases.conj()


def mu_to_t(basis: ErrorBasis, mu) -> np.ndarray:
    mu = np.asarray(mu, dtype=complex)
    return conversion_matrix(basis) @ mu


def t_to_mu(basis: ErrorBasis, t) -> np.ndarray:
    k = conversion_matrix(basis)
    if np.linalg.cond(k) > 1e10:
        raise ConversionFailed("phase matrix is singular")
    return np.linalg.solve(k, np.asarray(t, dtype=complex))


def definite_from_mu(basis: ErrorBasis, mu) -> np.ndarray:
    return sum(m * np.kron(v.conj(), v) for m, v in zip(mu, basis.ops))


def t_transfer_residual(basis: ErrorBasis, t, a: MpsTensor | None = None) -> float:
    """``|T - sum_a |t_a|^2 V_a kron conj(V_a)|_F`` for the tensor built from ``t``."""
    t = normalized_t(t)
    a = from_t_vector(basis, t) if a is None else a
    expected = sum(abs(c) ** 2 * np.kron(v, v.conj()) for c, v in zip(t, basis.ops))
    return float(np.linalg.norm(transfer_matrix(a).matrix - expected))


@dataclass(frozen=True)
class SptReport:
    short_range_entangled: bool
    abelian: bool
    projective_phases: np.ndarray
    center_order: int
    nontrivial_projective: bool
    verdict: str
    group_order: int


def spt_diagnostics(
    a: MpsTensor, basis: ErrorBasis, report: GluabilityReport | None = None, config: Config = DEFAULT
) -> SptReport:
    report = gluability_check(a, basis, config=config) if report is None else report
    if report.verdict != "right_gluable" or not all(r.classification == UNIFORM for r in report.per_error.values()):
        raise NotUniform("SPT diagnostics need every error to be uniform topological")
    eig = transfer_matrix(a, config).eigenvalues
    sre = int(np.sum(np.abs(eig) >= abs(eig[0]) * (1 - 1e-9))) == 1
    table = phase_table(basis)
    phases = table.phases
    if table.abelian:
        trivial = np.abs(phases - 1) <= 1e-9
        center = int(np.sum(np.all(trivial, axis=0)))
        nontrivial = not bool(np.all(trivial))
    else:
        center, nontrivial = 0, True
    if not sre:
        verdict = "withheld_long_range_entangled"
    elif table.abelian and nontrivial:
        verdict = "nontrivial_spt"
    elif table.abelian:
        verdict = "trivial"
    else:
        verdict = "undetermined_non_abelian"
    order = len(_closure([np.kron(v, v.conj()) for v in basis.ops]))
    return SptReport(
        short_range_entangled=sre,
        abelian=table.abelian,
        projective_phases=phases,
        center_order=center,
        nontrivial_projective=nontrivial,
        verdict=verdict,
        group_order=order,
    )


@dataclass(frozen=True)
class DipoleRules:
    physical_rule_residual: float
    physical_rule_phase: complex
    virtual_rule_residual: float
    records: dict
    generated_order: int


def dipole_push_rules(a: MpsTensor, n: int, eta: int, config: Config = DEFAULT, tol: float = 1e-9) -> DipoleRules:
    """Check the two defining relations of the dipole chain and its correctability.

    Relations (virtual operators on the left/right legs):
      physical ``X^dag``  =  ``(Z^dag)^eta X`` on the left, ``X^dag Z^eta`` on the right;
      ``(Z^dag)^eta X`` on the left  =  ``omega^-eta`` ``X`` on the left, ``X^dag`` on the right.
    The rearranged operators ``(Z^dag)^eta X^dag`` and ``(Z^dag)^eta`` must push and,
    together with their images, generate all ``N^2`` clock-shift operators.
    """
    if gcd(eta, n) != 1:
        raise NotCoprime(f"gcd(eta={eta}, N={n}) != 1")
    if a.chi != n or a.d != n:
        raise InvalidArg("tensor dimensions do not match N")
    x, z = shift(n), clock(n)
    xd, zd = x.conj().T, z.conj().T
    omega = np.exp(2j * np.pi / n)
    mats = a.matrices()
    left = np.linalg.matrix_power(zd, eta) @ x
    right = xd @ np.linalg.matrix_power(z, eta)

    lhs = a.apply_physical(xd).matrices()
    rhs = np.einsum("ab,sbc,cd->sad", left, mats, right)
    phase = np.vdot(rhs, lhs) / max(np.vdot(rhs, rhs).real, 1e-300)
    phase = phase / abs(phase) if abs(phase) > 0 else 1.0
    r1 = float(np.linalg.norm(lhs - phase * rhs))

    lhs2 = np.einsum("ab,sbc->sac", left, mats)
    rhs2 = omega ** (-eta) * np.einsum("ab,sbc,cd->sad", x, mats, xd)
    r2 = float(np.linalg.norm(lhs2 - rhs2))
    if r1 > tol or r2 > tol:
        raise RuleViolation(f"dipole relations fail (residuals {r1:.3g}, {r2:.3g})")

    ops = {
        "ZdagEta_X": left,
        "ZdagEta_Xdag": np.linalg.matrix_power(zd, eta) @ xd,
        "ZdagEta": np.linalg.matrix_power(zd, eta),
    }
    records = {k: push_sequence(a, v, config=config) for k, v in ops.items()}
    gens = []
    for name, rec in records.items():
        if not rec.resolved:
            raise RuleViolation(f"{name} does not push: {rec.failure}")
        gens.extend(s.v_in for s in rec.steps)
        gens.extend(s.v_out for s in rec.steps)
    order = len(_closure(gens, limit=4 * n**2))
    if order != n * n:
        raise RuleViolation(f"pushed operators generate {order} elements, expected {n * n}")
    cs = clock_shift_basis(n)
    if not all(cs.index_of(g) is not None for g in _closure(gens, limit=4 * n**2)):
        raise RuleViolation("generated operators leave the clock-shift group")
    return DipoleRules(
        physical_rule_residual=r1,
        physical_rule_phase=complex(phase),
        virtual_rule_residual=r2,
        records=records,
        generated_order=order,
    )
