"""Pushing virtual operators through a tensor and the gluability verdict.

A virtual operator ``V`` on the left leg pushes through ``A`` when

    V A^s = phase * sum_s' U[s, s'] A^s' V'

for a physical unitary ``U`` and virtual unitary ``V'``.  Writing
``m_s = vec(A^s)`` and ``C = sum_s m_s m_s^dag``, this holds for some unitary
``U`` exactly when ``G = V kron conj(V')`` commutes with ``C`` (the frames
``{G m_s}`` and ``{m_s}`` then share a frame operator).  The condition is
linear in ``conj(V')``, so candidates come from a null space and ``U``
from an orthogonal Procrustes fit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import lcm

import numpy as np

from .bases import ErrorBasis, gram_residual, validate
from .config import DEFAULT, Config
from .errors import CanonicalizationFailed, NoPush, NotCanonical, NotUniform, NotUnitary
from .linalg import equal_up_to_phase, nearest_unitary, null_space, phase_fix, proportional_to_identity
from .mps import (
    MpsTensor,
    canonical_residual,
    right_canonicalize,
    to_right_canonical,
    transfer_matrix,
    transfer_operator,
)

LOCAL = "local"
UNIFORM = "topological_uniform"
PERIODIC = "topological_periodic"
UNRESOLVED = "unresolved"


@dataclass(frozen=True)
class PushStep:
    """One application of the push relation; ``V A^s = phase * sum U A V'``."""

    v_in: np.ndarray
    v_out: np.ndarray
    u_phys: np.ndarray
    phase: complex
    residual: float
    vttv_residual: float = 0.0
    site_residual: float = 0.0


@dataclass
class PushRecord:
    steps: list
    classification: str
    period: int | None = None
    preperiod: int | None = None
    trivialize_index: int | None = None
    failure: str | None = None
    failure_residual: float | None = None

    @property
    def label(self) -> str:
        if self.classification == PERIODIC:
            return f"{PERIODIC}({self.period})"
        if self.classification == UNRESOLVED and self.failure:
            return f"{UNRESOLVED}(failed)"
        return self.classification

    @property
    def resolved(self) -> bool:
        return self.classification in (LOCAL, UNIFORM, PERIODIC)

    @property
    def topological(self) -> bool:
        return self.classification in (UNIFORM, PERIODIC)

    def _index(self, n: int) -> int | None:
        """Step index holding ``V^{[n]}`` as ``v_in``, or None once trivialized."""
        if n < len(self.steps):
            return n
        if self.classification == LOCAL:
            return None
        if self.period:
            k = self.preperiod + (n - self.preperiod) % self.period
            return k
        raise IndexError("sequence not resolved beyond the recorded steps")

    def v_at(self, n: int) -> np.ndarray:
        """``V^{[n]}`` extended by periodicity (identity after trivialization)."""
        k = self._index(n)
        if k is None:
            return np.eye(self.steps[0].v_in.shape[0], dtype=complex)
        return self.steps[k].v_in

    def u_at(self, n: int) -> np.ndarray:
        k = self._index(n)
        if k is None:
            d = self.steps[0].u_phys.shape[0]
            return np.eye(d, dtype=complex)
        return self.steps[k].phase * self.steps[k].u_phys


@dataclass(frozen=True)
class NogoResult:
    nonflat: bool
    fullrank: bool
    nogo: bool


@dataclass
class GluabilityReport:
    verdict: str
    per_error: dict
    canonical_residual: float
    basis_preserved: bool
    diagnostics: dict
    input_canonical_residual: float = 0.0
    spectrum: np.ndarray | None = None
    correlation_spectrum: np.ndarray | None = None
    notes: list = field(default_factory=list)


def _check_canonical(a: MpsTensor, config: Config) -> None:
    res = canonical_residual(a)
    if res > config.canonical_tol:
        raise NotCanonical(f"tensor is not right-canonical (residual {res:.3g})")


def _frame_operator(a: MpsTensor) -> np.ndarray:
    m = a.physical_matrix()
    return m.T @ m.conj()


def _commutator_map(c: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Matrix of ``Y -> [C, V kron Y]`` on row-major ``vec(Y)``."""
    chi = v.shape[0]
    cols = []
    for k in range(chi * chi):
        y = np.zeros(chi * chi, dtype=complex)
        y[k] = 1.0
        g = np.kron(v, y.reshape(chi, chi))
        cols.append((c @ g - g @ c).reshape(-1))
    return np.stack(cols, axis=1)


def _fit_physical(a: MpsTensor, v: np.ndarray, vp: np.ndarray, rank_tol: float) -> np.ndarray:
    """Procrustes fit of ``U`` with ``V A^s V'^dag = sum U[s, s'] A^s'``.

    Fitted on the support of the physical leg, identity on the complement.
    """
    m = a.physical_matrix()
    target = np.einsum("ab,sbc,dc->sad", v, a.matrices(), vp.conj()).reshape(a.d, -1)
    uu, s, _ = np.linalg.svd(m, full_matrices=False)
    q = uu[:, s > rank_tol * max(s[0], 1.0)]
    ur = nearest_unitary((q.conj().T @ target) @ (q.conj().T @ m).conj().T)
    return q @ ur @ q.conj().T + (np.eye(a.d) - q @ q.conj().T)


def vttv_residual(a: MpsTensor, v: np.ndarray, vp: np.ndarray, t: np.ndarray | None = None) -> float:
    """``|(V kron conj V) T - T (V' kron conj V')|_F``."""
    t = transfer_operator(a) if t is None else t
    return float(np.linalg.norm(np.kron(v, v.conj()) @ t - t @ np.kron(vp, vp.conj())))


def site_residual(a: MpsTensor, v: np.ndarray, u: np.ndarray, vp: np.ndarray, phase: complex = 1.0) -> float:
    """``sqrt(sum_s |V A^s - phase sum_s' U[s, s'] A^s' V'|^2)``."""
    lhs = np.einsum("ab,sbc->sac", v, a.matrices())
    rhs = phase * np.einsum("st,tab,bc->sac", u, a.matrices(), vp)
    return float(np.linalg.norm(lhs - rhs))


def push_once(a: MpsTensor, v: np.ndarray, config: Config = DEFAULT, check: bool = True) -> PushStep:
    """Push the virtual unitary ``v`` from the left leg of ``a`` to its right leg.

    Raises:
        NoPush: no unitary ``V'`` satisfies the push relation; carries the best residual.
    """
    v = np.asarray(v, dtype=complex)
    if check:
        _check_canonical(a, config)
        if v.shape != (a.chi, a.chi) or np.linalg.norm(v.conj().T @ v - np.eye(a.chi)) > 1e-9:
            raise NotUnitary("virtual operator must be a chi x chi unitary")
    c = _frame_operator(a)
    scale = max(np.linalg.norm(c), 1.0)

    def comm(y):
        g = np.kron(v, y)
        return np.linalg.norm(c @ g - g @ c) / scale

    # conj(V') candidates: identity first (local), then V itself (uniform)
    candidates = [np.eye(a.chi, dtype=complex), v.conj()]
    chosen = next((y for y in candidates if comm(y) <= config.push_tol), None)
    if chosen is None:
        nulls, sv = null_space(_commutator_map(c, v), config.factor_tol)
        if nulls.shape[1]:
            proj = nulls @ (nulls.conj().T @ v.conj().reshape(-1))
            if np.linalg.norm(proj) > 1e-8:
                candidates.append(nearest_unitary(proj.reshape(a.chi, a.chi)))
            rng = np.random.default_rng(config.seed)
            coef = rng.standard_normal(nulls.shape[1]) + 1j * rng.standard_normal(nulls.shape[1])
            candidates.append(nearest_unitary((nulls @ coef).reshape(a.chi, a.chi)))
        chosen = next((y for y in candidates[2:] if comm(y) <= config.push_tol), None)
        if chosen is None:
            best = min(comm(y) for y in candidates)
            raise NoPush(
                f"no virtual unitary satisfies the push relation (residual {best:.3g}, "
                f"null directions {nulls.shape[1]})",
                best,
            )
    vp, _ = phase_fix(chosen.conj())
    u = _fit_physical(a, v, vp, config.rank_tol)
    u, phase = phase_fix(u)
    r_t = vttv_residual(a, v, vp)
    r_s = site_residual(a, v, u, vp, phase)
    res = max(r_t, r_s)
    if res > config.push_tol:
        raise NoPush(f"push relation fails verification (residual {res:.3g})", res)
    return PushStep(v_in=v, v_out=vp, u_phys=u, phase=phase, residual=res, vttv_residual=r_t, site_residual=r_s)


def push_sequence(a: MpsTensor, v: np.ndarray, max_depth: int | None = None, config: Config = DEFAULT) -> PushRecord:
    """Iterate :func:`push_once` until the sequence trivializes or repeats."""
    max_depth = config.max_depth if max_depth is None else max_depth
    _check_canonical(a, config)
    v = np.asarray(v, dtype=complex)
    history = [v]
    steps = []
    identity_in = proportional_to_identity(v)
    for depth in range(max_depth):
        try:
            step = push_once(a, history[-1], config, check=depth == 0)
        except NoPush as exc:
            return PushRecord(steps, UNRESOLVED, failure=str(exc), failure_residual=exc.residual)
        steps.append(step)
        out = step.v_out
        if not identity_in and proportional_to_identity(out):
            return PushRecord(steps, LOCAL, trivialize_index=depth)
        for j, prev in enumerate(history):
            if equal_up_to_phase(out, prev):
                period = len(history) - j
                if period == 1 and j == 0:
                    return PushRecord(steps, UNIFORM, period=1, preperiod=0)
                return PushRecord(steps, PERIODIC, period=period, preperiod=j)
        history.append(out)
    return PushRecord(steps, UNRESOLVED)


def nogo_check(a: MpsTensor, config: Config = DEFAULT) -> NogoResult:
    """Non-flat Schmidt spectrum together with a full-rank transfer matrix."""
    lam2 = right_canonicalize(a, config).spectrum.values
    nonflat = bool(lam2.max() - lam2.min() > config.flat_tol)
    fullrank = transfer_matrix(a, config).numerical_rank == a.chi**2
    return NogoResult(nonflat=nonflat, fullrank=fullrank, nogo=nonflat and fullrank)


def _basis_preserved(records: list, chi: int, tol: float) -> bool:
    if not all(r.resolved for r in records):
        return False
    periods = [r.period for r in records if r.period]
    depth = max([r.preperiod or 0 for r in records] + [len(r.steps) for r in records])
    depth += lcm(*periods) if periods else 1
    for n in range(depth + 1):
        ops = [r.v_at(n) for r in records]
        flat = np.stack(ops).reshape(len(ops), -1)
        if np.linalg.norm(flat.conj() @ flat.T - chi * np.eye(len(ops))) > tol:
            return False
    return True


def gluability_check(
    a: MpsTensor, basis: ErrorBasis, max_depth: int | None = None, config: Config = DEFAULT
) -> GluabilityReport:
    """Push every basis element and decide right-gluability.

    Non-canonical input is first brought to right-canonical form with the
    Hermitian gauge ``sqrt(R)``; canonical input is used as is so the basis
    keeps its meaning.  Never raises for domain failures: non-minimal input
    gives an ``inconclusive`` verdict.
    """
    notes = []
    input_res = canonical_residual(a)
    diagnostics = {"flat_spectrum": False, "correlation_zeros": False, "nogo_triggered": False}
    if basis.chi != a.chi:
        return GluabilityReport("inconclusive", {}, input_res, False, diagnostics, input_res,
                                notes=[f"basis chi {basis.chi} != tensor chi {a.chi}"])
    check = validate(basis)
    if not check.unitary or check.orthonormality_residual > 1e-9:
        return GluabilityReport("inconclusive", {}, input_res, False, diagnostics, input_res,
                                notes=["basis is not a unitary error basis"])
    try:
        work = a
        if input_res > config.canonical_tol:
            work, _, _ = to_right_canonical(a, config)
            notes.append("input was gauged to right-canonical form")
        cf = right_canonicalize(work, config)
        tm = transfer_matrix(work, config)
    except CanonicalizationFailed as exc:
        return GluabilityReport("inconclusive", {}, input_res, False, diagnostics, input_res,
                                notes=[f"non-minimal or singular input: {exc}"])
    lam2 = cf.spectrum.values
    flat = bool(lam2.max() - lam2.min() <= config.flat_tol)
    zeros = tm.numerical_rank < a.chi**2
    diagnostics = {"flat_spectrum": flat, "correlation_zeros": zeros, "nogo_triggered": (not flat) and not zeros}
    if cf.degenerate:
        diagnostics["degenerate_fixed_point"] = True
    records = {label: push_sequence(work, v, max_depth, config) for label, v in zip(basis.labels, basis.ops)}
    recs = list(records.values())
    if any(r.failure for r in recs):
        verdict = "not_gluable"
    elif all(r.resolved for r in recs):
        verdict = "right_gluable"
    else:
        verdict = "inconclusive"
        notes.append("some push sequences did not resolve within max_depth")
    preserved = _basis_preserved(recs, a.chi, 1e-8 * a.chi**2)
    return GluabilityReport(
        verdict=verdict,
        per_error=records,
        canonical_residual=canonical_residual(work),
        basis_preserved=preserved,
        diagnostics=diagnostics,
        input_canonical_residual=input_res,
        spectrum=lam2,
        correlation_spectrum=tm.eigenvalues,
        notes=notes,
    )


def left_gluability_check(
    a: MpsTensor, basis: ErrorBasis, max_depth: int | None = None, config: Config = DEFAULT
) -> GluabilityReport:
    """Mirror-image check: right-gluability of the chain with virtual legs swapped."""
    return gluability_check(a.reversed(), basis, max_depth, config)


@dataclass(frozen=True)
class IndexGroup:
    order: int
    abelian: bool
    generators: dict
    virtual: dict
    long_range_entangled: bool


def _closure(gens: list, limit: int = 4096) -> list:
    elems = [np.eye(gens[0].shape[0], dtype=complex)]
    frontier = list(elems)
    while frontier:
        nxt = []
        for g in frontier:
            for h in gens:
                p = g @ h
                if not any(equal_up_to_phase(p, e) for e in elems):
                    elems.append(p)
                    nxt.append(p)
                    if len(elems) > limit:
                        raise NotUniform("index group closure exceeds the size limit")
        frontier = nxt
    return elems


def index_group(report: GluabilityReport, basis: ErrorBasis) -> IndexGroup:
    """Group generated by ``V_a kron conj(V_a)`` with the physical symmetries ``U_a``."""
    if report.verdict != "right_gluable" or not all(r.classification == UNIFORM for r in report.per_error.values()):
        raise NotUniform("index group needs every error to be uniform topological")
    gens = [np.kron(v, v.conj()) for v in basis.ops]
    elems = _closure(gens)
    abelian = all(np.allclose(g @ h, h @ g, atol=1e-9) for g in elems for h in elems)
    us, virt = {}, {}
    for label, rec in report.per_error.items():
        u = rec.steps[0].phase * rec.steps[0].u_phys
        us[label] = u
        virt[label] = proportional_to_identity(u)
    lre = any(virt[label] for label in basis.labels[1:])
    return IndexGroup(order=len(elems), abelian=abelian, generators=us, virtual=virt, long_range_entangled=lre)
