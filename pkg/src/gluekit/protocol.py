"""Statevector simulation of the measure-and-correct preparation protocol.

Each cluster is the three-qudit state ``A / sqrt(chi)`` on legs
``(l_x, p_x, r_x)``.  Measuring ``(r_x, l_{x+1})`` in the error basis and
finding outcome ``a`` inserts ``conj(V_a)`` on the bond.  Errors are swept to
the right: at each site the accumulated virtual operator is pushed through
``A``, the physical unitary it leaves behind is undone, and the remainder is
cancelled on the right boundary qudit.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .bases import ErrorBasis
from .config import DEFAULT, Config
from .errors import (
    CorrectionFailed,
    DegenerateMeasurement,
    DimensionMismatch,
    InvalidArg,
    NoPush,
    TooLarge,
)
from .linalg import phase_fix
from .mps import MpsTensor, canonical_residual, expand_statevector, to_right_canonical
from .push import push_once


@dataclass
class ChainState:
    """State of the register; ``legs`` names each remaining qudit as ``(kind, site)``."""

    n_clusters: int
    chi: int
    d: int
    amplitudes: np.ndarray
    legs: list

    @property
    def dims(self) -> tuple:
        return tuple(self.d if kind == "p" else self.chi for kind, _ in self.legs)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.dims)

    def axis(self, kind: str, site: int) -> int:
        return self.legs.index((kind, site))


@dataclass
class ProtocolTrace:
    outcomes: list = field(default_factory=list)
    probs: list = field(default_factory=list)
    distributions: list = field(default_factory=list)
    corrections: list = field(default_factory=list)
    boundary: np.ndarray | None = None
    fidelity: float = float("nan")


@dataclass
class TrialStats:
    n: int
    trials: int
    seed: int
    traces: list
    min_fidelity: float
    mean_fidelity: float
    chi_square: float
    dof: int
    p_value: float
    outcome_histogram: dict
    max_prob_deviation: float

    def to_report(self) -> dict:
        return {
            "n": self.n,
            "trials": self.trials,
            "seed": self.seed,
            "min_fidelity": self.min_fidelity,
            "mean_fidelity": self.mean_fidelity,
            "chi_square": self.chi_square,
            "dof": self.dof,
            "outcome_histogram": self.outcome_histogram,
        }


def bond_rng(seed: int, trial: int, bond: int) -> np.random.Generator:
    """Counter-based stream keyed by ``(seed, trial, bond)``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, trial, bond])))


def _cluster(a: MpsTensor) -> np.ndarray:
    return a.data / np.sqrt(a.chi)


def _guard(size: int, config: Config) -> None:
    if size > config.memory_guard:
        raise TooLarge(f"{size} amplitudes exceed the memory guard {config.memory_guard}")


def make_clusters(a: MpsTensor, n: int, config: Config = DEFAULT) -> ChainState:
    """Product of ``n`` decoupled clusters, legs ordered ``l_1, p_1, r_1, l_2, ...``."""
    if n < 1:
        raise InvalidArg("need at least one cluster")
    _guard((a.chi**2 * a.d) ** n, config)
    c = _cluster(a).reshape(-1)
    c = c / np.linalg.norm(c)
    psi = c
    for _ in range(n - 1):
        psi = np.kron(psi, c)
    legs = [(kind, x) for x in range(1, n + 1) for kind in ("l", "p", "r")]
    return ChainState(n, a.chi, a.d, psi, legs)


def _append_cluster(state: ChainState, a: MpsTensor) -> ChainState:
    c = _cluster(a).reshape(-1)
    x = state.n_clusters + 1
    return ChainState(x, state.chi, state.d, np.kron(state.amplitudes, c / np.linalg.norm(c)),
                      state.legs + [("l", x), ("p", x), ("r", x)])


def _measure_bond(state: ChainState, basis: ErrorBasis, bond: int, rng, forced: int | None):
    """Measure ``(r_bond, l_bond+1)``; returns the new state, outcome, its probability and all probabilities."""
    psi = state.tensor()
    ax_r, ax_l = state.axis("r", bond), state.axis("l", bond + 1)
    proj = basis.stacked().conj() / np.sqrt(basis.chi)
    amps = np.tensordot(proj, psi, axes=([1, 2], [ax_r, ax_l]))
    flat = amps.reshape(len(basis), -1)
    probs = np.sum(np.abs(flat) ** 2, axis=1)
    total = probs.sum()
    if total < 1e-14 or probs.max() < 1e-14:
        raise DegenerateMeasurement(f"all outcome probabilities vanish at bond {bond}")
    probs = probs / total
    if forced is None:
        alpha = int(np.searchsorted(np.cumsum(probs), rng.random() * probs.sum(), side="right"))
        alpha = min(alpha, len(probs) - 1)
        while probs[alpha] <= 0:
            alpha -= 1
    else:
        alpha = int(forced)
        if probs[alpha] < 1e-14:
            raise DegenerateMeasurement(f"forced outcome {alpha} has zero probability at bond {bond}")
    out = flat[alpha] / np.linalg.norm(flat[alpha])
    out[np.abs(out) < 1e-300] = 0
    legs = [leg for leg in state.legs if leg not in (("r", bond), ("l", bond + 1))]
    new = ChainState(state.n_clusters, state.chi, state.d, out, legs)
    return new, alpha, float(probs[alpha]), probs


def measure_bonds(
    state: ChainState, basis: ErrorBasis, rng_seed: int = 0, forced=None, trial: int = 0
) -> tuple[ChainState, ProtocolTrace]:
    """Measure every bond left to right with Born-rule sampling (or forced outcomes)."""
    if basis.chi != state.chi:
        raise DimensionMismatch("basis and chain bond dimensions differ")
    trace = ProtocolTrace()
    for bond in range(1, state.n_clusters):
        f = None if forced is None else forced[bond - 1]
        state, alpha, p, dist = _measure_bond(state, basis, bond, bond_rng(rng_seed, trial, bond), f)
        trace.outcomes.append(alpha)
        trace.probs.append(p)
        trace.distributions.append(dist)
    return state, trace


class _PushCache:
    """Memoized :func:`push_once` keyed on the phase-fixed operator."""

    def __init__(self, a: MpsTensor, config: Config):
        self.a, self.config, self.store = a, config, {}

    def __call__(self, v: np.ndarray):
        fixed, ph = phase_fix(v)
        key = np.round(fixed, 10).tobytes()
        if key not in self.store:
            self.store[key] = push_once(self.a, fixed, self.config, check=False)
        step = self.store[key]
        return step.phase * ph, step.u_phys, step.v_out


def correction_schedule(a: MpsTensor, basis: ErrorBasis, outcomes, engine=None, config: Config = DEFAULT):
    """Per-site physical corrections and the boundary operator for given outcomes.

    The correction at site ``k`` depends only on outcomes at bonds ``< k``.
    """
    engine = engine or _PushCache(a, config)
    n = len(outcomes) + 1
    e = np.eye(a.chi, dtype=complex)
    us = []
    for k in range(n):
        try:
            _, u, e_next = engine(e)
        except NoPush as exc:
            raise CorrectionFailed(f"accumulated error does not push at site {k + 1}: {exc}") from exc
        us.append(u.conj().T)
        e = e_next if k == n - 1 else e_next @ basis.ops[outcomes[k]].conj()
    return us, e.conj()


def _apply(psi: np.ndarray, op: np.ndarray, axis: int) -> np.ndarray:
    return np.moveaxis(np.tensordot(op, psi, axes=([1], [axis])), 0, axis)


def correct(
    state: ChainState, outcomes, basis: ErrorBasis, a: MpsTensor, engine=None, config: Config = DEFAULT
) -> tuple[ChainState, list, np.ndarray]:
    """Apply the swept corrections to a fully measured chain."""
    us, boundary = correction_schedule(a, basis, outcomes, engine, config)
    psi = state.tensor()
    for k, u in enumerate(us, start=1):
        psi = _apply(psi, u, state.axis("p", k))
    psi = _apply(psi, boundary, state.axis("r", state.n_clusters))
    return ChainState(state.n_clusters, state.chi, state.d, psi.reshape(-1), list(state.legs)), us, boundary


def fidelity(state: ChainState, a: MpsTensor, config: Config = DEFAULT, target: np.ndarray | None = None) -> float:
    """``|<target|state>|^2`` against the open-virtual chain ``(l_1, p_1..p_n, r_n)``."""
    n = state.n_clusters
    expected = [("l", 1)] + [("p", k) for k in range(1, n + 1)] + [("r", n)]
    if state.legs != expected:
        raise DimensionMismatch("state still has unmeasured bonds or a different layout")
    if target is None:
        target = expand_statevector(a, n, open_virtual=True, config=config)
    if target.shape != state.amplitudes.shape:
        raise DimensionMismatch("state and target dimensions differ")
    return float(abs(np.vdot(target, state.amplitudes)) ** 2 / state.norm**2)


def _prepare(a: MpsTensor, config: Config) -> MpsTensor:
    if canonical_residual(a) > config.canonical_tol:
        a, _, _ = to_right_canonical(a, config)
    return a


def run_single(
    a: MpsTensor, basis: ErrorBasis, n: int, seed: int, trial: int = 0, forced=None,
    engine=None, target=None, config: Config = DEFAULT,
) -> tuple[ChainState, ProtocolTrace]:
    """One trial.  Clusters are appended one at a time and each bond is
    measured as soon as both its qudits exist, which keeps the register small;
    the outcome statistics equal those of measuring the full product state."""
    a = _prepare(a, config)
    if basis.chi != a.chi:
        raise DimensionMismatch("basis and tensor bond dimensions differ")
    _guard(a.chi**4 * a.d**(n + 1), config)
    engine = engine or _PushCache(a, config)
    state = make_clusters(a, 1, config)
    trace = ProtocolTrace()
    for bond in range(1, n):
        state = _append_cluster(state, a)
        f = None if forced is None else forced[bond - 1]
        state, alpha, p, dist = _measure_bond(state, basis, bond, bond_rng(seed, trial, bond), f)
        trace.outcomes.append(alpha)
        trace.probs.append(p)
        trace.distributions.append(dist)
    state, us, boundary = correct(state, trace.outcomes, basis, a, engine, config)
    trace.corrections = us
    trace.boundary = boundary
    trace.fidelity = fidelity(state, a, config, target)
    return state, trace


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("GLUEKIT_THREADS", "1")))
    except ValueError:
        return 1


def run_trials(
    a: MpsTensor, basis: ErrorBasis, n: int, trials: int, seed: int = 0, config: Config = DEFAULT
) -> TrialStats:
    """Monte Carlo over independent trials with aggregate fidelity and outcome statistics."""
    if n < 2 or trials < 1:
        raise InvalidArg("need n >= 2 sites and at least one trial")
    a = _prepare(a, config)
    if basis.chi != a.chi:
        raise DimensionMismatch("basis and tensor bond dimensions differ")
    _guard(a.chi**4 * a.d**(n + 1), config)
    engine = _PushCache(a, config)
    # fail early (exit code 3) when the basis does not push at all
    for v in basis.ops:
        try:
            engine(v.conj())
        except NoPush as exc:
            raise CorrectionFailed(f"measurement error does not push: {exc}") from exc
    target = expand_statevector(a, n, open_virtual=True, config=config)

    def one(t):
        return run_single(a, basis, n, seed, t, engine=engine, target=target, config=config)[1]

    workers = min(_threads(), trials)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            traces = list(pool.map(one, range(trials)))
    else:
        traces = [one(t) for t in range(trials)]
    fids = np.array([tr.fidelity for tr in traces])
    k = len(basis)
    counts = np.zeros(k, dtype=int)
    dev = 0.0
    for tr in traces:
        for alpha, dist in zip(tr.outcomes, tr.distributions):
            counts[alpha] += 1
            dev = max(dev, float(np.max(np.abs(dist - 1.0 / k))))
    if k > 1 and counts.sum() > 0:
        res = stats.chisquare(counts)
        chi2, pval = float(res.statistic), float(res.pvalue)
    else:
        chi2, pval = 0.0, 1.0
    return TrialStats(
        n=n,
        trials=trials,
        seed=seed,
        traces=traces,
        min_fidelity=float(fids.min()),
        mean_fidelity=float(fids.mean()),
        chi_square=chi2,
        dof=k - 1,
        p_value=pval,
        outcome_histogram={label: int(c) for label, c in zip(basis.labels, counts)},
        max_prob_deviation=dev,
    )
