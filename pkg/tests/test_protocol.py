from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gluekit.bases import clock_shift_basis, pauli_basis, user_basis
from gluekit.builders import aklt, build_example, deformed_cluster, deformed_ghz, deformed_trivial, dipole_spt
from gluekit.config import Config
from gluekit.errors import CorrectionFailed, DimensionMismatch, InvalidArg, TooLarge
from gluekit.mps import MpsTensor, expand_statevector
from gluekit.protocol import (
    bond_rng,
    correction_schedule,
    fidelity,
    make_clusters,
    measure_bonds,
    run_single,
    run_trials,
)

GLUABLE = [
    (deformed_ghz(0.5), pauli_basis()),
    (deformed_cluster(0.5), pauli_basis()),
    (deformed_trivial(0.5), pauli_basis()),
    (aklt(), pauli_basis()),
    (dipole_spt(3, 1, 0.3), clock_shift_basis(3)),
]
IDS = ["ghz", "cluster", "trivial", "aklt", "dipole3"]


@pytest.mark.parametrize("tensor, basis", GLUABLE, ids=IDS)
def test_outcomes_are_uniform(tensor, basis):
    _, trace = run_single(tensor, basis, 4, seed=3)
    for dist in trace.distributions:
        np.testing.assert_allclose(dist, 1 / len(basis), atol=1e-10)


@pytest.mark.parametrize("tensor, basis", GLUABLE, ids=IDS)
def test_identity_outcomes_give_target(tensor, basis):
    n = 4
    state, trace = run_single(tensor, basis, n, seed=0, forced=[0] * (n - 1))
    assert trace.fidelity >= 1 - 1e-12
    for u in trace.corrections:
        assert np.allclose(u / u[0, 0], np.eye(len(u))) or np.linalg.norm(u @ u.conj().T - np.eye(len(u))) < 1e-9


@pytest.mark.parametrize("tensor, basis", GLUABLE, ids=IDS)
@settings(max_examples=10)
@given(data=st.data())
def test_every_outcome_string_is_corrected(tensor, basis, data):
    n = data.draw(st.integers(2, 4))
    forced = data.draw(st.lists(st.integers(0, len(basis) - 1), min_size=n - 1, max_size=n - 1))
    _, trace = run_single(tensor, basis, n, seed=0, forced=forced)
    assert trace.outcomes == forced
    assert trace.fidelity >= 1 - 1e-9


def test_corrections_are_causal():
    # site k only depends on outcomes at bonds < k
    a, b = deformed_cluster(0.4), pauli_basis()
    us1, _ = correction_schedule(a, b, [1, 2, 0, 3])
    us2, _ = correction_schedule(a, b, [1, 2, 3, 0])
    for k in range(3):
        np.testing.assert_allclose(us1[k], us2[k])


def test_cluster_single_error_string():
    a, b = deformed_cluster(0.4), pauli_basis()
    us, _ = correction_schedule(a, b, [1, 0, 0, 0])
    x = np.array([[0, 1], [1, 0]])
    # X pushes to Z with physical X, Z pushes to X with identity
    for k, u in enumerate(us[1:]):
        expected = x if k % 2 == 0 else np.eye(2)
        assert abs(abs(np.trace(u.conj().T @ expected)) - 2) < 1e-9


def test_trivial_single_z_is_local():
    a, b = deformed_trivial(0.4), pauli_basis()
    us, boundary = correction_schedule(a, b, [2, 0, 0])
    assert abs(abs(us[1][0, 0]) - 1) < 1e-9 and abs(us[1][0, 0] + us[1][1, 1]) < 1e-9
    for u in us[2:]:
        assert np.allclose(u / u[0, 0], np.eye(2))
    assert np.allclose(boundary / boundary[0, 0], np.eye(2))


def test_uncorrected_ghz_error_is_wrong():
    a, b = deformed_ghz(0.5), pauli_basis()
    state, trace = measure_bonds(make_clusters(a, 3), b, forced=[1, 0])
    assert trace.outcomes == [1, 0]
    assert fidelity(state, a) < 1 - 1e-3


def test_chi_one():
    a = MpsTensor(np.array([[[1.0], [0.5]]]))
    basis = user_basis([np.eye(1)])
    stats = run_trials(a, basis, 3, trials=4, seed=1)
    assert stats.min_fidelity >= 1 - 1e-12
    assert stats.dof == 0


def test_replay_conditioned_outcomes():
    a, b = deformed_cluster(0.5), pauli_basis()
    state1, trace1 = run_single(a, b, 4, seed=11, trial=2)
    state2, trace2 = run_single(a, b, 4, seed=0, forced=trace1.outcomes)
    np.testing.assert_allclose(state1.amplitudes, state2.amplitudes, atol=1e-12)
    np.testing.assert_allclose(trace1.probs, trace2.probs)


def test_deterministic_streams():
    a, b = deformed_trivial(0.5), pauli_basis()
    s1 = run_trials(a, b, 4, trials=20, seed=5)
    s2 = run_trials(a, b, 4, trials=20, seed=5)
    assert [t.outcomes for t in s1.traces] == [t.outcomes for t in s2.traces]
    assert bond_rng(1, 2, 3).random() == bond_rng(1, 2, 3).random()
    assert bond_rng(1, 2, 3).random() != bond_rng(1, 2, 4).random()


def test_threads_do_not_change_results(monkeypatch):
    a, b = deformed_ghz(0.5), pauli_basis()
    s1 = run_trials(a, b, 4, trials=12, seed=9)
    monkeypatch.setenv("GLUEKIT_THREADS", "4")
    s2 = run_trials(a, b, 4, trials=12, seed=9)
    assert s1.outcome_histogram == s2.outcome_histogram


def test_statistics():
    stats = run_trials(deformed_cluster(0.5), pauli_basis(), 5, trials=200, seed=0)
    assert stats.min_fidelity >= 1 - 1e-9
    assert stats.max_prob_deviation <= 1e-10
    assert sum(stats.outcome_histogram.values()) == 200 * 4
    assert stats.p_value > 1e-3
    assert set(stats.to_report()) >= {"min_fidelity", "chi_square", "outcome_histogram"}


def test_non_canonical_input_is_prepared():
    # GHZ has a degenerate fixed point, so use the cluster chain
    a = deformed_cluster(0.5)
    rng = np.random.default_rng(0)
    # a positive gauge is removed exactly; a general one would also rotate the basis
    m = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    g = m @ m.conj().T + np.eye(2)
    stats = run_trials(a.gauge(g).scaled(2.0), pauli_basis(), 4, trials=10, seed=0)
    assert stats.min_fidelity >= 1 - 1e-9


def test_nogo_fails_early():
    a = build_example("nogo_combined", {"beta": 0.4, "beta_prime": 0.4})
    with pytest.raises(CorrectionFailed):
        run_trials(a, pauli_basis(), 4, trials=5)


def test_errors():
    a = deformed_ghz(0.5)
    with pytest.raises(DimensionMismatch):
        run_trials(a, clock_shift_basis(3), 4, trials=2)
    with pytest.raises(TooLarge):
        run_trials(a, pauli_basis(), 12, trials=1, config=Config(memory_guard=1000))
    with pytest.raises(InvalidArg):
        run_trials(a, pauli_basis(), 1, trials=2)
    with pytest.raises(InvalidArg):
        make_clusters(a, 0)
    state, _ = measure_bonds(make_clusters(a, 2), pauli_basis())
    with pytest.raises(DimensionMismatch):
        fidelity(state, a, target=expand_statevector(a, 3, open_virtual=True))
    with pytest.raises(DimensionMismatch):
        fidelity(make_clusters(a, 2), a)
