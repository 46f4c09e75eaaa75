"""Acceptance suite: one PASS/FAIL line per criterion.

Runs under pytest (lines go straight to the terminal) or as a script:
``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))
import oracles  # noqa: E402

from gluekit.bases import clock_shift_basis, pauli_basis  # noqa: E402
from gluekit.builders import (  # noqa: E402
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    aklt,
    build_example,
    deformed_cluster,
    deformed_ghz,
    deformed_trivial,
    dipole_spt,
)
from gluekit.classify import (  # noqa: E402
    from_t_vector,
    gluable_family,
    mu_to_t,
    sequences_from_report,
    t_to_mu,
    t_transfer_residual,
)
from gluekit.linalg import equal_up_to_phase  # noqa: E402
from gluekit.mps import entanglement_spectrum, expand_statevector, transfer_matrix, two_point_correlator  # noqa: E402
from gluekit.protocol import run_trials  # noqa: E402
from gluekit.push import LOCAL, gluability_check, push_once  # noqa: E402

BETAS = (0.25, 0.5, 1.0)
I2 = np.eye(2)
CRITERIA = {}


def criterion(k, title):
    def wrap(fn):
        CRITERIA[k] = (title, fn)
        return fn

    return wrap


def _sorted(vals):
    # round only to fix the order; compare the raw values
    vals = np.asarray(vals, dtype=complex)
    key = np.round(vals, 8)
    return vals[np.lexsort((key.imag, key.real))]


def _spectrum_gap(actual, expected):
    return float(np.max(np.abs(_sorted(actual) - _sorted(expected))))


@criterion(1, "correlation spectra match closed forms")
def check_correlation_spectra():
    worst = 0.0
    for b in BETAS:
        t = np.tanh(2 * b)
        cases = [
            (deformed_ghz(b), [1, 1, t, t]),
            (deformed_cluster(b), [1, np.sqrt(t), -np.sqrt(t), -t]),
            (deformed_trivial(b), [1, t, 0, 0]),
        ]
        for a, ref in cases:
            worst = max(worst, _spectrum_gap(transfer_matrix(a).eigenvalues, ref))
    return worst <= 1e-9, f"max eigenvalue error {worst:.2e}"


@criterion(2, "entanglement spectra")
def check_entanglement_spectra():
    worst = 0.0
    for b in BETAS:
        for a in (deformed_ghz(b), deformed_cluster(b)):
            worst = max(worst, float(np.max(np.abs(entanglement_spectrum(a).values - 0.5))))
        delta = 1 / np.cosh(2 * b)
        ref = np.array([(1 + delta) / 2, (1 - delta) / 2])
        worst = max(worst, float(np.max(np.abs(entanglement_spectrum(deformed_trivial(b)).values - ref))))
    return worst <= 1e-9, f"max Schmidt error {worst:.2e}"


@criterion(3, "push tables")
def check_push_tables():
    table = [
        (deformed_ghz, PAULI_X, PAULI_X, PAULI_X),
        (deformed_ghz, PAULI_Z, PAULI_Z, I2),
        (deformed_cluster, PAULI_X, PAULI_Z, PAULI_X),
        (deformed_cluster, PAULI_Z, PAULI_X, I2),
        (deformed_trivial, PAULI_X, PAULI_X, PAULI_X),
        (deformed_trivial, PAULI_Z, I2, PAULI_Z),
    ]
    ok, worst = True, 0.0
    for b in BETAS:
        for build, v, v_out, u in table:
            s = push_once(build(b), v)
            worst = max(worst, s.residual)
            ok &= equal_up_to_phase(s.v_out, v_out) and equal_up_to_phase(s.phase * s.u_phys, u)
    return ok and worst <= 1e-9, f"{len(table) * len(BETAS)} pushes, max residual {worst:.2e}"


@criterion(4, "gluability verdicts")
def check_verdicts():
    cases = [
        (deformed_ghz(0.5), pauli_basis(), "right_gluable"),
        (deformed_cluster(0.5), pauli_basis(), "right_gluable"),
        (deformed_trivial(0.5), pauli_basis(), "right_gluable"),
        (aklt(), pauli_basis(), "right_gluable"),
        (dipole_spt(3, 1, 0.3), clock_shift_basis(3), "right_gluable"),
    ]
    got = [gluability_check(a, b).verdict == v for a, b, v in cases]
    nogo = gluability_check(build_example("nogo_combined", {"beta": 0.4, "beta_prime": 0.4}), pauli_basis())
    ok = all(got) and nogo.verdict == "not_gluable" and nogo.diagnostics["nogo_triggered"]
    return ok, f"{sum(got)}/5 gluable, nogo verdict {nogo.verdict}"


@criterion(5, "protocol simulation")
def check_protocol():
    cases = {
        "ghz": (deformed_ghz(0.5), pauli_basis()),
        "cluster": (deformed_cluster(0.5), pauli_basis()),
        "trivial": (deformed_trivial(0.5), pauli_basis()),
        "aklt": (aklt(), pauli_basis()),
        "dipole3": (dipole_spt(3, 1, 0.3), clock_shift_basis(3)),
    }
    ok, parts = True, []
    for seed, (name, (a, basis)) in enumerate(cases.items()):
        st = run_trials(a, basis, 6, 200, seed=seed)
        ok &= st.min_fidelity >= 1 - 1e-9 and st.max_prob_deviation <= 1e-9 and st.p_value >= 1e-3
        parts.append(f"{name} F={st.min_fidelity:.12f} p={st.p_value:.3f}")
    return ok, "; ".join(parts)


@criterion(6, "classifier")
def check_classifier():
    b = pauli_basis()
    fam = gluable_family(b)
    sigma_pairs = [np.kron(s, s) for s in (I2, PAULI_X, PAULI_Y, PAULI_Z)]
    span_res = max(fam.commutant.projection_residual(m) for m in sigma_pairs)
    indep = np.linalg.matrix_rank(np.array([m.ravel() for m in sigma_pairs])) == 4
    rng = np.random.default_rng(2024)
    verdicts, t_res = 0, 0.0
    for _ in range(200):
        t = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        a = from_t_vector(b, t)
        verdicts += gluability_check(a, b).verdict == "right_gluable"
        t_res = max(t_res, t_transfer_residual(b, t, a))
    ok = fam.commutant.dim == 4 and span_res <= 1e-9 and indep and verdicts == 200 and t_res <= 1e-10
    return ok, f"dim {fam.commutant.dim}, span residual {span_res:.1e}, {verdicts}/200 gluable, T residual {t_res:.1e}"


@criterion(7, "t/mu conversion")
def check_t_mu():
    rng = np.random.default_rng(7)
    bases = [pauli_basis(), clock_shift_basis(3), clock_shift_basis(4)]
    worst = 0.0
    for k in range(100):
        basis = bases[k % len(bases)]
        mu = rng.standard_normal(len(basis)) + 1j * rng.standard_normal(len(basis))
        worst = max(worst, float(np.max(np.abs(t_to_mu(basis, mu_to_t(basis, mu)) - mu))))
    beta = 0.5
    c, s = np.cosh(beta) / 2, np.sinh(beta) / 2
    # sigma-order (1, X, Y, Z) with mu_y = -mu_x; the ZX slot carries -mu_y
    mu_sigma = np.array([c, s, -s, c])
    mu_basis = np.array([mu_sigma[0], mu_sigma[1], mu_sigma[3], -mu_sigma[2]])
    t = mu_to_t(pauli_basis(), mu_basis)
    t = t / np.linalg.norm(t)
    ref = np.array([np.exp(beta), 0, np.exp(-beta), 0]) / np.sqrt(2 * np.cosh(2 * beta))
    ghz_err = float(np.max(np.abs(t - ref)))
    back = t_to_mu(pauli_basis(), ref)
    back_err = float(np.max(np.abs(back / back[0] - mu_basis / mu_basis[0])))
    ok = worst <= 1e-10 and ghz_err <= 1e-9 and back_err <= 1e-9
    return ok, f"round trip {worst:.1e}, GHZ t error {ghz_err:.1e} (t1={t[0].real:.7f}), inverse {back_err:.1e}"


@criterion(8, "statevector oracles")
def check_oracles():
    worst = 1.0
    for n in range(2, 9):
        pairs = [
            (expand_statevector(deformed_ghz(0.4), n), oracles.ghz(0.4, n)),
            (expand_statevector(deformed_cluster(0.3), n), oracles.cluster_with_tail(0.3, n)),
            (expand_statevector(deformed_trivial(0.6), n), oracles.ising_chain(0.6, n)),
            (expand_statevector(build_example("nogo_combined", {"beta": 0.4, "beta_prime": 0.3}), n),
             oracles.nogo(0.4, 0.3, n)),
        ]
        if n <= 6:
            pairs.append((expand_statevector(dipole_spt(3, 1, 0.3), n), oracles.dipole(n, 3, 1, 0.3)))
            lv, rv = np.array([1.0, 0.3]), np.array([0.2, 1.0])
            pairs.append((expand_statevector(aklt(), n, left=lv, right=rv), oracles.aklt_valence_bond(n, lv, rv)))
        worst = min(worst, min(oracles.overlap(p, q) for p, q in pairs))
    zz = two_point_correlator(deformed_ghz(0.5), PAULI_Z, PAULI_Z, 3).real
    zz_err = abs(zz - 1 / np.cosh(1.0) ** 2)
    return worst >= 1 - 1e-9 and zz_err <= 1e-7, f"min overlap {worst:.12f}, <ZZ> error {zz_err:.1e}"


@criterion(9, "property suites (flatness, rank deficiency)")
def check_properties():
    rng = np.random.default_rng(99)
    flat_checked, flat_bad = 0, 0
    samplers = [(gluable_family(pauli_basis()), pauli_basis(), 40), (gluable_family(clock_shift_basis(3)),
                clock_shift_basis(3), 30)]
    for fam, basis, count in samplers:
        for _ in range(count):
            rep = gluability_check(fam.sample(rng), basis)
            if all(r.topological for r in rep.per_error.values()) and rep.basis_preserved:
                flat_checked += 1
                flat_bad += bool(np.ptp(rep.spectrum) > 1e-8)
    for _ in range(40):
        t = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        rep = gluability_check(from_t_vector(pauli_basis(), t), pauli_basis())
        if all(r.topological for r in rep.per_error.values()) and rep.basis_preserved:
            flat_checked += 1
            flat_bad += bool(np.ptp(rep.spectrum) > 1e-8)

    basis = pauli_basis()
    local_fam = gluable_family(basis, sequences_from_report(gluability_check(deformed_trivial(0.5), basis)))
    rank_checked, rank_bad = 0, 0
    for _ in range(110):
        a = local_fam.sample(rng)
        rep = gluability_check(a, basis)
        if any(r.classification == LOCAL for r in rep.per_error.values()):
            rank_checked += 1
            rank_bad += transfer_matrix(a).numerical_rank >= basis.chi**2
    ok = flat_checked >= 100 and flat_bad == 0 and rank_checked >= 100 and rank_bad == 0
    return ok, (f"flat: {flat_checked - flat_bad}/{flat_checked}; "
                f"rank-deficient: {rank_checked - rank_bad}/{rank_checked}")


def run(k: int) -> tuple[bool, str]:
    title, fn = CRITERIA[k]
    try:
        ok, detail = fn()
    except Exception as exc:  # a crash is a failure, not an abort
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    line = f"{'PASS' if ok else 'FAIL'} criterion {k}: {title} ({detail})"
    return ok, line


@pytest.mark.parametrize("k", sorted(CRITERIA))
def test_criterion(k, capsys):
    ok, line = run(k)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [run(k) for k in sorted(CRITERIA)]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
