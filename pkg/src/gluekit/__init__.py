"""Deterministic preparation of matrix product states by measurement and feedback."""

from .bases import ErrorBasis, clock_shift_basis, pauli_basis, phase_table, tensor_basis, validate
from .builders import aklt, build_example, deformed_cluster, deformed_ghz, deformed_trivial, dipole_spt, nogo_combined
from .classify import (
    commutant,
    dipole_push_rules,
    from_t_vector,
    gluable_family,
    mu_to_t,
    spt_diagnostics,
    t_to_mu,
)
from .config import Config
from .errors import GluekitError, NoPush
from .mps import (
    MpsTensor,
    definite_form,
    entanglement_spectrum,
    expand_statevector,
    normalize,
    right_canonicalize,
    transfer_matrix,
    two_point_correlator,
)
from .protocol import make_clusters, measure_bonds, run_trials
from .push import gluability_check, index_group, nogo_check, push_once, push_sequence

__version__ = "0.1.0"

__all__ = [
    "Config",
    "ErrorBasis",
    "GluekitError",
    "MpsTensor",
    "NoPush",
    "aklt",
    "build_example",
    "clock_shift_basis",
    "commutant",
    "definite_form",
    "deformed_cluster",
    "deformed_ghz",
    "deformed_trivial",
    "dipole_push_rules",
    "dipole_spt",
    "entanglement_spectrum",
    "expand_statevector",
    "from_t_vector",
    "gluability_check",
    "gluable_family",
    "index_group",
    "make_clusters",
    "measure_bonds",
    "mu_to_t",
    "nogo_check",
    "nogo_combined",
    "normalize",
    "pauli_basis",
    "phase_table",
    "push_once",
    "push_sequence",
    "right_canonicalize",
    "run_trials",
    "spt_diagnostics",
    "t_to_mu",
    "tensor_basis",
    "transfer_matrix",
    "two_point_correlator",
    "validate",
]
