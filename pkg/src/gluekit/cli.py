"""Command-line driver.

Exit codes: 0 success, 1 input error, 2 domain precondition,
3 protocol/correction failure, 4 resource guard.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import io
from .builders import EXAMPLES, build_example
from .classify import (
    basis_to_sigma_t,
    from_t_vector,
    gluable_family,
    mu_to_t,
    normalized_t,
    sigma_to_basis_t,
    t_to_mu,
    t_transfer_residual,
)
from .config import Config
from .errors import GluekitError, InvalidArg
from .protocol import run_trials
from .push import gluability_check, nogo_check
from .report import gluability_table, plot_spectrum, spectrum_rows, spectrum_table


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _emit(obj, path: str | None) -> None:
    text = io.dumps(obj) + "\n"
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_example(args, config: Config) -> int:
    params = {k: v for k, v in (("beta", args.beta), ("beta_prime", args.beta_prime), ("N", args.N), ("eta", args.eta))
              if v is not None}
    if args.name in ("deformed_ghz", "deformed_cluster", "deformed_trivial", "nogo_combined", "dipole_spt"):
        params.setdefault("beta", 0.0)
    if args.name == "nogo_combined":
        params.setdefault("beta_prime", params["beta"])
    a = build_example(args.name, params)
    _emit(io.tensor_to_json(a), args.emit)
    return 0


def cmd_analyze(args, config: Config) -> int:
    a = io.load_tensor(args.input)
    basis = io.resolve_basis(args.basis)
    report = gluability_check(a, basis, args.max_depth, config)
    out = io.report_to_json(report, args.full)
    if report.spectrum is not None:
        out["nogo"] = vars(nogo_check(a, config))
    if not args.quiet:
        sys.stderr.write(gluability_table(report) + "\n")
    _emit(out, args.output)
    return 0


def _basis_t(basis, values, sigma: bool) -> np.ndarray:
    if sigma:
        if basis.chi != 2:
            raise InvalidArg("--sigma-order applies to the Pauli basis only")
        return sigma_to_basis_t(values)
    return values


def cmd_classify(args, config: Config) -> int:
    basis = io.resolve_basis(args.basis)
    out = {"basis": list(basis.labels), "chi": basis.chi}
    tensor = None
    if args.t or args.mu:
        if args.t:
            t = normalized_t(_basis_t(basis, io.parse_complex_list(args.t), args.sigma_order))
            mu = t_to_mu(basis, t)
        else:
            mu = io.parse_complex_list(args.mu)
            t = normalized_t(mu_to_t(basis, mu))
            mu = t_to_mu(basis, t)
        tensor = from_t_vector(basis, t)
        out["t"] = t
        out["mu"] = mu
        if args.sigma_order and basis.chi == 2:
            out["t_sigma_order"] = basis_to_sigma_t(t)
        out["transfer_residual"] = t_transfer_residual(basis, t, tensor)
        out["verdict"] = gluability_check(tensor, basis, config=config).verdict
    else:
        seqs = None
        if args.sequences:
            raw = io.load_json(args.sequences)
            seqs = [[io.decode_array(v, "sequences") for v in seq] for seq in raw["sequences"]]
        fam = gluable_family(basis, seqs)
        out["commutant_dim"] = fam.commutant.dim
        out["generator_residual"] = fam.commutant.max_commutator()
        rng = np.random.default_rng(config.seed if args.seed is None else args.seed)
        verdicts = []
        for _ in range(args.samples):
            a = fam.sample(rng)
            verdicts.append(gluability_check(a, basis, config=config).verdict)
            tensor = a
        if args.samples:
            out["sample_verdicts"] = verdicts
    if args.emit and tensor is not None:
        io.save_tensor(tensor, args.emit)
        out["emitted"] = str(args.emit)
    _emit(out, args.output)
    return 0


def cmd_simulate(args, config: Config) -> int:
    a = io.load_tensor(args.input)
    basis = io.resolve_basis(args.basis)
    seed = config.seed if args.seed is None else args.seed
    stats = run_trials(a, basis, args.sites, args.trials, seed, config)
    _emit(stats.to_report(), args.output)
    return 0 if stats.min_fidelity >= 1 - 1e-9 else 3


def cmd_spectrum(args, config: Config) -> int:
    a = io.load_tensor(args.input)
    rows = spectrum_rows(a, args.what, config)
    sys.stdout.write(spectrum_table(rows) + "\n")
    if args.plot:
        plot_spectrum(rows, args.plot, title=Path(args.input).stem)
    if args.output:
        _emit(rows, args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gluekit", description="Gluability analysis and preparation-protocol simulation for MPS.")
    p.add_argument("--config", help="JSON file overriding tolerances and limits")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ex = sub.add_parser("example", help="build a named example tensor")
    ex.add_argument("name", choices=EXAMPLES)
    ex.add_argument("--beta", type=float)
    ex.add_argument("--beta-prime", dest="beta_prime", type=float)
    ex.add_argument("--N", type=int)
    ex.add_argument("--eta", type=int)
    ex.add_argument("--emit", help="output path (default: stdout)")
    ex.set_defaults(func=cmd_example)

    an = sub.add_parser("analyze", help="gluability verdict for a tensor and basis")
    an.add_argument("--input", required=True)
    an.add_argument("--basis", default="pauli", help="pauli, clock:N or a basis JSON file")
    an.add_argument("--max-depth", dest="max_depth", type=int)
    an.add_argument("--full", action="store_true", help="include push-step matrices")
    an.add_argument("--output")
    an.add_argument("--quiet", action="store_true", help="suppress the table on stderr")
    an.set_defaults(func=cmd_analyze)

    cl = sub.add_parser("classify", help="gluable families, t/mu constructions")
    cl.add_argument("--basis", default="pauli")
    mode = cl.add_mutually_exclusive_group()
    mode.add_argument("--uniform", action="store_true")
    mode.add_argument("--sequences")
    mode.add_argument("--t")
    mode.add_argument("--mu")
    cl.add_argument("--sigma-order", dest="sigma_order", action="store_true",
                    help="read Pauli t as (1, X, Y, Z) coefficients")
    cl.add_argument("--samples", type=int, default=0)
    cl.add_argument("--seed", type=int)
    cl.add_argument("--emit", help="write the constructed (or last sampled) tensor")
    cl.add_argument("--output")
    cl.set_defaults(func=cmd_classify)

    si = sub.add_parser("simulate", help="Monte Carlo of the measurement-and-feedback protocol")
    si.add_argument("--input", required=True)
    si.add_argument("--basis", default="pauli")
    si.add_argument("--sites", type=int, default=6)
    si.add_argument("--trials", type=int, default=200)
    si.add_argument("--seed", type=int)
    si.add_argument("--output")
    si.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("spectrum", help="correlation and entanglement spectra")
    sp.add_argument("--input", required=True)
    sp.add_argument("--what", choices=("correlation", "entanglement", "both"), default="both")
    sp.add_argument("--plot", help="write an SVG figure")
    sp.add_argument("--output", help="write the spectra as JSON")
    sp.set_defaults(func=cmd_spectrum)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = Config.load(args.config) if args.config else Config()
        return args.func(args, config)
    except GluekitError as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
