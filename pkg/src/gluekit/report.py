"""Plain-text tables and static SVG figures."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .config import DEFAULT, Config
from .mps import MpsTensor, entanglement_spectrum, transfer_matrix


def spectrum_rows(a: MpsTensor, what: str = "both", config: Config = DEFAULT) -> dict:
    """Correlation and/or entanglement spectra as plain lists."""
    if what not in ("correlation", "entanglement", "both"):
        raise ValueError(f"unknown spectrum kind {what!r}")
    out = {}
    if what in ("correlation", "both"):
        tm = transfer_matrix(a, config)
        out["correlation"] = {
            "eigenvalues": tm.eigenvalues,
            "correlation_lengths": [float(x) for x in tm.correlation_lengths()],
            "numerical_rank": tm.numerical_rank,
        }
    if what in ("entanglement", "both"):
        out["entanglement"] = {"values": [float(x) for x in entanglement_spectrum(a, config).values]}
    return out


def _cnum(z: complex) -> str:
    z = complex(z)
    if abs(z.imag) < 5e-13:
        return f"{z.real: .10f}"
    return f"{z.real: .10f}{z.imag:+.10f}i"


def spectrum_table(rows: dict) -> str:
    lines = []
    if "correlation" in rows:
        lines.append("correlation spectrum (rank %d)" % rows["correlation"]["numerical_rank"])
        lines.append(f"{'k':>3}  {'eigenvalue':>30}  {'|lambda|':>14}  {'xi':>12}")
        for k, (lam, xi) in enumerate(zip(rows["correlation"]["eigenvalues"], rows["correlation"]["correlation_lengths"])):
            lines.append(f"{k:>3}  {_cnum(lam):>30}  {abs(lam):>14.10f}  {xi:>12.6g}")
    if "entanglement" in rows:
        lines.append("entanglement spectrum")
        lines.append(f"{'k':>3}  {'Lambda^2':>14}")
        for k, v in enumerate(rows["entanglement"]["values"]):
            lines.append(f"{k:>3}  {v:>14.10f}")
    return "\n".join(lines)


def gluability_table(report) -> str:
    lines = [f"verdict: {report.verdict}", f"{'error':>8}  {'classification':<28} {'steps':>5}  {'max residual':>12}"]
    for label, rec in report.per_error.items():
        res = max((s.residual for s in rec.steps), default=0.0)
        lines.append(f"{label:>8}  {rec.label:<28} {len(rec.steps):>5}  {res:>12.3e}")
    diag = ", ".join(f"{k}={v}" for k, v in sorted(report.diagnostics.items()))
    lines.append(f"basis_preserved={report.basis_preserved}, {diag}")
    return "\n".join(lines)


def plot_spectrum(rows: dict, path: str | Path, title: str = "") -> Path:
    """Write a deterministic SVG of the spectra in ``rows``."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    panels = [k for k in ("correlation", "entanglement") if k in rows]
    with matplotlib.rc_context({"svg.hashsalt": "gluekit", "svg.fonttype": "none", "font.size": 9}):
        fig, axes = plt.subplots(1, len(panels), figsize=(4.0 * len(panels), 3.6), squeeze=False)
        for ax, kind in zip(axes[0], panels):
            if kind == "correlation":
                lam = np.asarray(rows["correlation"]["eigenvalues"], dtype=complex)
                th = np.linspace(0, 2 * np.pi, 361)
                ax.plot(np.cos(th), np.sin(th), color="0.7", lw=0.8)
                ax.scatter(lam.real, lam.imag, s=28, color="C0", zorder=3)
                ax.set_aspect("equal")
                ax.set_xlim(-1.15, 1.15)
                ax.set_ylim(-1.15, 1.15)
                ax.set_xlabel(r"Re $\lambda$")
                ax.set_ylabel(r"Im $\lambda$")
                ax.set_title("transfer-matrix spectrum")
            else:
                vals = rows["entanglement"]["values"]
                ax.bar(np.arange(len(vals)), vals, color="C1")
                ax.set_ylim(0, 1)
                ax.set_xticks(np.arange(len(vals)))
                ax.set_xlabel("k")
                ax.set_ylabel(r"$\Lambda_k^2$")
                ax.set_title("entanglement spectrum")
        if title:
            fig.suptitle(title)
        fig.tight_layout()
        path = Path(path)
        fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})
        plt.close(fig)
    return path
