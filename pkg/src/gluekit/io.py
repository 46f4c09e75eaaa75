"""JSON interchange: tensors, bases, vectors and reports.

Complex numbers are ``[re, im]`` pairs.  Floats are written with 17
significant digits and object keys sorted, so reports are byte-stable.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .bases import ErrorBasis, clock_shift_basis, pauli_basis, user_basis
from .errors import InvalidArg, InvalidBasis, InvalidTensor
from .mps import MpsTensor


def _fmt_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return "null"
    s = format(x, ".17g")
    if s == "-0":
        s = "0"
    return s


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """``json.dumps`` with sorted keys and fixed 17-digit floats."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(obj[k], indent, _level + 1)}" for k in sorted(obj, key=str)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return dumps([float(obj.real), float(obj.imag)], indent, _level)
    if isinstance(obj, np.ndarray):
        return dumps(encode_array(obj) if np.iscomplexobj(obj) else obj.tolist(), indent, _level)
    if obj is None:
        return "null"
    return json.dumps(str(obj))


def encode_array(arr) -> list:
    arr = np.asarray(arr)
    if arr.ndim == 0:
        c = complex(arr)
        return [c.real, c.imag]
    return [encode_array(x) for x in arr]


def decode_array(obj, what: str = "array") -> np.ndarray:
    try:
        raw = np.asarray(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidArg(f"{what}: entries must be [re, im] pairs ({exc})") from exc
    if raw.ndim < 1 or raw.shape[-1] != 2:
        raise InvalidArg(f"{what}: innermost entries must be [re, im] pairs")
    return raw[..., 0] + 1j * raw[..., 1]


def load_json(path: str | Path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InvalidArg(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidArg(f"{path}: malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def tensor_to_json(a: MpsTensor) -> dict:
    return {"chi": a.chi, "d": a.d, "data": encode_array(a.data)}


def tensor_from_json(obj) -> MpsTensor:
    if not isinstance(obj, dict) or not {"chi", "d", "data"} <= set(obj):
        raise InvalidTensor("tensor JSON needs keys chi, d, data")
    try:
        data = decode_array(obj["data"], "data")
    except InvalidArg as exc:
        raise InvalidTensor(str(exc)) from exc
    chi, d = int(obj["chi"]), int(obj["d"])
    if data.shape != (chi, d, chi):
        raise InvalidTensor(f"data shape {data.shape} does not match chi={chi}, d={d}")
    return MpsTensor(data)


def save_tensor(a: MpsTensor, path: str | Path) -> None:
    Path(path).write_text(dumps(tensor_to_json(a)) + "\n")


def load_tensor(path: str | Path) -> MpsTensor:
    return tensor_from_json(load_json(path))


def basis_to_json(basis: ErrorBasis) -> dict:
    return {"chi": basis.chi, "labels": list(basis.labels), "ops": [encode_array(v) for v in basis.ops]}


def basis_from_json(obj) -> ErrorBasis:
    if not isinstance(obj, dict) or not {"chi", "ops"} <= set(obj):
        raise InvalidBasis("basis JSON needs keys chi, ops")
    ops = [decode_array(v, "ops") for v in obj["ops"]]
    basis = user_basis(ops, obj.get("labels"), gauge_fix=False)
    if basis.chi != int(obj["chi"]):
        raise InvalidBasis("chi does not match operator size")
    return basis


def resolve_basis(name: str) -> ErrorBasis:
    """``pauli``, ``clock:N`` or a path to a basis JSON file."""
    if name == "pauli":
        return pauli_basis()
    if name.startswith("clock:"):
        try:
            n = int(name.split(":", 1)[1])
        except ValueError as exc:
            raise InvalidArg(f"bad clock basis {name!r}") from exc
        return clock_shift_basis(n)
    return basis_from_json(load_json(name))


def parse_complex_list(text: str) -> np.ndarray:
    """Comma-separated Python complex literals, e.g. ``"0,0.5,1j,0.5-0.5j"``."""
    try:
        return np.array([complex(x.strip().replace(" ", "")) for x in text.split(",")])
    except ValueError as exc:
        raise InvalidArg(f"cannot parse complex list {text!r}") from exc


def record_to_json(rec, full: bool = False) -> dict:
    out = {
        "classification": rec.label,
        "steps": len(rec.steps),
        "max_residual": max((s.residual for s in rec.steps), default=0.0),
        "period": rec.period,
        "preperiod": rec.preperiod,
        "trivialize_index": rec.trivialize_index,
    }
    if rec.failure:
        out["failure"] = rec.failure
        out["failure_residual"] = rec.failure_residual
    if full:
        out["sequence"] = [
            {"v_in": s.v_in, "v_out": s.v_out, "u_phys": s.u_phys, "phase": s.phase, "residual": s.residual}
            for s in rec.steps
        ]
    return out


def report_to_json(report, full: bool = False) -> dict:
    return {
        "verdict": report.verdict,
        "canonical_residual": report.canonical_residual,
        "input_canonical_residual": report.input_canonical_residual,
        "basis_preserved": report.basis_preserved,
        "diagnostics": report.diagnostics,
        "entanglement_spectrum": None if report.spectrum is None else [float(x) for x in report.spectrum],
        "correlation_spectrum": None if report.correlation_spectrum is None else report.correlation_spectrum,
        "per_error": {k: record_to_json(v, full) for k, v in report.per_error.items()},
        "notes": list(report.notes),
    }
