"""Versioned JSON and CSV I/O for instances, bound reports and spin-boson sweeps."""

from __future__ import annotations

import csv
import io
import json
import math
from importlib import resources

import jsonschema
import numpy as np

from ._validation import ValidationError
from .bounds import REPORT_COLUMNS, BoundReport
from .dynamics import DephasingModel, Instance

__all__ = [
    "SCHEMA_VERSION",
    "SWEEP_HEADER",
    "instance_schema",
    "instance_from_dict",
    "instance_to_dict",
    "load_instance",
    "dump_instance",
    "reports_to_json",
    "reports_from_json",
    "reports_to_csv",
    "sweep_to_csv",
    "read_versioned_csv",
    "complex_to_json",
    "complex_from_json",
]

SCHEMA_VERSION = "1.0"
SWEEP_HEADER = "s,T_over_Lambda,alpha,Lambda_t,B_vac,B_th,B,raw_bound,clamped_bound"
_VERSION_LINE = f"# schema_version={SCHEMA_VERSION}"


def instance_schema() -> dict:
    text = resources.files("dephasent").joinpath("schemas/instance.schema.json").read_text()
    return json.loads(text)


def complex_to_json(a) -> dict:
    a = np.asarray(a, dtype=complex)
    return {"re": a.real.tolist(), "im": a.imag.tolist()}


def complex_from_json(d, name="matrix") -> np.ndarray:
    re, im = np.asarray(d["re"], dtype=float), np.asarray(d["im"], dtype=float)
    if re.shape != im.shape or re.ndim != 2:
        raise ValidationError(f"{name}: re and im must be equal-shape 2-D arrays")
    return re + 1j * im


def _check_version(found):
    if found != SCHEMA_VERSION:
        raise ValidationError(f"schema_version {found!r} does not match the supported {SCHEMA_VERSION!r}")


def instance_from_dict(d: dict) -> Instance:
    """Validate against the shipped schema, then against the physics invariants."""
    if isinstance(d, dict) and "schema_version" in d:
        _check_version(d["schema_version"])
    try:
        jsonschema.validate(d, instance_schema())
    except jsonschema.ValidationError as exc:
        raise ValidationError(f"instance does not match schema: {exc.message}") from exc
    d_s, d_e = d["d_S"], d["d_E"]
    h_e = complex_from_json(d["H_E"], "H_E")
    vs = tuple(complex_from_json(v, f"V[{i}]") for i, v in enumerate(d["V"]))
    rho_s = complex_from_json(d["rho_S"], "rho_S")
    rho_e = complex_from_json(d["rho_E"], "rho_E")
    if len(d["pointer_energies"]) != d_s or rho_s.shape != (d_s, d_s):
        raise ValidationError("d_S disagrees with pointer_energies or rho_S")
    if h_e.shape != (d_e, d_e) or rho_e.shape != (d_e, d_e):
        raise ValidationError("d_E disagrees with H_E or rho_E")
    model = DephasingModel(np.asarray(d["pointer_energies"], dtype=float), h_e, vs)
    povm = None
    if "povm" in d:
        povm = tuple(complex_from_json(m, f"povm[{i}]") for i, m in enumerate(d["povm"]))
    return Instance(model, rho_s, rho_e, tuple(float(t) for t in d["times"]), povm)


def instance_to_dict(inst: Instance) -> dict:
    m = inst.model
    out = {
        "schema_version": SCHEMA_VERSION,
        "d_S": m.d_S,
        "d_E": m.d_E,
        "pointer_energies": m.pointer_energies.tolist(),
        "H_E": complex_to_json(m.env_hamiltonian),
        "V": [complex_to_json(v) for v in m.couplings],
        "rho_S": complex_to_json(inst.rho_S),
        "rho_E": complex_to_json(inst.rho_E),
        "times": list(inst.times),
    }
    if inst.povm is not None:
        out["povm"] = [complex_to_json(x) for x in inst.povm]
    return out


def load_instance(path) -> Instance:
    with open(path) as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: malformed JSON ({exc})") from exc
    return instance_from_dict(d)


def dump_instance(inst: Instance, path):
    with open(path, "w") as fh:
        json.dump(instance_to_dict(inst), fh, indent=1)


def _jsonable(x):
    if isinstance(x, float) and not math.isfinite(x):
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    return x


def reports_to_json(reports, extra=None) -> str:
    payload = {
        "schema_version": SCHEMA_VERSION,
        "columns": list(REPORT_COLUMNS),
        "reports": [{k: _jsonable(v) for k, v in r.to_dict().items()} for r in reports],
    }
    if extra:
        payload.update(extra)
    return json.dumps(payload, indent=1)


def reports_from_json(text: str):
    d = json.loads(text)
    _check_version(d.get("schema_version"))
    out = []
    for r in d["reports"]:
        r = {k: (float(v) if isinstance(v, str) and k not in ("povm_strategy",) else v) for k, v in r.items()}
        out.append(BoundReport(**r))
    return out


def _csv_text(header: str, rows) -> str:
    buf = io.StringIO()
    buf.write(_VERSION_LINE + "\n")
    buf.write(header + "\n")
    w = csv.writer(buf, lineterminator="\n")
    for row in rows:
        w.writerow(["" if v is None else (repr(float(v)) if isinstance(v, (float, np.floating)) else v) for v in row])
    return buf.getvalue()


def reports_to_csv(reports) -> str:
    """One row per report, columns in ``REPORT_COLUMNS`` order; empty cells for absent values."""
    return _csv_text(",".join(REPORT_COLUMNS), (r.row() for r in reports))


def sweep_to_csv(rows) -> str:
    """Rows of ``(s, T/Lambda, alpha, Lambda t, B_vac, B_th, B, raw, clamped)``."""
    return _csv_text(SWEEP_HEADER, rows)


def read_versioned_csv(text: str):
    """Parse a CSV written by this module into ``(header, rows)``; version mismatch is an error."""
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# schema_version="):
        raise ValidationError("missing schema_version line")
    _check_version(lines[0].split("=", 1)[1].strip())
    reader = csv.reader(lines[1:])
    header = next(reader)
    return header, [row for row in reader]
