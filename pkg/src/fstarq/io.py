"""Deterministic CSV and JSON serialization.

CSV uses '.' decimals, '\\n' line endings and a header row.  JSON is UTF-8
with insertion-ordered keys and floats printed to 17 significant digits,
which round-trips IEEE doubles exactly; two runs of the same build produce
byte-identical output.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .genvalue import ResidualReport
from .phasespace import Field, PhaseGrid, field_from_values, integrate


def format_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError("cannot serialize non-finite numbers")
    return format(float(x), ".17g")


def canonical_json(obj) -> str:
    """Serialize with stable key order and 17-significant-digit floats."""
    out: list[str] = []
    _write_json(obj, out)
    return "".join(out) + "\n"


def _write_json(obj, out: list[str]) -> None:
    if obj is None:
        out.append("null")
    elif isinstance(obj, bool):
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(format_float(float(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, item in enumerate(obj):
            if i:
                out.append(", ")
            _write_json(item, out)
        out.append("]")
    elif isinstance(obj, dict):
        out.append("{")
        for i, (key, val) in enumerate(obj.items()):
            if i:
                out.append(", ")
            out.append(json.dumps(str(key), ensure_ascii=False))
            out.append(": ")
            _write_json(val, out)
        out.append("}")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


# ---------------------------------------------------------------------------
# Grid / field serialization


def grid_to_dict(grid: PhaseGrid) -> dict:
    return {
        "q_min": grid.q_min, "q_max": grid.q_max,
        "p_min": grid.p_min, "p_max": grid.p_max,
        "n_q": grid.n_q, "n_p": grid.n_p,
        "hbar": grid.hbar, "offset": grid.offset,
    }


def field_to_csv(field: Field, path) -> None:
    """Write rows q, p, re, im in row-major (q outer) order."""
    qs = field.grid.q_values()
    ps = field.grid.p_values()
    lines = ["q,p,re,im"]
    vals = field.values
    for iq in range(field.grid.n_q):
        fq = format_float(qs[iq])
        row = vals[iq]
        for ip in range(field.grid.n_p):
            v = row[ip]
            lines.append(f"{fq},{format_float(ps[ip])},"
                         f"{format_float(v.real)},{format_float(v.imag)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_field_csv(path, hbar: float = 1.0, label: str = "") -> Field:
    """Rebuild a Field from its CSV export.

    The grid is reconstructed from the sample coordinates themselves (with
    offset 0, since the written coordinates already include any shift).
    """
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln for ln in text.split("\n") if ln]
    if lines[0] != "q,p,re,im":
        raise ValueError(f"unexpected CSV header {lines[0]!r}")
    data = np.array([[float(tok) for tok in ln.split(",")] for ln in lines[1:]])
    qs = np.unique(data[:, 0])
    ps = np.unique(data[:, 1])
    n_q, n_p = len(qs), len(ps)
    if n_q * n_p != len(data):
        raise ValueError("CSV rows do not form a complete rectangular grid")
    grid = PhaseGrid(float(qs[0]), float(qs[-1]), float(ps[0]), float(ps[-1]),
                     n_q, n_p, hbar=hbar, offset=0.0)
    vals = (data[:, 2] + 1j * data[:, 3]).reshape(n_q, n_p)
    return field_from_values(grid, vals, label=label)


def field_report(field: Field) -> dict:
    """Plot-free JSON summary of a field: grid, label, value statistics."""
    vals = field.values
    total = integrate(field)
    return {
        "grid": grid_to_dict(field.grid),
        "label": field.label,
        "stats": {
            "re_min": float(vals.real.min()), "re_max": float(vals.real.max()),
            "im_min": float(vals.imag.min()), "im_max": float(vals.imag.max()),
            "abs_max": float(np.abs(vals).max()),
            "integral_re": float(total.real), "integral_im": float(total.imag),
        },
    }


def spectrum_to_csv(rows, path=None) -> str:
    lines = ["n,energy"]
    for row in rows:
        lines.append(f"{row.n},{format_float(row.energy)}")
    text = "\n".join(lines) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


# ---------------------------------------------------------------------------
# Residual reports


def report_to_dict(report: ResidualReport) -> dict:
    params = dict(report.params)
    grid = params.pop("grid", None)
    doc = {
        "identity": report.identity_name,
        "spec": params.pop("spec", None),
        "n": params.pop("n", None),
        "hbar": params.pop("hbar", None),
        "omega": params.pop("omega", None),
        "order": params.pop("order", None),
        "max_abs": report.max_abs,
        "l2": report.l2,
        "imag_max": report.imag_max,
        "witness": {
            "q": report.witness.q, "p": report.witness.p,
            "re": report.witness.value.real, "im": report.witness.value.imag,
        },
        "grid": grid_to_dict(grid) if grid is not None else None,
    }
    if params:
        doc["extra"] = {k: params[k] for k in sorted(params)}
    return doc


def report_to_json(report: ResidualReport, path=None) -> str:
    text = canonical_json(report_to_dict(report))
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text
