"""Serialization of results as JSON documents, plain text and LaTeX."""

from __future__ import annotations

import json
from importlib import resources

from .pipeline import PhiResult, TheoremReport, interior_coefficients, interior_part
from .scalar import ExactScalar

__all__ = [
    "SCHEMA_VERSION",
    "load_schema",
    "phi_payload",
    "theorem_payload",
    "verify_payload",
    "oracle_payload",
    "interior_payload",
    "to_json",
    "to_text",
    "to_latex",
    "envelope",
    "latex_scalar",
    "parse_latex_exact",
]

SCHEMA_VERSION = 1
_SUB = str.maketrans("0123456789", "₀₁₂₃₄₅₆₇₈₉")


def load_schema() -> dict:
    text = resources.files("kkwcalc").joinpath("report.schema.json").read_text()
    return json.loads(text)


def _num(z: complex) -> list:
    """Fixed-precision pair so output stays byte-stable."""
    z = complex(z)
    return [f"{z.real:.12e}", f"{z.imag:.12e}"]


def _fl(x: float) -> str:
    return f"{x:.6e}"


def _table(table: dict) -> dict:
    return {k: v.to_text() for k, v in sorted(table.items())}


def phi_payload(r: PhiResult) -> dict:
    c = r.case
    return {
        "case": c.index,
        "orders": {"r": c.r, "l": c.l, "alpha": c.alpha, "j": c.j, "k": c.k},
        "prefactor": c.prefactor().to_text(),
        "total": r.total.to_text(),
        "rendered": r.rendered().to_text() if r.table or not r.total else r.total.to_text(),
        "table": _table(r.table),
    }


def interior_payload() -> dict:
    c1, c2 = interior_coefficients(4)
    return {
        "coefficients": {"ric_minus_half_sg": c1.to_text(), "sg": c2.to_text()},
        "expression": interior_part(4).to_text(),
    }


def _diff_payload(row) -> dict:
    out = {
        "row": row.row,
        "slot": row.slot,
        "engine": row.engine.to_text(),
        "reference_coefficient": row.reference_coefficient,
        "reference": row.reference.to_text(),
        "readings": {k: v.to_text() for k, v in sorted(row.candidates.items())},
        "verdict": row.verdict,
        "matched_readings": list(row.matched_readings),
    }
    if row.oracle is not None:
        o = row.oracle
        out["oracle"] = {
            "value": _num(o["oracle"]),
            "engine_residual": _fl(o["engine_residual"]),
            "supports_engine": bool(o["supports_engine"]),
            "supports_reference": list(o["supports_reference"]),
            "verdict": o["verdict"],
        }
    return out


def theorem_payload(t: TheoremReport) -> dict:
    return {
        "interior": interior_payload(),
        "cases": [phi_payload(r) for r in t.phi],
        "boundary": {"total": t.boundary.to_text(), "table": _table(t.boundary_table)},
        "statement": t.statement().to_text(),
        "diff": [_diff_payload(r) for r in t.diff],
        "reading": t.reading,
    }


def oracle_payload(checks: list, tolerance: float) -> dict:
    return {
        "tolerance": _fl(tolerance),
        "checks": [
            {
                "seed": c.seed,
                "case": c.case,
                "exact": _num(c.exact),
                "oracle": _num(c.oracle),
                "residual": _fl(c.residual),
                "passed": bool(c.passed),
            }
            for c in checks
        ],
        "ok": all(c.passed for c in checks),
    }


def verify_payload(v) -> dict:
    doc = theorem_payload(v.theorem)
    doc["oracle"] = oracle_payload(v.checks, v.tolerance)
    doc["findings"] = {
        "first_order_reading_invariant": bool(v.printed_reading_agrees),
        "field_derivative_cases": [phi_payload(r) for r in v.derivative_phi],
        "reference_total_is_sum_of_rows": {
            slot: bool(eq) for slot, (_, _, eq) in sorted(v.reference_consistency.items())
        },
    }
    doc["seed"] = v.seed
    doc["ok"] = bool(v.ok)
    return doc


def envelope(command: str, body: dict) -> dict:
    return {"schema_version": SCHEMA_VERSION, "command": command, **body}


def to_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# Text
# ---------------------------------------------------------------------------


def _phi_name(k) -> str:
    return "Φ" + str(k).translate(_SUB)


def _text_case(c: dict) -> list:
    o = c["orders"]
    lines = [
        f"{_phi_name(c['case'])} = {c['rendered']}",
        f"  orders r={o['r']} l={o['l']} |alpha|={o['alpha']} j={o['j']} k={o['k']}; prefactor {c['prefactor']}",
    ]
    for key, val in c["table"].items():
        lines.append(f"  {key}: {val}")
    return lines


def to_text(doc: dict) -> str:
    lines = []
    if "interior" in doc:
        co = doc["interior"]["coefficients"]
        lines.append("interior")
        lines.append(f"  Ric(X,Y) - s g(X,Y)/2: {co['ric_minus_half_sg']}")
        lines.append(f"  s g(X,Y): {co['sg']}")
        lines.append(f"  total: {doc['interior']['expression']}")
    for c in doc.get("cases", []):
        lines.extend(_text_case(c))
    if "boundary" in doc:
        lines.append(f"{_phi_name('')} = {doc['boundary']['total']}")
        for key, val in doc["boundary"]["table"].items():
            lines.append(f"  {key}: {val}")
    if doc.get("diff"):
        lines.append("comparison with reference values")
        for d in doc["diff"]:
            extra = ""
            if d["verdict"] == "MATCH":
                extra = f" [{', '.join(d['matched_readings'])}]"
            elif "oracle" in d:
                extra = f" (oracle supports {d['oracle']['verdict']})"
            lines.append(
                f"  {d['row']:<6}{d['slot']:<11}{d['verdict']:<9}engine {d['engine']}; "
                f"reference {d['reference_coefficient']}{extra}"
            )
    if "oracle" in doc:
        o = doc["oracle"]
        worst = max((float(c["residual"]) for c in o["checks"]), default=0.0)
        lines.append(
            f"oracle: {sum(c['passed'] for c in o['checks'])}/{len(o['checks'])} checks within "
            f"{o['tolerance']} (worst residual {worst:.3e})"
        )
    if "findings" in doc:
        f = doc["findings"]
        lines.append(f"first-order reading invariant: {f['first_order_reading_invariant']}")
        for c in f["field_derivative_cases"]:
            lines.append(f"  with dY/dx': {_phi_name(c['case'])} = {c['rendered']}")
    if "ok" in doc:
        lines.append("OK" if doc["ok"] else "FAILED")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# LaTeX
# ---------------------------------------------------------------------------


def latex_scalar(e: ExactScalar | str) -> str:
    text = e if isinstance(e, str) else e.to_text()
    out = text.replace("*", r"\,").replace("pi", r"\pi").replace("hp0", "h'(0)")
    out = out.replace("gXTYT", "g(X^T,Y^T)").replace("gXY", "g(X,Y)").replace("Ric", r"\mathrm{Ric}")
    out = out.replace("I", "i")
    return out


def to_latex(doc: dict) -> str:
    """LaTeX rows; each carries a ``% exact: key = text`` line for parse-back."""
    lines = [r"\begin{tabular}{ll}", r"\hline"]
    if "interior" in doc:
        co = doc["interior"]["coefficients"]
        for key, val in sorted(co.items()):
            lines.append(f"% exact: interior.{key} = {val}")
            lines.append(f"{key.replace('_', ' ')} & ${latex_scalar(val)}$ \\\\")
    for c in doc.get("cases", []):
        lines.append(f"% exact: phi{c['case']}.total = {c['total']}")
        lines.append(f"$\\Phi_{c['case']}$ & ${latex_scalar(c['rendered'])}$ \\\\")
        for key, val in c["table"].items():
            lines.append(f"% exact: phi{c['case']}.{key} = {val}")
    if "boundary" in doc:
        lines.append(f"% exact: boundary.total = {doc['boundary']['total']}")
        lines.append(f"$\\Phi$ & ${latex_scalar(doc['boundary']['total'])}$ \\\\")
    for d in doc.get("diff", []):
        lines.append(f"% exact: diff.{d['row']}.{d['slot']} = {d['engine']}")
        lines.append(
            f"{d['row']} {d['slot']} & ${latex_scalar(d['engine'])}$ vs "
            f"${latex_scalar(d['reference_coefficient'])}$ ({d['verdict']}) \\\\"
        )
    lines.extend([r"\hline", r"\end{tabular}"])
    return "\n".join(lines) + "\n"


def parse_latex_exact(text: str) -> dict:
    """Recover ``{key: ExactScalar}`` from the ``% exact:`` lines."""
    out = {}
    for line in text.splitlines():
        if line.startswith("% exact: "):
            key, _, val = line[len("% exact: "):].partition(" = ")
            out[key] = ExactScalar.parse(val)
    return out

