"""Versioned JSON/CSV result reports.

A report is a list of flat records. Each record has a ``kind``
(``resonance``, ``tls``, ``design`` or ``design_summary``) whose field list,
order, type and unit are fixed by :data:`SCHEMAS`. Floats are written with
``repr`` so a parse/write cycle reproduces the text byte for byte.

CSV layout: one block per kind, blocks separated by a blank line. Each block
starts with a header row (``kind`` first) and a ``unit`` row, followed by
data rows whose first cell is the kind. Missing values are empty cells.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from ..design import DesignReport, LumpedDesign
from ..exceptions import ParseError
from ..fitting import FitResult
from ..model import PHOTON_NUMBER_CONVENTION
from ..tls import TLSFit
from ..uncertainty import propagate_uncertainty

SCHEMA_VERSION = 1

# (name, unit, type); "1" is dimensionless
SCHEMAS: Dict[str, tuple] = {
    "resonance": (
        ("label", "", "str"),
        ("source", "", "str"),
        ("status", "", "str"),
        ("converged", "", "bool"),
        ("f_r", "Hz", "float"),
        ("sigma_f_r", "Hz", "float"),
        ("Q_i", "1", "float"),
        ("sigma_Q_i", "1", "float"),
        ("delta_i", "1", "float"),
        ("sigma_delta_i", "1", "float"),
        ("Q_l", "1", "float"),
        ("sigma_Q_l", "1", "float"),
        ("Qc_mag", "1", "float"),
        ("sigma_Qc_mag", "1", "float"),
        ("phi", "rad", "float"),
        ("sigma_phi", "rad", "float"),
        ("a", "1", "float"),
        ("alpha", "rad", "float"),
        ("sigma_alpha", "rad", "float"),
        ("tau", "s", "float"),
        ("sigma_tau", "s", "float"),
        ("applied_power", "W", "float"),
        ("temperature", "K", "float"),
        ("photon_number", "1", "float"),
        ("residual_norm", "1", "float"),
        ("iterations", "1", "int"),
        ("n_points", "1", "int"),
    ),
    "tls": (
        ("label", "", "str"),
        ("status", "", "str"),
        ("converged", "", "bool"),
        ("delta_LP", "1", "float"),
        ("sigma_delta_LP", "1", "float"),
        ("F_delta0", "1", "float"),
        ("sigma_F_delta0", "1", "float"),
        ("delta_other", "1", "float"),
        ("sigma_delta_other", "1", "float"),
        ("Q_max", "1", "float"),
        ("sigma_Q_max", "1", "float"),
        ("n_c", "1", "float"),
        ("sigma_n_c", "1", "float"),
        ("n_c_lower_bound", "1", "float"),
        ("beta", "1", "float"),
        ("sigma_beta", "1", "float"),
        ("beta_free", "", "bool"),
        ("frequency", "Hz", "float"),
        ("temperature", "K", "float"),
        ("weighted", "", "bool"),
        ("n_points", "1", "int"),
        ("residual_norm", "1", "float"),
        ("iterations", "1", "int"),
    ),
    "design": (
        ("f_target", "Hz", "float"),
        ("f_r", "Hz", "float"),
        ("feasible", "", "bool"),
        ("note", "", "str"),
        ("L", "H", "float"),
        ("C_L", "F", "float"),
        ("C_C", "F", "float"),
        ("d", "m", "float"),
        ("eps_r", "1", "float"),
        ("area", "m^2", "float"),
        ("disc_radius", "m", "float"),
        ("participation", "1", "float"),
        ("inductor_loss_bound", "1", "float"),
        ("misattribution_additive", "1", "float"),
        ("misattribution_relative", "1", "float"),
    ),
    "design_summary": (
        ("verdict", "", "str"),
        ("n_feasible", "1", "int"),
        ("n_designs", "1", "int"),
        ("p_min", "1", "float"),
        ("max_misattribution", "1", "float"),
        ("delta_expected", "1", "float"),
        ("p_for_ceiling", "1", "float"),
    ),
}
KIND_ORDER = tuple(SCHEMAS)


@dataclass
class Report:
    records: List[dict] = field(default_factory=list)
    schema_version: int = SCHEMA_VERSION

    def of_kind(self, kind):
        return [r for r in self.records if r["kind"] == kind]


def _coerce(value, typ):
    if value is None:
        return None
    if typ == "float":
        return float(value)
    if typ == "int":
        return int(value)
    if typ == "bool":
        return bool(value)
    return str(value)


def make_record(kind, **values):
    """Build a record in schema order; unknown keys are an error, missing ones are None.

    Empty strings are stored as None so JSON and CSV reports carry the same values.
    """
    schema = SCHEMAS[kind]
    names = {n for n, _, _ in schema}
    extra = set(values) - names
    if extra:
        raise KeyError(f"fields {sorted(extra)} are not in the {kind!r} schema")
    rec = {"kind": kind}
    for name, _, typ in schema:
        value = _coerce(values.get(name), typ)
        rec[name] = None if value == "" else value
    return rec


def resonance_record(fit: FitResult, trace=None, source="", photon_number=None, status=None):
    s = propagate_uncertainty(fit)
    p, b = fit.params, fit.background
    return make_record(
        "resonance",
        label=fit.label,
        source=source,
        status=status or ("ok" if fit.converged else "not_converged"),
        converged=fit.converged,
        f_r=p.f_r, sigma_f_r=s["f_r"],
        Q_i=fit.Q_i, sigma_Q_i=s["Q_i"],
        delta_i=fit.delta_i, sigma_delta_i=s["delta_i"],
        Q_l=p.Q_l, sigma_Q_l=s["Q_l"],
        Qc_mag=p.Qc_mag, sigma_Qc_mag=s["Qc_mag"],
        phi=p.phi, sigma_phi=s["phi"],
        a=b.a, alpha=b.alpha, sigma_alpha=s["alpha"], tau=b.tau, sigma_tau=s["tau"],
        applied_power=None if trace is None else trace.applied_power,
        temperature=None if trace is None else trace.temperature,
        photon_number=photon_number,
        residual_norm=fit.residual_norm,
        iterations=fit.iterations,
        n_points=fit.n_points,
    )


def failed_resonance_record(label, source, status, trace=None):
    return make_record(
        "resonance", label=label, source=source, status=status, converged=False,
        applied_power=None if trace is None else trace.applied_power,
        temperature=None if trace is None else trace.temperature,
    )


def tls_record(fit: TLSFit, n_points=None, status=None):
    s = propagate_uncertainty(fit)
    p = fit.params
    free = "beta" in fit.parameter_names
    return make_record(
        "tls",
        label=fit.label,
        status=status or ("ok" if fit.converged else "not_converged"),
        converged=fit.converged,
        delta_LP=fit.delta_LP, sigma_delta_LP=s["delta_LP"],
        F_delta0=p.F_delta0, sigma_F_delta0=s["F_delta0"],
        delta_other=p.delta_other, sigma_delta_other=s["delta_other"],
        Q_max=fit.Q_max, sigma_Q_max=s["Q_max"],
        n_c=p.n_c, sigma_n_c=s["n_c"],
        beta=p.beta, sigma_beta=s.get("beta") if free else None,
        beta_free=free,
        frequency=p.f, temperature=p.T,
        weighted=fit.weighted,
        n_points=n_points,
        residual_norm=fit.residual_norm,
        iterations=fit.iterations,
    )


def failed_tls_record(label, status, frequency=None, temperature=None, n_points=None, n_c_lower_bound=None):
    return make_record(
        "tls", label=label, status=status, converged=False, frequency=frequency,
        temperature=temperature, n_points=n_points, n_c_lower_bound=n_c_lower_bound,
    )


def design_records(report: DesignReport):
    recs = [make_record("design", **_design_values(d)) for d in report.designs]
    recs.append(
        make_record(
            "design_summary",
            verdict=report.verdict,
            n_feasible=len(report.feasible),
            n_designs=len(report.designs),
            p_min=report.p_min,
            max_misattribution=report.max_misattribution,
            delta_expected=report.delta_expected,
            p_for_ceiling=report.p_for_ceiling,
        )
    )
    return recs


def _design_values(d: LumpedDesign):
    values = d.to_dict()
    # unreachable grid points carry NaN placeholders; report them as missing
    return {k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in values.items()}


def to_records(results) -> List[dict]:
    """Flatten fit results, designs and ready-made records into schema records."""
    if isinstance(results, Report):
        return [dict(r) for r in results.records]
    if isinstance(results, (FitResult, TLSFit, DesignReport, LumpedDesign, dict)):
        results = [results]
    out = []
    for r in results:
        if isinstance(r, FitResult):
            out.append(resonance_record(r))
        elif isinstance(r, TLSFit):
            out.append(tls_record(r))
        elif isinstance(r, DesignReport):
            out.extend(design_records(r))
        elif isinstance(r, LumpedDesign):
            out.append(make_record("design", **_design_values(r)))
        elif isinstance(r, dict):
            kind = r["kind"]
            out.append(make_record(kind, **{k: v for k, v in r.items() if k != "kind"}))
        else:
            raise TypeError(f"cannot report {type(r).__name__}")
    return out


def _units(kinds):
    return {k: {name: unit for name, unit, _ in SCHEMAS[k]} for k in KIND_ORDER if k in kinds}


def write_report(results, format: str = "json") -> str:
    records = to_records(results)
    if format == "json":
        return _write_json(records)
    if format == "csv":
        return _write_csv(records)
    raise ValueError(f"unknown report format {format!r}; use 'json' or 'csv'")


def _write_json(records):
    doc = {
        "schema_version": SCHEMA_VERSION,
        "photon_number_convention": PHOTON_NUMBER_CONVENTION,
        "units": _units({r["kind"] for r in records}),
        "records": records,
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def _cell(value, typ):
    if value is None:
        return ""
    if typ == "float":
        return repr(float(value))
    if typ == "bool":
        return "true" if value else "false"
    return str(value)


def _write_csv(records):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["schema_version", SCHEMA_VERSION])
    w.writerow(["photon_number_convention", PHOTON_NUMBER_CONVENTION])
    for kind in KIND_ORDER:
        rows = [r for r in records if r["kind"] == kind]
        if not rows:
            continue
        schema = SCHEMAS[kind]
        buf.write("\n")
        w.writerow(["kind", *(n for n, _, _ in schema)])
        w.writerow(["unit", *(u for _, u, _ in schema)])
        for r in rows:
            w.writerow([kind, *(_cell(r[n], t) for n, _, t in schema)])
    return buf.getvalue()


def parse_report(text: str) -> Report:
    """Read a report written by :func:`write_report` (format auto-detected)."""
    if text.lstrip().startswith("{"):
        return _parse_json(text)
    return _parse_csv(text)


def _parse_json(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno) from None
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ParseError(f"unsupported schema_version {version!r}")
    records = []
    for i, r in enumerate(doc.get("records", [])):
        kind = r.get("kind")
        if kind not in SCHEMAS:
            raise ParseError(f"record {i}: unknown kind {kind!r}")
        records.append(make_record(kind, **{k: v for k, v in r.items() if k != "kind"}))
    return Report(records, version)


def _parse_cell(text, typ, line_no):
    if text == "":
        return None
    try:
        if typ == "float":
            return float(text)
        if typ == "int":
            return int(text)
    except ValueError:
        raise ParseError(f"{text!r} is not a valid {typ}", line_no) from None
    if typ == "bool":
        if text not in ("true", "false"):
            raise ParseError(f"{text!r} is not 'true' or 'false'", line_no)
        return text == "true"
    return text


def _parse_csv(text):
    reader = csv.reader(io.StringIO(text))
    version = None
    schema: Optional[tuple] = None
    kind = None
    expect_units = False
    records = []
    for fields in reader:
        line_no = reader.line_num
        if not fields:
            schema = None
            continue
        tag = fields[0]
        if tag == "schema_version":
            version = int(fields[1])
            if version != SCHEMA_VERSION:
                raise ParseError(f"unsupported schema_version {version}", line_no)
        elif tag == "photon_number_convention":
            continue
        elif tag == "kind":
            kind = None
            for k, sch in SCHEMAS.items():
                if tuple(fields[1:]) == tuple(n for n, _, _ in sch):
                    kind, schema = k, sch
            if kind is None:
                raise ParseError("header row matches no known record kind", line_no)
            expect_units = True
        elif tag == "unit":
            if not expect_units or tuple(fields[1:]) != tuple(u for _, u, _ in schema):
                raise ParseError("unit row does not match the schema", line_no)
            expect_units = False
        else:
            if schema is None or tag != kind:
                raise ParseError(f"data row of kind {tag!r} outside its block", line_no)
            if len(fields) != len(schema) + 1:
                raise ParseError(f"expected {len(schema) + 1} cells, found {len(fields)}", line_no)
            values = {n: _parse_cell(c, t, line_no) for (n, _, t), c in zip(schema, fields[1:])}
            records.append(make_record(kind, **values))
    if version is None:
        raise ParseError("missing schema_version row", 1)
    return Report(records, version)
