"""JSON/CSV/text document formats for sections, operators, data and reports.

All integer payloads (coefficients, residues) travel as decimal strings so
arbitrary-precision values survive any JSON reader.  Every document carries a
``format`` tag; the matching JSON schemas ship under logdop/schemas and the
test suite validates each emitted document against them.  Text output for H^1
groups mirrors the reference-table notation 'm x p^n'.
"""

from __future__ import annotations

import io
import json
from importlib import resources

from .calculus import OperatorSection, TensorSection
from .engine import H1Report, LevelDiagnostic
from .errors import SectionFormatError
from .localdata import INF, LocalDataVector
from .tables import AppendixReport

FORMAT_TENSOR = "tensor-section/1"
FORMAT_OPERATOR = "operator/1"
FORMAT_LOCAL_DATA = "local-data/1"
FORMAT_H1_REPORT = "h1-report/1"
FORMAT_H1_GROUP = "h1-group/1"
FORMAT_DIAGNOSTIC = "diagnostic/1"

_SCHEMA_FILES = {
    FORMAT_TENSOR: "tensor_section.schema.json",
    FORMAT_OPERATOR: "operator.schema.json",
    FORMAT_LOCAL_DATA: "local_data.schema.json",
    FORMAT_H1_REPORT: "h1_report.schema.json",
    FORMAT_H1_GROUP: "h1_group.schema.json",
    FORMAT_DIAGNOSTIC: "diagnostic.schema.json",
    "appendix-table/1": "appendix_table.schema.json",
}


def load_schema(format_tag: str) -> dict:
    path = resources.files("logdop").joinpath("schemas", _SCHEMA_FILES[format_tag])
    return json.loads(path.read_text())


def parse_json_document(text: str) -> dict:
    """json.loads with position-carrying errors for malformed input files."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SectionFormatError(
            f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}",
            lineno=exc.lineno, colno=exc.colno) from exc
    if not isinstance(doc, dict):
        raise SectionFormatError("document root must be an object")
    return doc


def _expect(doc: dict, tag: str) -> None:
    if doc.get("format") != tag:
        raise SectionFormatError(
            f"expected a {tag} document, found format={doc.get('format')!r}")


def _int_field(doc, key):
    try:
        return int(doc[key])
    except KeyError:
        raise SectionFormatError(f"missing field {key!r}") from None
    except (TypeError, ValueError):
        raise SectionFormatError(f"field {key!r} is not an integer") from None


# ---------------------------------------------------------------------------
# tensor sections
# ---------------------------------------------------------------------------

def tensor_to_doc(delta: TensorSection) -> dict:
    return {
        "format": FORMAT_TENSOR,
        "p": delta.p, "d": delta.d, "m": delta.m,
        "a": [str(x) for x in delta.A],
        "b": [str(x) for x in delta.B],
    }


def tensor_from_doc(doc: dict) -> TensorSection:
    _expect(doc, FORMAT_TENSOR)
    p, d, m = (_int_field(doc, k) for k in ("p", "d", "m"))
    try:
        a = tuple(int(x) for x in doc["a"])
        b = tuple(int(x) for x in doc["b"])
    except (KeyError, TypeError, ValueError):
        raise SectionFormatError("coefficient lists must hold decimal strings") from None
    try:
        return TensorSection(p, d, m, a, b)
    except ValueError as exc:
        raise SectionFormatError(str(exc)) from None


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------

def operator_to_doc(op: OperatorSection) -> dict:
    return {
        "format": FORMAT_OPERATOR,
        "p": op.p, "m": op.m, "d": op.d,
        "terms": [
            {"chart": chart, "power": i, "order": k, "coeff": str(c)}
            for (chart, i, k), c in op.sorted_terms()
        ],
    }


def operator_from_doc(doc: dict) -> OperatorSection:
    _expect(doc, FORMAT_OPERATOR)
    p, m, d = (_int_field(doc, k) for k in ("p", "m", "d"))
    terms = {}
    for entry in doc.get("terms", []):
        try:
            key = (entry["chart"], int(entry["power"]), int(entry["order"]))
            coeff = int(entry["coeff"])
        except (KeyError, TypeError, ValueError):
            raise SectionFormatError(f"malformed term entry: {entry!r}") from None
        terms[key] = terms.get(key, 0) + coeff
    try:
        return OperatorSection(p, m, d, terms)
    except ValueError as exc:
        raise SectionFormatError(str(exc)) from None


# ---------------------------------------------------------------------------
# local data
# ---------------------------------------------------------------------------

def local_data_to_doc(data: LocalDataVector) -> dict:
    entries = []
    for (a, k, i) in data.coords():
        entries.append({
            "point": "inf" if a == INF else a,
            "order": k,
            "power": i,
            "modulus_exponent": k - i,
            "residue": str(data.residue(a, k, i)),
        })
    return {
        "format": FORMAT_LOCAL_DATA,
        "p": data.p, "d": data.d, "m": data.m,
        "degree_only": data.degree_only,
        "entries": entries,
    }


# ---------------------------------------------------------------------------
# H^1 reports
# ---------------------------------------------------------------------------

def h1_report_to_doc(report: H1Report) -> dict:
    return {
        "format": FORMAT_H1_REPORT,
        "p": report.p, "d": report.d, "m": report.m,
        "per_degree": [
            {"d": dd, "exponents": list(g.exponents)}
            for dd, g in enumerate(report.per_degree, start=1)
        ],
        "total": {"exponents": list(report.total.exponents)},
        "bounds": [
            {"d": dd, "bound": b, "max_exponent": g.max_exponent,
             "met": met, "equal": eq}
            for dd, (g, b, met, eq) in enumerate(
                zip(report.per_degree, report.bounds,
                    report.bound_met, report.bound_equal), start=1)
        ],
    }


def h1_group_doc(p: int, d: int, m: int, exponents) -> dict:
    return {"format": FORMAT_H1_GROUP, "p": p, "d": d, "m": m,
            "exponents": list(exponents)}


def h1_report_to_text(report: H1Report, per_degree: bool = False) -> str:
    lines = [f"H^1 for p={report.p}, degrees <= {report.d}, level m={report.m}:"]
    lines.append(f"  total: {report.total.table_text()}")
    if per_degree:
        for dd, (g, b, met, eq) in enumerate(
                zip(report.per_degree, report.bounds,
                    report.bound_met, report.bound_equal), start=1):
            mark = "=" if eq else (">=" if met else "< BOUND")
            lines.append(f"  d={dd}: {g.table_text()}   (exponent {mark} {b})")
    return "\n".join(lines) + "\n"


def h1_report_to_csv(report: H1Report, per_degree: bool = False) -> str:
    lines = ["p,d,exponent,multiplicity"]
    if per_degree:
        for dd, g in enumerate(report.per_degree, start=1):
            for n, mult in g.summands():
                lines.append(f"{report.p},{dd},{n},{mult}")
    else:
        for n, mult in report.total.summands():
            lines.append(f"{report.p},{report.d},{n},{mult}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# appendix comparisons
# ---------------------------------------------------------------------------

def appendix_report_to_doc(report: AppendixReport) -> dict:
    tables = {}
    for c in report.comparisons:
        tables.setdefault(c.p, []).append({
            "d": c.d,
            "printed": [[mult, n] for n, mult in c.printed.summands()],
            "computed": [[mult, n] for n, mult in c.computed.summands()],
            "status": c.status(),
            "known_discrepancy": c.known_discrepancy,
            "splitting_ok": c.splitting_ok,
            "summand_count_ok": c.summand_count_ok,
            "bound_met": c.bound_met,
            "bound_equal": c.bound_equal,
        })
    return {
        "format": "appendix-report/1",
        "tables": [{"p": p, "rows": rows} for p, rows in sorted(tables.items())],
        "all_accepted": report.all_accepted,
    }


def appendix_report_to_text(report: AppendixReport) -> str:
    out = io.StringIO()
    for p in sorted({c.p for c in report.comparisons}):
        out.write(f"p = {p}\n")
        for c in report.rows_for(p):
            out.write(f"  d={c.d:<3} {c.computed.table_text():<60} {c.status()}\n")
            if not c.matches_printed:
                out.write(f"        printed:  {c.printed.table_text()}\n")
                out.write(f"        splitting containment: {c.splitting_ok}, "
                          f"new-summand count (p-1)d-1: {c.summand_count_ok}\n")
    status = "OK" if report.all_accepted else "FAILED"
    out.write(f"{len(report.comparisons)} rows, verdict {status}\n")
    return out.getvalue()


# ---------------------------------------------------------------------------
# level diagnostics
# ---------------------------------------------------------------------------

def diagnostic_to_doc(diag: LevelDiagnostic) -> dict:
    return {
        "format": FORMAT_DIAGNOSTIC,
        "p": diag.p, "m": diag.m, "schedule": diag.schedule,
        "rows": [
            {"d": r.d, "max_exponent": r.max_exponent,
             "schedule_n": r.schedule_n, "vp_transition": r.vp_transition,
             "scheduled_exponent": r.scheduled_exponent,
             "pushed_exponent": r.pushed_exponent,
             "bound": r.bound_value,
             "bound_nonnegative": r.bound_nonnegative,
             "bound_satisfied": r.bound_satisfied}
            for r in diag.rows
        ],
        "grew": diag.grew,
        "trend_note": diag.trend_note(),
    }


_DIAG_COLUMNS = ("d", "max_exp", "n_d", "vp(d!/q!)", "sched_ord", "pushed_ord",
                 "bound", "bound>=0", "ok")


def diagnostic_to_text(diag: LevelDiagnostic) -> str:
    out = io.StringIO()
    out.write(f"level diagnostic: p={diag.p}, m={diag.m}, schedule={diag.schedule}\n")
    out.write("  " + "  ".join(f"{h:>9}" for h in _DIAG_COLUMNS) + "\n")
    for r in diag.rows:
        cells = (r.d, r.max_exponent, r.schedule_n, r.vp_transition,
                 r.scheduled_exponent, r.pushed_exponent,
                 f"{r.bound_value:.2f}", "yes" if r.bound_nonnegative else "no",
                 "yes" if r.bound_satisfied else "NO")
        out.write("  " + "  ".join(f"{str(c):>9}" for c in cells) + "\n")
    out.write("  " + diag.trend_note() + "\n")
    return out.getvalue()


def diagnostic_to_csv(diag: LevelDiagnostic) -> str:
    lines = ["d,max_exponent,schedule_n,vp_transition,scheduled_exponent,"
             "pushed_exponent,bound,bound_nonnegative,bound_satisfied"]
    for r in diag.rows:
        lines.append(
            f"{r.d},{r.max_exponent},{r.schedule_n},{r.vp_transition},"
            f"{r.scheduled_exponent},{r.pushed_exponent},{r.bound_value:.6f},"
            f"{int(r.bound_nonnegative)},{int(r.bound_satisfied)}")
    return "\n".join(lines) + "\n"


def dump_json(doc: dict) -> str:
    return json.dumps(doc, indent=1, sort_keys=False) + "\n"
