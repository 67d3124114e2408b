import json

import pytest

jsonschema = pytest.importorskip("jsonschema")

from logdop import serialize
from logdop.calculus import OperatorSection, TensorSection
from logdop.engine import h1_filtered, level_descent_diagnostic
from logdop.errors import SectionFormatError
from logdop.lifting import lift_by_solve, sample_kernel_section
from logdop.localdata import local_data_operator, local_data_tensor
from logdop.tables import TABLE_PRIMES, load_golden, verify_appendix


def validate(doc, format_tag=None):
    schema = serialize.load_schema(format_tag or doc["format"])
    jsonschema.validate(doc, schema)
    # documents must survive a JSON round trip unchanged
    assert json.loads(serialize.dump_json(doc)) == doc


def test_tensor_document_round_trip():
    delta = sample_kernel_section(3, 3, seed=5)
    doc = serialize.tensor_to_doc(delta)
    validate(doc)
    assert serialize.tensor_from_doc(doc) == delta


def test_operator_document_round_trip():
    op = lift_by_solve(sample_kernel_section(3, 3, seed=6))
    doc = serialize.operator_to_doc(op)
    validate(doc)
    assert serialize.operator_from_doc(doc) == op


def test_operator_document_big_coefficients():
    big = 10 ** 40 + 7
    op = OperatorSection(2, 0, 1, {("x", 0, 1): big})
    doc = serialize.operator_to_doc(op)
    validate(doc)
    assert serialize.operator_from_doc(doc).terms[("x", 0, 1)] == big


def test_local_data_document():
    delta = TensorSection(3, 2, 0, (1, 2), (3, 4, 5))
    doc = serialize.local_data_to_doc(local_data_tensor(delta))
    validate(doc)
    assert len(doc["entries"]) == 4 * 2  # (p+1) * d coordinates
    full = serialize.local_data_to_doc(
        local_data_operator(lift_by_solve(sample_kernel_section(3, 2, seed=1))))
    validate(full)
    assert all(e["residue"] == "0" for e in full["entries"])


def test_h1_report_document_and_texts():
    rep = h1_filtered(3, 3)
    doc = serialize.h1_report_to_doc(rep)
    validate(doc)
    assert doc["total"]["exponents"] == [1] * 8 + [2]
    text = serialize.h1_report_to_text(rep, per_degree=True)
    assert "8 × 3  1 × 3^2" in text
    csv = serialize.h1_report_to_csv(rep)
    assert csv.splitlines()[0] == "p,d,exponent,multiplicity"
    assert "3,3,1,8" in csv
    per = serialize.h1_report_to_csv(rep, per_degree=True)
    assert "3,1,1,1" in per and "3,3,2,1" in per


def test_h1_group_cache_document():
    validate(serialize.h1_group_doc(3, 2, 0, (1, 1, 1)))


def test_appendix_data_files_validate():
    schema = serialize.load_schema("appendix-table/1")
    for p in TABLE_PRIMES:
        rows = load_golden(p)
        assert rows == sorted(rows, key=lambda r: r.d)
    from importlib import resources
    for p in TABLE_PRIMES:
        doc = json.loads(resources.files("logdop")
                         .joinpath(f"data/appendix/p{p}.json").read_text())
        jsonschema.validate(doc, schema)


def test_appendix_report_documents():
    rep = verify_appendix()
    doc = serialize.appendix_report_to_doc(rep)
    assert doc["all_accepted"] is True
    flagged = [(table["p"], row["d"]) for table in doc["tables"]
               for row in table["rows"] if row["status"] != "match"]
    assert flagged == [(3, 8)]
    text = serialize.appendix_report_to_text(rep)
    assert "known-discrepancy" in text and "verdict OK" in text


def test_diagnostic_documents():
    diag = level_descent_diagnostic(5, 1, 8, "sqrt")
    doc = serialize.diagnostic_to_doc(diag)
    validate(doc)
    text = serialize.diagnostic_to_text(diag)
    assert "schedule=sqrt" in text
    csv = serialize.diagnostic_to_csv(diag)
    assert csv.splitlines()[0].startswith("d,max_exponent")
    assert len(csv.splitlines()) == 9


def test_parse_errors_carry_positions():
    with pytest.raises(SectionFormatError) as err:
        serialize.parse_json_document('{"format": "tensor-section/1",\n  "p": }')
    assert err.value.lineno == 2 and err.value.colno is not None
    with pytest.raises(SectionFormatError):
        serialize.tensor_from_doc({"format": "operator/1"})
    with pytest.raises(SectionFormatError):
        serialize.tensor_from_doc(
            {"format": "tensor-section/1", "p": 3, "d": 1, "m": 0,
             "a": ["1", "2"], "b": ["0"]})
