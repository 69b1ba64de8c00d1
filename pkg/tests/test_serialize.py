import json
from dataclasses import replace
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hypercourant import linalg
from hypercourant.algebroid import assemble, build_psi
from hypercourant.errors import DocumentError
from hypercourant.hyper import PARA_NORMAL, to_hyperkahler
from hypercourant.instances import quaternionic_triple, search_hyper_lie
from hypercourant.serialize import (
    SCHEMA,
    InstanceDocument,
    digest,
    document_from,
    dumps,
    emit,
    forms_from_triple,
    parse,
    to_obj,
    with_quad,
    with_triple,
)


def q_doc():
    return document_from(*quaternionic_triple())


def obj_of(doc):
    return json.loads(emit(doc))


def test_emit_parse_round_trip_is_byte_exact(quaternionic, para):
    mu = search_hyper_lie(para[1], seed=1)
    for doc in (q_doc(), document_from(*para), document_from(mu, para[1], gamma=mu.swapped())):
        text = emit(doc)
        again = parse(text)
        assert emit(again) == text
        assert again == doc


def test_emitted_layout():
    text = emit(q_doc())
    assert text.endswith("}\n")
    assert '"schema": "hypercourant/instance/1"' in text
    # rows of rationals stay on one line
    assert '[{"n": 0, "d": 1}, {"n": -1, "d": 1}' in text or '[{"n": 0, "d": 1}, {"n": 1, "d": 1}' in text
    assert "pi" not in obj_of(q_doc())


def test_fractions_are_reduced_and_integers_accepted():
    obj = obj_of(q_doc())
    obj["omega"][0][0][1] = 2
    obj["omega"][0][1][0] = {"n": -4, "d": 2}
    doc = parse(json.dumps(obj))
    assert doc.omega[0][0, 1] == 2 and doc.omega[0][1, 0] == -2
    assert '{"n": -2, "d": 1}' in emit(doc)


@pytest.mark.parametrize("value, fragment", [
    ("0.5", "decimal"),
    ("true", "boolean"),
    ('{"n": 1, "d": 0}', "denominator"),
    ('{"n": 1.0, "d": 2}', ""),
    ('"1/2"', ""),
])
def test_bad_numbers_rejected(value, fragment):
    text = emit(q_doc()).replace('{"n": 0, "d": 1}', value, 1)
    with pytest.raises(DocumentError) as info:
        parse(text)
    assert fragment in str(info.value)
    assert info.value.location.startswith("omega")


def test_nan_and_syntax_errors_carry_line_context():
    with pytest.raises(DocumentError, match="non-finite"):
        parse('{"schema": "hypercourant/instance/1", "dim": NaN}')
    text = emit(q_doc()).replace('"dim": 4,', '"dim": 4')
    with pytest.raises(DocumentError) as info:
        parse(text)
    # the missing comma is noticed where the next key starts
    assert info.value.location == "line 4, column 3"
    assert "near '\"omega\": ['" in str(info.value)


def test_structural_errors():
    base = obj_of(q_doc())
    cases = [
        ({**base, "extra": 1}, "unknown keys"),
        ({**base, "schema": "other"}, "schema"),
        ({**base, "dim": 0}, "positive"),
        ({**base, "dim": True}, "positive"),
        ({**base, "epsilon": [1, 1, 0]}, ""),
        ({k: v for k, v in base.items() if k != "omega"} | {"pi": base["omega"]}, "needs 'omega'"),
        ({**base, "triple": []}, "either"),
        ({**base, "hyperkahler": {"T": []}}, "'T' and 'G'"),
        ({**base, "theta_extra": {"chi": []}}, "psi"),
    ]
    for obj, fragment in cases:
        with pytest.raises(DocumentError) as info:
            parse(json.dumps(obj))
        assert fragment in str(info.value), (fragment, str(info.value))


def test_duplicate_keys_rejected():
    text = emit(q_doc()).replace('"dim": 4,', '"dim": 4,\n  "dim": 4,')
    with pytest.raises(DocumentError, match="duplicate"):
        parse(text)


def test_non_skew_matrix_names_the_entry():
    obj = obj_of(q_doc())
    obj["omega"][1][0][2] = {"n": 5, "d": 1}
    with pytest.raises(DocumentError) as info:
        parse(json.dumps(obj))
    assert info.value.location.startswith("omega[1]")


def test_wrong_shapes_rejected():
    obj = obj_of(q_doc())
    obj["omega"][0] = obj["omega"][0][:3]
    with pytest.raises(DocumentError):
        parse(json.dumps(obj))
    obj = obj_of(q_doc())
    obj["omega"] = obj["omega"][:2]
    with pytest.raises(DocumentError):
        parse(json.dumps(obj))


def test_structure_constant_entries():
    obj = obj_of(q_doc())
    obj["structure_constants"] = [[3, 1, 2, 1], [3, 1, 2, 1]]
    with pytest.raises(DocumentError):
        parse(json.dumps(obj))
    obj["structure_constants"] = [[5, 1, 2, 1]]
    with pytest.raises(DocumentError):
        parse(json.dumps(obj))
    obj["structure_constants"] = [[4, 1, 2, {"n": 1, "d": 2}]]
    doc = parse(json.dumps(obj))
    assert doc.mu().constants()[3, 0, 1] == Fraction(1, 2)


def test_theta_extra_round_trip(torsion_instances):
    inst = torsion_instances[0]
    doc = document_from(inst.mu, inst.forms)
    doc = replace(doc, theta_extra={"psi": inst.psi})
    again = parse(emit(doc))
    assert again.theta_extra["psi"] == inst.psi
    assert again.theta(extras=True).theta == inst.mu.element + inst.psi
    assert again.theta().theta == inst.mu.element
    assert build_psi(again.mu(), again.forms().pi(1)) == inst.psi
    obj = obj_of(doc)
    obj["theta_extra"]["psi"][0][0] = [1, 2]
    with pytest.raises(DocumentError):
        parse(json.dumps(obj))


def test_pi_written_only_when_not_inverse(quaternionic):
    mu, t = quaternionic
    from hypercourant.algebroid import FormTriple

    broken = FormTriple.build([t.w(i) for i in (1, 2, 3)], t.eps, [t.p(1) * 2, t.p(2), t.p(3)])
    doc = document_from(mu, broken)
    assert doc.pi is not None
    assert not parse(emit(doc)).forms().inverse_ok(1)


def test_triple_and_quad_sections(para):
    doc = document_from(*para)
    h = assemble(para[1])
    assert forms_from_triple(h) is not None
    assert with_triple(doc, h) == doc
    q = to_hyperkahler(h)
    qdoc = with_quad(doc, q)
    assert qdoc.omega is None and parse(emit(qdoc)).quad() == q
    # a triple that is not block off-diagonal goes into the 'triple' section
    from hypercourant.hyper import HyperTriple, transition

    mixed = HyperTriple(h.s1, transition(h, 2), transition(h, 3), eps=PARA_NORMAL)
    tdoc = with_triple(doc, mixed)
    assert tdoc.triple is not None and tdoc.omega is None
    assert parse(emit(tdoc)).hyper_triple() == mixed


def test_missing_sections_reported():
    doc = InstanceDocument(dim=2)
    with pytest.raises(DocumentError):
        doc.forms()
    with pytest.raises(DocumentError):
        doc.hyper_triple()
    with pytest.raises(DocumentError):
        doc.quad()


def test_digest_and_dumps():
    assert digest("abc") == digest(b"abc")
    assert digest("abc").startswith("sha256:")
    assert dumps({"a": [1, 2], "b": {"c": []}}) == '{\n  "a": [1, 2],\n  "b": {\n    "c": []\n  }\n}'
    assert to_obj(q_doc())["schema"] == SCHEMA


@given(st.lists(st.tuples(st.integers(-50, 50), st.integers(1, 12)), min_size=6, max_size=6))
def test_rational_entries_round_trip(entries):
    m = linalg.zeros(4, 4)
    k = 0
    for i in range(4):
        for j in range(i + 1, 4):
            n, d = entries[k]
            m[i, j], m[j, i] = Fraction(n, d), -Fraction(n, d)
            k += 1
    doc = InstanceDocument(dim=4, omega=(m, m, m))
    text = emit(doc)
    assert emit(parse(text)) == text
    assert linalg.equal(parse(text).omega[0], m)
