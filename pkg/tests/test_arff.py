import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aslibkit.arff import ArffTable, Attribute, format_number, parse_arff, serialize_arff
from aslibkit.errors import FormatError


def test_minimal_table():
    t = parse_arff("@relation r\n@attribute a numeric\n@data\n1.5")
    assert t.relation == "r"
    assert [a.name for a in t.attributes] == ["a"]
    assert t.rows == ((1.5,),)


def test_missing_marker_is_not_zero():
    t = parse_arff("@relation r\n@attribute a numeric\n@attribute b numeric\n@data\n?,0\n")
    assert t.rows[0][0] is None
    assert t.rows[0][1] == 0.0
    assert t.count_missing() == 1


def test_arity_error_reports_line():
    with pytest.raises(FormatError) as exc:
        parse_arff("@relation r\n@attribute a numeric\n@attribute b numeric\n@attribute c numeric\n@data\n1,2,3\n1,2\n")
    assert exc.value.code == "ARITY"
    assert exc.value.line == 7


def test_directives_case_insensitive_and_comments():
    text = "% header\n@RELATION r\n@Attribute x REAL\n@attribute s string\n@DaTa\n% row comment\n2,'a, b'\n"
    t = parse_arff(text)
    assert t.rows == ((2.0, "a, b"),)


def test_nominal_domain_error():
    with pytest.raises(FormatError) as exc:
        parse_arff("@relation r\n@attribute s {ok,timeout}\n@data\nok\ncrash\n")
    assert (exc.value.code, exc.value.line) == ("DOMAIN", 5)


def test_bad_directive_is_syntax():
    with pytest.raises(FormatError) as exc:
        parse_arff("@relation r\n@attrib a numeric\n@data\n")
    assert exc.value.code == "SYNTAX"
    assert exc.value.line == 2


def test_sparse_rows_rejected():
    with pytest.raises(FormatError) as exc:
        parse_arff("@relation r\n@attribute a numeric\n@data\n{0 1}\n")
    assert exc.value.code == "SYNTAX"


def test_quoted_question_mark_is_a_string():
    t = parse_arff("@relation r\n@attribute s string\n@data\n'?'\n?\n")
    assert t.rows == (("?",), (None,))


def test_format_number_shortest_round_trip():
    assert format_number(3.0) == "3"
    assert format_number(0.1) == "0.1"
    assert float(format_number(1 / 3)) == 1 / 3
    assert format_number(-2.5e-7) == "-2.5e-07"


def test_serialize_uses_canonical_layout():
    t = ArffTable("rel", (Attribute("a", "numeric"), Attribute("s", "nominal", ("x", "y z"))), ((1.0, "x"), (None, "y z")))
    text = serialize_arff(t)
    assert text.splitlines()[0] == "@RELATION rel"
    assert "@ATTRIBUTE s {x,'y z'}" in text
    assert text.endswith("1,x\n?,'y z'\n")


names = st.text(alphabet=st.sampled_from("abcXYZ_01 ,'%?{}"), min_size=1, max_size=6)
numbers = st.one_of(st.none(), st.floats(allow_nan=False, allow_infinity=False, width=64))


@st.composite
def tables(draw):
    n_num = draw(st.integers(0, 3))
    n_str = draw(st.integers(0, 2))
    levels = tuple(dict.fromkeys(draw(st.lists(names, min_size=1, max_size=3))))
    attrs = [Attribute(f"n{i}", "numeric") for i in range(n_num)]
    attrs += [Attribute(f"s{i}", "string") for i in range(n_str)]
    attrs.append(Attribute("nom", "nominal", levels))
    rows = []
    for _ in range(draw(st.integers(0, 5))):
        row = [draw(numbers) for _ in range(n_num)]
        row += [draw(st.one_of(st.none(), names)) for _ in range(n_str)]
        row.append(draw(st.one_of(st.none(), st.sampled_from(levels))))
        rows.append(tuple(row))
    return ArffTable(draw(names), tuple(attrs), tuple(rows))


@settings(max_examples=150, deadline=None)
@given(tables())
def test_round_trip_identity(table):
    back = parse_arff(serialize_arff(table))
    assert back == table
    assert back.count_missing() == table.count_missing()
    assert serialize_arff(back) == serialize_arff(table)


def test_negative_zero_and_large_values_round_trip():
    t = ArffTable("r", (Attribute("a", "numeric"),), ((1e300,), (-0.0,), (123456789012345678.0,)))
    back = parse_arff(serialize_arff(t))
    assert [r[0] for r in back.rows] == [1e300, 0.0, 123456789012345678.0]
    assert not math.isnan(back.rows[1][0])
