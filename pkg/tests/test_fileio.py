import json
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given
from strategies import spaces

from medianspace import BadParams, ParseError, Report, build_fixture, parse_fixture, pocset_of
from medianspace import fileio
from medianspace import fixtures as F
from medianspace.report import check


def test_hypercube_roundtrip_is_byte_identical():
    text = fileio.serialize_space(F.hypercube(3))
    assert fileio.serialize_space(fileio.parse_space(text)) == text


@given(spaces())
def test_space_roundtrip(S):
    text = fileio.serialize_space(S)
    again = fileio.parse_space(text)
    assert again.points == S.points
    assert fileio.serialize_space(again) == text


def test_weight_is_canonicalised():
    text = json.dumps({"version": 1, "kind": "graph", "points": ["a", "b"],
                       "edges": [{"u": "a", "v": "b", "weight": "2/4"}]})
    S = fileio.parse_space(text)
    assert S.d("a", "b") == Fraction(1, 2)
    assert '"weight": "1/2"' in fileio.serialize_space(S)


def test_float_weight_rejected():
    text = json.dumps({"version": 1, "kind": "graph", "points": ["a", "b"],
                       "edges": [{"u": "a", "v": "b", "weight": 0.5}]})
    with pytest.raises(ParseError):
        fileio.parse_space(text)


def test_table_space_roundtrip():
    Q = F.hypercube(2)
    from medianspace import median
    rows = [[a, b, c, median(Q, a, b, c)] for a in Q.points for b in Q.points for c in Q.points]
    text = json.dumps({"version": 1, "kind": "table", "points": list(Q.points), "medians": rows})
    T = fileio.parse_space(text)
    assert T.form == "table"
    assert fileio.serialize_space(fileio.parse_space(fileio.serialize_space(T))) == fileio.serialize_space(T)


def test_pocset_roundtrip():
    P = pocset_of(F.path(4))
    text = fileio.serialize_pocset(P)
    again = fileio.parse_pocset(text)
    assert again.relations() == P.relations()
    assert fileio.serialize_pocset(again) == text


def _pocset_text(order):
    return json.dumps({
        "version": 1, "elements": ["a", "a*", "b", "b*"], "pairs": [["a", "a*"], ["b", "b*"]],
        "order": order, "weights": {"a": "1", "b": "1"},
    }, indent=2)


def test_malformed_order_relation():
    text = _pocset_text([["a", "zzz"]])
    with pytest.raises(ParseError) as err:
        fileio.parse_pocset(text)
    assert err.value.line > 1
    assert "line" in str(err.value) and "column" in str(err.value)


def test_cyclic_order_rejected():
    with pytest.raises(ParseError):
        fileio.parse_pocset(_pocset_text([["a", "b"], ["b", "a"]]))


def test_json_syntax_error_has_position():
    with pytest.raises(ParseError) as err:
        fileio.parse_space('{"version": 1,\n  "kind": }')
    assert err.value.line == 2


def test_report_roundtrip():
    rep = Report("demo", "sha256:00")
    rep.add(check("one", "a = b", True, value=Fraction(3, 6)))
    rep.add(check("two", "a <= b", False, witness=["x", "y"], gap=2))
    text = fileio.serialize_report(rep)
    again = fileio.parse_report(text)
    assert fileio.serialize_report(again) == text
    assert json.loads(text)["exit_status"] == 1
    assert json.loads(text)["checks"][0]["numbers"]["value"] == "1/2"


def test_sniff():
    assert fileio.sniff(fileio.serialize_space(F.path(2))) == "space"
    assert fileio.sniff(fileio.serialize_pocset(pocset_of(F.path(2)))) == "pocset"
    assert fileio.sniff(fileio.serialize_report(Report("x"))) == "report"


# -- fixtures ------------------------------------------------------------------------


def test_hypercube_fixture():
    from medianspace import enumerate_walls
    Q = build_fixture("hypercube", "3")
    assert Q.n == 8 and len(enumerate_walls(Q)) == 3


def test_weighted_star_fixture():
    S = build_fixture("weighted_star", "5")
    assert S.n == 6
    assert all(S.d("c", f"v{i}") == Fraction(1, i) for i in range(1, 6))


def test_eps_ball_count():
    lattice = [(x, y) for x, y in product(range(-4, 5), repeat=2)
               if abs(Fraction(x, 2)) + abs(Fraction(y, 2)) <= 1]
    assert len(lattice) == 13
    S = F.eps_ball(2, 1, Fraction(1, 2))
    assert S.n == 13
    assert all(w == Fraction(1, 2) for *_, w in S.edges)


def test_product_fixture():
    S = parse_fixture("star:3*path:3")
    assert S.n == 12
    assert build_fixture("product", "path:2", "path:2").n == 4


def test_unknown_fixture():
    with pytest.raises(BadParams):
        parse_fixture("dodecahedron:1")
    with pytest.raises(BadParams):
        parse_fixture("grid")


def test_corpus_builds():
    corpus = F.corpus()
    assert len(corpus) == len(F.CORPUS)


def test_random_generator_is_seeded():
    a = fileio.serialize_space(F.random_median_graph(7))
    b = fileio.serialize_space(F.random_median_graph(7))
    assert a == b
