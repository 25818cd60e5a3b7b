import warnings

import pytest
from hypothesis import given
from hypothesis import strategies as st

from sbgraph.dsl import build_graph, flatten_graph, number_vertices, parse
from sbgraph.dsl.syntax import Connect, ForLoop
from sbgraph.errors import ParseError, UnboundParameterError
from sbgraph.graph import validate
from sbgraph.interval import MDInterval
from sbgraph.pwlmap import PWLMap
from sbgraph.sets import IntervalSet

from models import read_model


def edge(g, left, right):
    (e,) = [e for e in g.edges if (g.vertices[e.index1].name, g.vertices[e.index2].name) == (left, right)]
    return e


def one_piece(dom, g, o):
    return PWLMap.from_pieces(1, [(MDInterval.of(dom), ((g,), (o,)))])


def test_parse_rc_listing():
    m = parse(read_model("rc.mo"))
    assert m.connectors == ["S.p", "R.p", "S.n", "G.p", "R.n", "C.p", "C.n"]
    assert len(m.statements) == 4
    assert [type(s) for s in m.statements] == [Connect, Connect, ForLoop, ForLoop]
    assert len(list(m.connects())) == 5
    assert m.parameters == {"N"}


def test_parse_empty():
    m = parse("")
    assert m.statements == () and m.decls == ()
    g, _ = flatten_graph(m, {})
    assert g.vertices == () and g.edges == ()


def test_dependent_range_rejected_with_location():
    text = "for i in 1:N loop\n  for j in 1:i loop\n    connect(A[i].p, B[j].p);\n  end for;\nend for;\n"
    with pytest.raises(ParseError) as err:
        parse(text)
    assert (err.value.line, err.value.column) == (2, 14)
    assert "depends on iterator 'i'" in str(err.value)


@pytest.mark.parametrize("text, fragment", [
    ("for i in 1:N loop connect(A[i*i].p, B[i].p); end for;", "non-affine"),
    ("for i in 1:N, j in 1:N loop connect(A[i+j].p, B[i,j].p); end for;", "mixes iterators"),
    ("for i in 1:N loop connect(A[N-i].p, B[i].p); end for;", "negative coefficient"),
    ("connect(A.p, B.p)", "expected ';'"),
    ("connect(A.p B.p);", "expected ','"),
    ("for i in 1:N loop connect(A[i].p, B[i].p);", "never closed"),
    ("connect(A[1].p[2], B.p);", "indexed twice"),
    ("connect(A.p, B.p); $", "unexpected character"),
    ("for i in 1:N loop for i in 1:N loop connect(A[i].p, B[i].p); end for; end for;", "shadows"),
])
def test_syntax_errors(text, fragment):
    with pytest.raises(ParseError) as err:
        parse(text)
    assert fragment in str(err.value)
    assert err.value.line == 1


def test_both_index_placements_agree():
    a = parse("for i in 1:N-1 loop connect(R[i].n, R[i+1].p); end for;")
    b = parse("for i in 1:N-1 loop connect(R.n[i], R.p[i+1]); end for;  // trailing comment")
    assert list(a.connects())[0][0].left.indices == list(b.connects())[0][0].left.indices
    ga, _ = flatten_graph(a, {"N": 5})
    gb, _ = flatten_graph(b, {"N": 5})
    assert ga.edges[0].map1 == gb.edges[0].map1


def test_numbering_rc():
    num = number_vertices(parse(read_model("rc.mo")), {"N": 1000})
    points = {s.name: s.vset for s in num.slots}
    assert points["S.p"] == IntervalSet.box((1, 1, 1))
    assert points["S.n"] == IntervalSet.box((2, 1, 2))
    assert points["G.p"] == IntervalSet.box((3, 1, 3))
    assert points["R.p"] == IntervalSet.box((1001, 1, 2000))
    assert points["R.n"] == IntervalSet.box((2001, 1, 3000))
    assert points["C.p"] == IntervalSet.box((3001, 1, 4000))
    assert points["C.n"] == IntervalSet.box((4001, 1, 5000))
    assert num.name_of((3005,)) == "C[5].p"


def test_numbering_grid():
    num = number_vertices(parse(read_model("grid2d.mo")), {"N": 1000, "M": 100})
    assert num.slot("Cell.r").point((7, 9)) == (2007, 209)
    assert num.slot("S.n").vset == IntervalSet.box((2, 1, 2), (2, 1, 2))
    assert num.blocks == (1000, 100)


def test_numbering_single_scalar():
    num = number_vertices(parse("A.p;"), {})
    assert num.slots[0].vset == IntervalSet.box((1, 1, 1))


def test_numbering_errors():
    with pytest.raises(UnboundParameterError):
        number_vertices(parse(read_model("rc.mo")), {})
    with pytest.raises(ParseError, match="extent 0"):
        number_vertices(parse("A.p[N];"), {"N": 0})
    with pytest.raises(ParseError, match="beyond extent"):
        number_vertices(parse("A.p[3];\nconnect(A[4].p, B.p);"), {})
    with pytest.raises(ParseError, match="below 1"):
        number_vertices(parse("for i in 0:3 loop connect(A[i].p, B[i+1].p); end for;"), {})


@given(st.integers(1, 30), st.integers(1, 30))
def test_numbering_injective(n, m):
    num = number_vertices(parse(read_model("grid2d.mo")), {"N": n, "M": m})
    sets = [s.vset for s in num.slots]
    for i, a in enumerate(sets):
        for b in sets[i + 1:]:
            assert (a & b).is_empty()


def test_build_rc_chain_edge():
    g, _ = flatten_graph(parse(read_model("rc.mo")), {"N": 1000})
    e = edge(g, "R.n", "R.p")
    assert e.map1 == one_piece((1, 1, 999), 1, 2000)
    assert e.map2 == one_piece((1, 1, 999), 1, 1001)
    assert validate(g) == []


def test_build_scalar_edge():
    g, _ = flatten_graph(parse("connect(A.p, B.p);"), {})
    (e,) = g.edges
    assert e.domain.cardinality() == 1


def test_build_recursive_edge():
    g, _ = flatten_graph(parse(read_model("rc_recursive.mo")), {"N": 1000})
    e = edge(g, "C.n", "C.n")
    assert e.map1 == one_piece((1, 1, 999), 1, 4001)
    assert e.map2 == one_piece((1, 1, 999), 1, 4000)


def test_statements_between_same_connectors_share_one_edge():
    g, _ = flatten_graph(parse(read_model("grid2d.mo")), {"N": 4, "M": 3})
    e = edge(g, "Cell.r", "Cell.l")
    assert e.map1.atom_count() == 2
    assert e.domain.cardinality() == 4 * 2 + 4
    assert validate(g) == []


def test_reversed_statement_joins_existing_edge():
    g, _ = flatten_graph(parse("connect(A[1].p, B[1].p);\nconnect(B[2].p, A[2].p);"), {})
    (e,) = g.edges
    assert e.map1.image() == IntervalSet.box((11, 1, 12))


def test_duplicate_connection_dropped_with_warning():
    with pytest.warns(UserWarning, match="duplicate"):
        g, _ = flatten_graph(parse("connect(A.p, B.p);\nconnect(B.p, A.p);"), {})
    assert g.edges[0].domain.cardinality() == 1


def test_self_connection_rejected():
    with pytest.raises(ParseError, match="connected to itself"):
        flatten_graph(parse("for i in 1:3 loop connect(A[i].p, A[i].p); end for;"), {})


def test_transposed_iterators_rejected():
    text = "for i in 1:3, j in 1:3 loop connect(A[i,j].p, B[j,i].p); end for;"
    with pytest.raises(ParseError, match="indexes position"):
        flatten_graph(parse(text), {})


def test_non_integral_index_rejected():
    with pytest.raises(ParseError, match="not an integer"):
        flatten_graph(parse("for i in 1:4 loop connect(A[i].p, B[i/2+1].p); end for;"), {})


def test_unused_iterator_warns():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        flatten_graph(parse("for i in 1:3 loop connect(A.p, B.p); end for;"), {})
    assert any("not used" in str(w.message) for w in caught)


def test_empty_loop_contributes_nothing():
    g, _ = flatten_graph(parse("A.p[2]; B.p[2];\nfor i in 1:N-1 loop connect(A[i].p, B[i].p); end for;"), {"N": 1})
    assert g.edges == ()


def test_declarations_fix_numbering_order():
    text = "Y.p[2];\nX.p[2];\nconnect(X[1].p, Y[1].p);"
    num = number_vertices(parse(text), {})
    assert [s.name for s in num.slots] == ["Y.p", "X.p"]


def test_component_declaration_sizes_all_ports():
    text = "R[N];\nconnect(R[1].p, S.p);\nconnect(R[1].n, G.p);"
    num = number_vertices(parse(text), {"N": 5})
    assert num.slot("R.p").extents == (5,) and num.slot("R.n").extents == (5,)


def test_literal_grid_listing_flattens():
    g, _ = flatten_graph(parse(read_model("grid2d_listing.mo")), {"N": 3, "M": 4})
    assert validate(g) == []


def test_build_graph_accepts_explicit_numbering():
    model = parse(read_model("rc.mo"))
    num = number_vertices(model, {"N": 4})
    g = build_graph(model, num, {"N": 4})
    assert len(g.vertices) == 7 and len(g.edges) == 5
