from pathlib import Path

import pytest
from hypothesis import HealthCheck, given, settings

from sbgraph.dsl import flatten_graph, parse
from sbgraph.dsl.codegen import (
    EffortEquation,
    FlowEquation,
    expand_equations,
    generate_equations,
    image_atoms,
    render_equations,
    same_listing,
)
from sbgraph.graph import SBGraph, SetVertex, connect_comp
from sbgraph.interval import MDInterval
from sbgraph.oracle import expand, uf_components
from sbgraph.pwlmap import PWLMap
from sbgraph.sets import parse_set

from models import read_model
from strategies import sb_graphs

GOLDEN = Path(__file__).parent / "golden"


def equations(model, params):
    g, num = flatten_graph(parse(read_model(model)), params)
    rmap, _ = connect_comp(g)
    return g, num, generate_equations(rmap)


def test_rc_listing():
    _, _, eqs = equations("rc.mo", {"N": 1000})
    assert same_listing(render_equations(eqs), (GOLDEN / "rc_equations.txt").read_text())


def test_grid_listing():
    _, _, eqs = equations("grid2d.mo", {"N": 1000, "M": 100})
    assert same_listing(render_equations(eqs), (GOLDEN / "grid2d_equations.txt").read_text())


def test_same_listing_ignores_order_and_spacing():
    a = "for i in {[1:1:1]}\n  flow(i) = 0\nend\nfor i in {[2:1:2]}\n  flow(i) = 0\nend"
    b = "for i in {[2:1:2]}\n    flow(i)  = 0\nend\n\nfor i in {[1:1:1]}\nflow(i) = 0\nend\n"
    assert same_listing(a, b)
    assert not same_listing(a, a.replace("[2:1:2]", "[3:1:3]"))


def test_isolated_vertices_get_zero_flow():
    g = SBGraph.build([SetVertex("A", parse_set("{[1:1:4]}"))])
    rmap, _ = connect_comp(g)
    assert render_equations(generate_equations(rmap)) == "for i in {[1:1:4]}\n  flow(i) = 0\nend"


def test_non_idempotent_map_rejected():
    m = PWLMap.from_pieces(1, [(MDInterval.of((2, 1, 5)), ((1,), (-1,)))])
    with pytest.raises(ValueError, match="idempotent"):
        generate_equations(m)


def test_image_atoms_refine_overlapping_images():
    m = PWLMap.from_pieces(1, [
        (MDInterval.of((1, 1, 10)), ((1,), (0,))),
        (MDInterval.of((11, 1, 15)), ((1,), (-10,))),
        (MDInterval.of((16, 1, 16)), ((0,), (7,))),
    ])
    atoms = image_atoms(m)
    assert [str(a) for a in atoms] == ["[1:1:5]", "[6:1:6]", "[7:1:7]", "[8:1:10]"]


def check_against_components(g, eqs):
    """Efforts tie every vertex to its component minimum; one flow balance per component."""
    out = expand_equations(eqs)
    reps = uf_components(expand(g))
    comps: dict = {}
    for v, r in reps.items():
        comps.setdefault(r, set()).add(v)
    want = {frozenset(c) for c in comps.values()}
    assert set(out.flows) == want and len(out.flows) == len(want)
    for v, r in reps.items():
        assert out.effort.get(v, v) == r


@pytest.mark.parametrize("model, params", [
    ("rc.mo", {"N": 1}), ("rc.mo", {"N": 6}), ("rc_recursive.mo", {"N": 5}),
    ("grid2d.mo", {"N": 3, "M": 4}), ("grid2d.mo", {"N": 1, "M": 1}),
])
def test_equations_match_expanded_components(model, params):
    g, _, eqs = equations(model, params)
    check_against_components(g, eqs)


def test_rc_equations_match_hand_flattening():
    """Compare with the equations a scalar flattener writes for the RC network."""
    n = 4
    g, num, eqs = equations("rc.mo", {"N": n})
    out = expand_equations(eqs)
    name = {v: num.name_of(v) for v in set().union(*out.flows)}
    flows = {frozenset(name[v] for v in grp) for grp in out.flows}
    hand = [{"S.p", "R[1].p"}, {"S.n", "G.p"} | {f"C[{i}].n" for i in range(1, n + 1)},
            {f"R[{n}].n", f"C[{n}].p"}]
    hand += [{f"R[{i}].n", f"R[{i + 1}].p", f"C[{i}].p"} for i in range(1, n)]
    assert flows == {frozenset(h) for h in hand}
    # every effort equation joins two members of one balance
    for v, w in out.effort.items():
        assert any(v in grp and w in grp for grp in out.flows)


@settings(max_examples=100, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(sb_graphs())
def test_random_graph_equations(g):
    rmap, _ = connect_comp(g)
    eqs = generate_equations(rmap)
    check_against_components(g, eqs)
    # every vertex appears in exactly one flow balance
    seen = [v for grp in expand_equations(eqs).flows for v in grp]
    assert len(seen) == len(set(seen)) == sum(v.vset.cardinality() for v in g.vertices)
    assert all(isinstance(e, (EffortEquation, FlowEquation)) for e in eqs)
