import pytest
from hypothesis import given

from sbgraph import interval as iv
from sbgraph.errors import DimensionError, EmptyError, PieceLimitError
from sbgraph.interval import MDInterval
from sbgraph.sets import IntervalSet, is_disjoint, parse_set, set_equals

from strategies import interval_sets


def S(text, dim=None):
    return parse_set(text, dim)


def test_union_examples():
    u = S("{[2:2:100]}") | S("{[101:1:200]}")
    assert set(u) == {(x,) for x in range(2, 101, 2)} | {(x,) for x in range(101, 201)}
    assert u.pieces == (MDInterval.of((2, 2, 100)), MDInterval.of((101, 1, 200)))
    a = S("{[1:1:10]}")
    assert a | IntervalSet.empty(1) == a
    assert set(S("{[1:1:10]}") | S("{[5:1:15]}")) == {(x,) for x in range(1, 16)}


def test_intersection_examples():
    assert (S("{[2:2:100]}") & S("{[101:1:200]}")).is_empty()
    a = S("{[1:2:9], [20:1:25]}")
    assert a & a == a
    assert set(a & S("{[1:3:25]}")) == {(1,), (7,), (22,), (25,)}


def test_minus_examples():
    assert (S("{[1:1:10]}") - S("{[2:2:10]}")).pieces == (MDInterval.of((1, 2, 9)),)
    a = S("{[1:1:5]x[1:1:5]}")
    assert (a - a).is_empty()
    d = a - S("{[3:1:3]x[3:1:3]}")
    assert d.cardinality() == 24 and (3, 3) not in d


def test_equals_examples():
    assert set_equals(S("{[1:2:9], [2:2:10]}"), S("{[1:1:10]}"))
    assert set_equals(IntervalSet.empty(1), IntervalSet.empty(1))
    assert not set_equals(S("{[1:1:10]}"), S("{[1:1:9]}"))
    with pytest.raises(DimensionError):
        set_equals(S("{[1:1:1]}"), S("{[1:1:1]x[1:1:1]}"))


def test_min_examples():
    assert S("{[2:2:100], [101:1:200]}").min() == (2,)
    assert S("{[3001:1:3001]x[301:1:400]}").min() == (3001, 301)
    assert S("{[7:1:9], [4:2:8]}").min() == (4,)
    with pytest.raises(EmptyError):
        IntervalSet.empty(1).min()


def test_render():
    assert str(S("{[1:1:10], [20:2:30]}")) == "{[1:1:10], [20:2:30]}"
    assert str(IntervalSet.empty(2)) == "{}"


def test_unhashable():
    with pytest.raises(TypeError):
        hash(S("{[1:1:2]}"))


def test_piece_ceiling(monkeypatch):
    monkeypatch.setenv("SBG_PIECE_LIMIT", "3")
    with pytest.raises(PieceLimitError):
        S("{[1:1:1], [3:1:3], [5:1:5], [7:1:7]}")


def test_compaction_merges_abutting_pieces():
    s = S("{[1:1:5]}") | S("{[6:1:10]}") | S("{[11:1:11]}")
    assert s.pieces == (MDInterval.of((1, 1, 11)),)


def test_union_work_independent_of_extent():
    def work(n):
        before = iv.op_count()
        IntervalSet.box((1, 1, n)) | IntervalSet.box((n + 1, 1, 2 * n))
        return iv.op_count() - before

    assert work(10**3) == work(10**9)


@given(interval_sets(dim=2), interval_sets(dim=2))
def test_operations_match_enumeration(a, b):
    pa, pb = set(a), set(b)
    for got, want in ((a | b, pa | pb), (a & b, pa & pb), (a - b, pa - pb)):
        assert is_disjoint(got.pieces)
        assert set(got) == want
        assert got.cardinality() == len(want)


@given(interval_sets(), interval_sets())
def test_algebraic_laws(a, b):
    assert a | b == b | a
    assert a & b == b & a
    box = IntervalSet.box((0, 1, 120))
    # De Morgan inside a covering box
    assert box - (a | b) == (box - a) & (box - b)
    assert a - b == a & (box - b)


@given(interval_sets(dim=2))
def test_parse_round_trip(a):
    assert parse_set(str(a), 2) == a
