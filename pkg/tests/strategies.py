"""Hypothesis strategies and brute-force references shared by the test modules."""

from __future__ import annotations

from math import lcm

from hypothesis import strategies as st

from sbgraph.graph import SBGraph, SetEdge, SetVertex, validate
from sbgraph.interval import MDInterval
from sbgraph.pwlmap import AffinePiece, PWLMap
from sbgraph.sets import IntervalSet


@st.composite
def triples(draw, lo=0, hi=40, max_step=5, max_count=12):
    a = draw(st.integers(lo, hi))
    s = draw(st.integers(1, max_step))
    n = draw(st.integers(1, max_count))
    return (a, s, a + (n - 1) * s)


@st.composite
def boxes(draw, dim=1, **kw):
    return MDInterval(tuple(_norm(draw(triples(**kw))) for _ in range(dim)))


def _norm(t):
    a, s, b = t
    return (a, 1, a) if a == b else t


@st.composite
def interval_sets(draw, dim=1, max_pieces=4, **kw):
    n = draw(st.integers(0, max_pieces))
    bs = [draw(boxes(dim, **kw)) for _ in range(n)]
    return IntervalSet.of(*bs) if bs else IntervalSet.empty(dim)


def points(s: IntervalSet) -> set:
    return set(s)


@st.composite
def pwl_maps(draw, dim=1, gains=(0, 1, 2), max_pieces=3, offset_range=(-10, 20)):
    """Random maps with disjoint piece domains and natural images."""
    dom = draw(interval_sets(dim, max_pieces=max_pieces, hi=30, max_count=8))
    atoms = []
    for b in dom.pieces:
        gain, offset = [], []
        for a, _, _ in b.dims:
            g = draw(st.sampled_from(gains))
            o = draw(st.integers(max(offset_range[0], -g * a), offset_range[1]))
            gain.append(g)
            offset.append(o)
        atoms.append((b, AffinePiece(tuple(gain), tuple(offset))))
    return PWLMap.from_pieces(dim, atoms)


@st.composite
def decreasing_maps(draw, dim=1, max_pieces=3):
    """Gains in {0, 1} with ``f(v) <= v`` lexicographically: valid fixed-point inputs."""
    dom = draw(interval_sets(dim, max_pieces=max_pieces, hi=30, max_count=8))
    atoms = []
    for b in dom.pieces:
        gain, offset = [], []
        # prefix of dimensions left untouched, then one strictly decreasing dimension
        keep = draw(st.integers(0, dim))
        for j, (a, s, e) in enumerate(b.dims):
            if j < keep:
                gain.append(1)
                offset.append(0)
            elif j == keep:
                if draw(st.booleans()) and a > 0:
                    gain.append(0)
                    offset.append(draw(st.integers(0, a - 1)))
                elif a > 0:
                    gain.append(1)
                    offset.append(-draw(st.integers(1, a)))
                else:
                    # cannot decrease below 0 here; the next dimension decides
                    gain.append(1)
                    offset.append(0)
                    keep += 1
            else:
                g = draw(st.sampled_from((0, 1)))
                gain.append(g)
                offset.append(draw(st.integers(-a if g else 0, 15)))
        atoms.append((b, AffinePiece(tuple(gain), tuple(offset))))
    return PWLMap.from_pieces(dim, atoms)


def table(m: PWLMap) -> dict:
    return {p: fn.apply(p) for b, fn in m.atoms() for p in b}


def brute_inf(m: PWLMap) -> dict:
    t = table(m)
    out = {}
    for v in t:
        x = v
        while x in t and t[x] != x:
            x = t[x]
        out[v] = x
    return out


@st.composite
def sb_graphs(draw, dim=None, max_vertices=4, max_edges=4):
    """Valid random set-based graphs; at most 100 expanded vertices."""
    dim = dim or draw(st.integers(1, 2))
    nv = draw(st.integers(1, max_vertices))
    per_dim = 12 if dim == 1 else 5
    vertices = []
    for k in range(nv):
        dims = []
        for _ in range(dim):
            s = draw(st.integers(1, 2))
            n = draw(st.integers(1, per_dim))
            a = 100 * (k + 1) + draw(st.integers(0, 5))
            dims.append(_norm((a, s, a + (n - 1) * s)))
        vertices.append(SetVertex(f"V{k}", IntervalSet(dim, (MDInterval(tuple(dims)),))))
    edges = []
    pairs = set()
    for h in range(draw(st.integers(1, max_edges))):
        i1 = draw(st.integers(0, nv - 1))
        i2 = draw(st.integers(0, nv - 1))
        if frozenset((i1, i2)) in pairs:
            continue
        t1 = vertices[i1].vset.pieces[0].dims
        t2 = vertices[i2].vset.pieces[0].dims
        m1, m2 = [], []
        shift = 0
        for _ in range(draw(st.integers(1, 2))):
            dom, f1, f2 = [], ([], []), ([], [])
            for j in range(dim):
                (a1, s1, b1), (a2, s2, b2) = t1[j], t2[j]
                c1, c2 = (b1 - a1) // s1 + 1, (b2 - a2) // s2 + 1
                mode = draw(st.sampled_from(("both", "left", "right", "none")))
                if mode == "both":
                    g = lcm(s1, s2)
                    r1, r2 = g // s1, g // s2
                    cap = min((c1 - 1) // r1, (c2 - 1) // r2) + 1
                    n = draw(st.integers(1, cap))
                    k1 = draw(st.integers(0, c1 - 1 - (n - 1) * r1))
                    k2 = draw(st.integers(0, c2 - 1 - (n - 1) * r2))
                    gains = (g, g)
                    starts = (a1 + k1 * s1, a2 + k2 * s2)
                else:
                    n = draw(st.integers(1, 4))
                    gains, starts = [], []
                    for (a, s, _), c, on in (((a1, s1, b1), c1, mode == "left"), ((a2, s2, b2), c2, mode == "right")):
                        if on:
                            r = draw(st.integers(1, 2))
                            n = min(n, (c - 1) // r + 1)
                            gains.append(s * r)
                        else:
                            gains.append(0)
                        starts.append(None)
                    for side, (a, s, _), c in ((0, t1[j], c1), (1, t2[j], c2)):
                        g = gains[side]
                        top = c - 1 - (n - 1) * (g // s) if g else c - 1
                        starts[side] = a + s * draw(st.integers(0, top))
                lo = 1 + (shift if j == 0 else 0)
                dom.append(_norm((lo, 1, lo + n - 1)))
                for fn, g, x in ((f1, gains[0], starts[0]), (f2, gains[1], starts[1])):
                    fn[0].append(g)
                    fn[1].append(x - g * lo)
            box = MDInterval(tuple(dom))
            m1.append((box, AffinePiece(tuple(f1[0]), tuple(f1[1]))))
            m2.append((box, AffinePiece(tuple(f2[0]), tuple(f2[1]))))
            shift = box.dims[0][2]
        pairs.add(frozenset((i1, i2)))
        edges.append(SetEdge(f"E{h}", i1, i2, PWLMap.from_pieces(dim, m1), PWLMap.from_pieces(dim, m2)))
    g = SBGraph(tuple(vertices), tuple(edges), dim)
    # drop set-edges that would join a vertex to itself
    bad = {v.where for v in validate(g)}
    return SBGraph(g.vertices, tuple(e for e in g.edges if e.name not in bad), dim)
