from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from scwoltool.fixtures import project
from scwoltool.groups import cyclic_group
from scwoltool.metric import DisconnectedError
from scwoltool.scwol import (
    Scwol,
    ScwolAction,
    ScwolError,
    composable_sequences,
    dimension,
    find_isomorphism,
    graph_scwol,
    one_skeleton,
    quotient,
    skeleton_dot,
    to_dot,
    validate_action,
    validate_scwol,
)


def triangle() -> Scwol:
    return Scwol.build(
        ["v0", "v1", "v2"],
        [("a", "v1", "v0"), ("b", "v2", "v1"), ("ab", "v2", "v0")],
        [("a", "b", "ab")],
    )


def test_triangle_valid_and_dimension_two():
    s = triangle()
    assert validate_scwol(s).ok
    assert dimension(s) == 2
    assert composable_sequences(s, 2) == [(0, 1)]
    assert composable_sequences(s, 3) == []
    assert len(composable_sequences(s, 0)) == 3


def test_missing_composition_detected():
    s = Scwol.build(["v0", "v1", "v2"], [("a", "v1", "v0"), ("b", "v2", "v1"), ("ab", "v2", "v0")])
    assert validate_scwol(s).rules() == {"comp-total"}


def test_composition_with_wrong_endpoints():
    s = Scwol.build(
        ["v0", "v1", "v2"],
        [("a", "v1", "v0"), ("b", "v2", "v1"), ("c", "v1", "v0")],
        [("a", "b", "c")],
    )
    assert "comp-endpoints" in validate_scwol(s).rules()


def test_loop_detected_in_fixture():
    assert "no-loops" in validate_scwol(project("noloops").scwol).rules()


def test_tetrahedron_associativity():
    s = project("tetra").scwol
    assert validate_scwol(s).ok
    assert dimension(s) == 3
    broken = dict(s.comp)
    # e01 e13 must run v3 -> v0, but e02 runs v2 -> v0
    e = s.edge_index
    broken[(e("e01"), e("e13"))] = e("e02")
    bad = Scwol(s.vertices, s.edges, s.init, s.term, broken)
    assert validate_scwol(bad).rules() >= {"comp-endpoints"}


def test_build_rejects_unknown_names():
    with pytest.raises(ScwolError):
        Scwol.build(["a"], [("e", "a", "b")])
    with pytest.raises(ScwolError):
        Scwol.build(["a", "b"], [("e", "a", "b")], [("e", "f", "e")])


def test_graph_scwol_skeleton_is_subdivision():
    s = graph_scwol(["x", "y", "z"], [("x", "y"), ("y", "z"), ("z", "x")])
    assert validate_scwol(s).ok
    assert dimension(s) == 1
    X = one_skeleton(s)
    assert X.diameter() == 3
    assert len(X) == 6


def test_one_skeleton_disconnected():
    s = Scwol.build(["a", "b", "c", "d"], [("e", "a", "b"), ("f", "c", "d")])
    with pytest.raises(DisconnectedError):
        one_skeleton(s)
    assert len(s.components()) == 2


@settings(max_examples=30, deadline=None)
@given(st.integers(3, 9), st.integers(0, 10_000))
def test_skeleton_metric_axioms(n, seed):
    rng = random.Random(seed)
    nodes = [f"n{i}" for i in range(n)]
    edges = [(nodes[i], nodes[rng.randrange(i)]) for i in range(1, n)]
    edges += [(nodes[rng.randrange(n)], nodes[rng.randrange(n)]) for _ in range(rng.randrange(3))]
    edges = [(u, v) for u, v in edges if u != v]
    X = one_skeleton(graph_scwol(nodes, edges))
    assert X.validate().ok
    # every graph edge becomes a path of length 2 through its midpoint
    for u, v in edges:
        assert X.d(X.index(u), X.index(v)) <= 2


def test_z2seg_action_and_quotient():
    proj = project("z2seg")
    s, act = proj.scwol, proj.action
    assert validate_action(s, act).ok
    q = quotient(s, act)
    assert q.scwol.n_vertices == 3
    assert q.scwol.n_edges == 2
    assert validate_scwol(q.scwol).ok


def test_rigidity_violation():
    proj = project("seg_rigid")
    assert "rigidity" in validate_action(proj.scwol, proj.action).rules()


def test_inversion_detected():
    # Z2 swapping the ends of a single edge cannot be equivariant without inverting it
    s = Scwol.build(["a", "b"], [("e", "a", "b")])
    z2 = cyclic_group(2)
    act = ScwolAction(z2, ((0, 1), (1, 0)), ((0,), (0,)))
    rules = validate_action(s, act).rules()
    assert "no-inversion" in rules
    assert "equivariance" in rules


def test_inconsistent_generator_data():
    s = Scwol.build(["a", "b", "c"], [])
    z2 = cyclic_group(2)
    with pytest.raises(ScwolError):
        # a 3-cycle cannot be the image of an element of order 2
        ScwolAction.from_generators(s, z2, {1: ({0: 1, 1: 2, 2: 0}, {})})


def test_isomorphism_search():
    s = triangle()
    shuffled = Scwol.build(
        ["w2", "w0", "w1"],
        [("y", "w2", "w1"), ("xy", "w2", "w0"), ("x", "w1", "w0")],
        [("x", "y", "xy")],
    )
    iso = find_isomorphism(s, shuffled)
    assert iso is not None
    vmap, emap = iso
    for a in range(s.n_edges):
        assert shuffled.init[emap[a]] == vmap[s.init[a]]
        assert shuffled.term[emap[a]] == vmap[s.term[a]]
    flat = Scwol.build(["v0", "v1", "v2"], [("a", "v1", "v0"), ("b", "v2", "v1"), ("c", "v2", "v0")])
    assert find_isomorphism(s, flat) is None


def test_dot_export():
    s = triangle()
    dot = to_dot(s)
    assert dot.startswith("digraph")
    assert dot.count("->") == 3
    assert "graph" in skeleton_dot(s)
