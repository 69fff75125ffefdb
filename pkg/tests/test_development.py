from __future__ import annotations

import numpy as np
import pytest

from oracles import canon, development_counts_oracle, psl_ball, winding, z2z3_matrix
from scwoltool.development import (
    DevelopmentInconsistent,
    act,
    check_prop1,
    dev_vertex,
    develop_ball,
    edge_terms_well_defined,
    group_ball,
    layer_decomposition,
    r_stabilizer,
    short_elements,
    subspace_of,
    word_bfs_vertex_counts,
)
from scwoltool.fixtures import DIM1_PROJECTS
from scwoltool.scwol import find_isomorphism, validate_scwol
from scwoltool.words import Pi1Presentation

FRAGILE = ("z2seg", "simplex", "s3twist", "tetra")


def test_z2z3_counts_match_matrix_oracle(presentations):
    _, p = presentations("z2z3")
    ball = develop_ball(p, 6)
    assert ball.counts_by_distance() == development_counts_oracle(p, 6)
    assert ball.counts_by_distance() == [1, 2, 3, 3, 4, 4, 6]


def test_z2z3_ball_is_a_tree(presentations):
    _, p = presentations("z2z3")
    ball = develop_ball(p, 5)
    assert len(ball.edges) == len(ball) - 1
    degrees = [0] * len(ball)
    for i, t, _ in ball.edges:
        degrees[i] += 1
        degrees[t] += 1
    s = p.scwol
    for k, v in enumerate(ball.vertices):
        if ball.distance[k] < ball.radius:
            full = {"m": 2, "u": 2, "w": 3}[s.vertices[v.vertex]]
            assert degrees[k] == full


@pytest.mark.parametrize("name", ["z2z3", "z2seg", "circle", "simplex", "s3twist"])
def test_word_bfs_agrees_with_develop_ball(presentations, name):
    _, p = presentations(name)
    assert word_bfs_vertex_counts(p, 3) == develop_ball(p, 3).counts_by_distance()


def test_finite_developments(presentations):
    for name in ("simplex", "s3twist"):
        _, p = presentations(name)
        ball = develop_ball(p, 6)
        fq = p.finite_quotient()
        expected = sum(fq.order // G.order for G in p.complex.local)
        assert len(ball) == expected
        assert ball.counts_by_distance()[:3] == [1, 2, 4]
        assert not ball.frontier
        assert validate_scwol(ball.to_scwol()).ok


def test_bass_serre_round_trip(presentations):
    proj, p = presentations("z2seg")
    ball = develop_ball(p, 4)
    assert find_isomorphism(ball.to_scwol(), proj.scwol) is not None


@pytest.mark.parametrize("name", ["z2z3", "circle", "s3twist", "tetra"])
def test_edge_terms_do_not_depend_on_representative(presentations, name):
    _, p = presentations(name)
    assert edge_terms_well_defined(develop_ball(p, 3)) == []


def test_action_preserves_distance_from_translated_centre(presentations):
    proj, p = presentations("z2z3")
    ball = develop_ball(p, 4)
    g = proj.parse_word(p, "s . t")
    moved = act(p, g, ball.center)
    assert moved != ball.center
    # acting twice by s returns every vertex to itself
    s = proj.parse_word(p, "s")
    for v in ball.vertices:
        assert act(p, s, act(p, s, v)) == v


def test_stabilizer_orders_by_brute_force(presentations):
    _, p = presentations("z2z3")
    ball = develop_ball(p, 2)
    gb = group_ball(p, 5)
    for v in ball.vertices:
        fixing = [w for w in gb.words if act(p, w, v) == v]
        assert len(fixing) == p.group_at(v.vertex).order


@pytest.mark.parametrize("name", DIM1_PROJECTS + ("simplex",))
def test_stabilizer_matches_short_words_and_layers(presentations, name):
    _, p = presentations(name)
    ball = develop_ball(p, 4)
    for R in range(5):
        rep = check_prop1(p, R, ball=ball)
        assert rep.ok, rep.lines()
        assert rep.undecided == []
        assert rep.stabilizer_size == rep.short_size
    for layer in layer_decomposition(p, 4):
        assert layer["missing"] == []


def test_z2z3_stabilizer_sizes(presentations):
    _, p = presentations("z2z3")
    assert [len(r_stabilizer(p, R)) for R in range(5)] == [1, 1, 4, 4, 8]


def test_circle_stabilizer_is_winding_ball(presentations):
    _, p = presentations("circle")
    for R in range(9):
        stab = r_stabilizer(p, R)
        windings = sorted(winding(p, w) for w in stab.values())
        k = R // 4
        assert windings == list(range(-k, k + 1))


def test_short_elements_are_loops(presentations):
    _, p = presentations("s3tri")
    found, undecided = short_elements(p, 3)
    assert not undecided
    assert all(w.start == w.end == p.base and w.path_length <= 3 for w in found.values())


def test_group_ball_matches_psl(presentations):
    _, p = presentations("z2z3")
    gb = group_ball(p, 6)
    oracle = psl_ball(6)
    mats = [canon(z2z3_matrix(p, w)) for w in gb.words]
    assert len(set(mats)) == len(mats) == len(oracle)
    assert all(oracle[m] == n for m, n in zip(mats, gb.norms))
    assert gb.space.validate().ok
    assert gb.space.diameter() == 12
    # spot-check distances as norms of x^-1 y in PSL(2, Z)
    big = psl_ball(12)
    for i in range(0, len(gb.words), 7):
        for j in range(0, len(gb.words), 5):
            m = np.linalg.inv(z2z3_matrix(p, gb.words[i])).round().astype(np.int64) @ z2z3_matrix(p, gb.words[j])
            assert gb.space.d(i, j) == big[canon(m)]


def test_group_ball_workers_agree(presentations):
    _, p = presentations("z2z3")
    one = group_ball(p, 4, workers=1)
    two = group_ball(p, 4, workers=2)
    assert one.space.labels == two.space.labels
    assert (one.space.dist == two.space.dist).all()


def test_subspace_of_stabilizer(presentations):
    _, p = presentations("z2z3")
    gb = group_ball(p, 6)
    W = subspace_of(gb, r_stabilizer(p, 4).keys())
    assert len(W) == 8


def test_dev_vertex_needs_base_path(presentations):
    _, p = presentations("z2z3")
    with pytest.raises(ValueError):
        dev_vertex(p, p.identity(p.scwol.vertex_index("u")))
    with pytest.raises(ValueError):
        develop_ball(p, -1)


def test_budget_exhaustion_is_reported(presentations):
    proj, _ = presentations("simplex")
    p = Pi1Presentation(proj.complex_of_groups(), proj.base_vertex(), budget=2, max_cosets=1)
    with pytest.raises(DevelopmentInconsistent) as info:
        develop_ball(p, 4)
    assert info.value.diagnostics["explored"] == 2
    with pytest.raises(DevelopmentInconsistent):
        group_ball(p, 3)


def test_dict_and_dot_exports(presentations):
    _, p = presentations("z2z3")
    ball = develop_ball(p, 2)
    d = ball.to_dict()
    assert len(d["vertices"]) == len(ball)
    assert ball.to_dot().count("->") == len(ball.edges)
