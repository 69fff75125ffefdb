from __future__ import annotations

import pytest

from oracles import complex_is_valid, single_element_mutations
from scwoltool.complex import complex_to_dict, graph_of_groups, induced_complex, validate_complex
from scwoltool.fixtures import project
from scwoltool.groups import GroupHom, cyclic_group
from scwoltool.io import load_project
from scwoltool.scwol import ScwolError, find_isomorphism, validate_scwol


@pytest.mark.parametrize("name", ["z2z3", "simplex", "s3twist", "tetra", "circle", "z5point", "s3tri", "girth24"])
def test_fixture_complexes_valid(name):
    c = project(name).complex_of_groups()
    assert validate_complex(c).ok
    assert complex_is_valid(c)


def test_central_twist_in_abelian_group_is_harmless():
    c = project("simplex").complex
    pair = next(iter(c.twist))
    mutated = c.with_twist(pair, 4)
    # conjugation is trivial in Z8 and there is no 3-chain
    assert validate_complex(mutated).ok


def test_s3twist_requires_twist():
    c = project("s3twist").complex
    untwisted = c.with_twist(next(iter(c.twist)), 0)
    assert "cocycle-i" in validate_complex(untwisted).rules()


def test_tetra_cocycle_ii():
    c = project("tetra").complex
    e = c.base.edge_index
    mutated = c.with_twist((e("e12"), e("e23")), 0)
    mutated = mutated.with_twist((e("e01"), e("e12")), 1)
    bad = c.with_twist((e("e02"), e("e23")), 0)
    assert "cocycle-ii" in validate_complex(bad).rules()
    assert validate_complex(mutated).ok == complex_is_valid(mutated)


@pytest.mark.parametrize("name", ["simplex", "s3twist", "tetra", "z2z3"])
def test_validator_agrees_with_brute_force_on_mutations(name):
    c = project(name).complex
    for label, m in single_element_mutations(c):
        assert validate_complex(m).ok == complex_is_valid(m), label


def test_non_injective_hom_detected():
    c = project("s3twist").complex
    a = c.base.edge_index("a")
    collapsed = c.with_hom(a, GroupHom.trivial(c.local[c.base.init[a]], c.local[c.base.term[a]]))
    assert "psi_a:not-injective" in validate_complex(collapsed).rules()


def test_induced_complex_of_z2seg():
    proj = project("z2seg")
    ind = induced_complex(proj.scwol, proj.action)
    c = ind.complex
    assert validate_complex(c).ok
    orders = sorted(G.order for G in c.local)
    assert orders == [1, 1, 2]
    # the section elements move the lifted edge target onto the chosen lift
    s = proj.scwol
    for a, e in enumerate(ind.edge_lift):
        k = ind.section[a]
        assert proj.action.vertex_perm[k][s.term[e]] == ind.vertex_lift[c.base.term[a]]


def test_induced_complex_of_s3_triangle():
    proj = project("s3tri")
    assert proj.action is not None or proj.complex is not None
    c = proj.complex_of_groups()
    assert validate_complex(c).ok


def test_induced_rejects_rigidity_violation():
    proj = project("seg_rigid")
    with pytest.raises(ScwolError):
        induced_complex(proj.scwol, proj.action)


def test_round_trip_through_dict():
    c = project("s3twist").complex
    data = complex_to_dict(c)
    again = load_project(data).complex
    assert validate_complex(again).ok
    assert find_isomorphism(c.base, again.base) is not None
    assert [G.order for G in again.local] == [G.order for G in c.local]
    assert [h.map for h in again.edge_hom] == [h.map for h in c.edge_hom]
    assert dict(again.twist) == dict(c.twist)


def test_graph_of_groups_requires_homs():
    s = project("z2z3").scwol
    z2, z3 = cyclic_group(2), cyclic_group(3)
    local = [cyclic_group(1), z2, z3]
    c = graph_of_groups(s, local)
    assert validate_scwol(c.base).ok and validate_complex(c).ok
    with pytest.raises(ValueError):
        graph_of_groups(s, [z2, z2, z3])
