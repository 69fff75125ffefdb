from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from scwoltool.groups import (
    FiniteGroup,
    GroupError,
    GroupHom,
    check_hom,
    conjugation_aut,
    cyclic_group,
    direct_product,
    parse_group,
    symmetric_group,
    trivial_group,
)


def test_cyclic_table():
    g = cyclic_group(5)
    assert g.order == 5
    assert g.prod(3, 4) == 2
    assert g.inv[2] == 3
    assert g.element_order(1) == 5
    assert g.is_abelian()


def test_symmetric_group_names_and_order():
    s3 = symmetric_group(3)
    assert s3.order == 6
    assert s3.names[0] == "()"
    assert not s3.is_abelian()
    assert len(s3.generated(s3.generators)) == 6
    a, b = s3.element("(12)"), s3.element("(23)")
    assert s3.names[s3.prod(a, b)] in ("(123)", "(132)")
    assert s3.prod(a, b) != s3.prod(b, a)


def test_symmetric_group_composition_against_permutations():
    s3 = symmetric_group(3)
    # rebuild every permutation from its cycle name and compare the product
    def perm_of(name):
        out = list(range(3))
        for cyc in name.strip("()").split(")("):
            if not cyc:
                continue
            pts = [int(c) - 1 for c in cyc]
            for k, x in enumerate(pts):
                out[x] = pts[(k + 1) % len(pts)]
        return tuple(out)

    for x in range(6):
        for y in range(6):
            px, py = perm_of(s3.names[x]), perm_of(s3.names[y])
            composed = tuple(px[py[k]] for k in range(3))
            assert perm_of(s3.names[s3.mul[x][y]]) == composed


def test_rejects_non_group_tables():
    with pytest.raises(GroupError):
        FiniteGroup([[0, 1], [1, 1]])
    with pytest.raises(GroupError):
        FiniteGroup([[0, 1, 2], [1, 0, 0], [2, 2, 1]])


def test_parse_group_shorthands():
    assert parse_group("1").order == 1
    assert parse_group("Z6").order == 6
    assert parse_group("Z2xZ3").order == 6
    assert parse_group("S3").order == 6
    explicit = parse_group({"elements": ["e", "x"], "table": [["e", "x"], ["x", "e"]]})
    assert explicit.element("x") == 1
    with pytest.raises(GroupError):
        parse_group("Q8")


def test_direct_product_generators():
    g = direct_product(cyclic_group(2), cyclic_group(4))
    assert g.order == 8
    assert len(g.generated(g.generators)) == 8


def test_subgroup_embedding():
    z8 = cyclic_group(8)
    sub, emb = z8.subgroup([0, 2, 4, 6])
    assert sub.order == 4
    assert emb == (0, 2, 4, 6)
    with pytest.raises(GroupError):
        z8.subgroup([0, 1])


def test_hom_from_generator_images():
    z4, z8 = cyclic_group(4), cyclic_group(8)
    h = GroupHom.from_generator_images(z4, z8, [2])
    assert h.map == (0, 2, 4, 6)
    assert check_hom(h).ok
    assert h.preimage(4) == 2
    assert h.preimage(3) is None
    with pytest.raises(GroupError):
        GroupHom.from_generator_images(z4, z8, [1])


def test_check_hom_detects_defects():
    z2 = cyclic_group(2)
    bad = GroupHom(z2, z2, [1, 0])
    assert "identity" in check_hom(bad).rules()
    collapse = GroupHom.trivial(z2, z2)
    assert "not-injective" in check_hom(collapse).rules()
    assert check_hom(collapse, injective=False).ok


def test_trivial_group():
    g = trivial_group()
    assert g.order == 1 and g.generators == ()


@given(st.integers(0, 5), st.integers(0, 5), st.integers(0, 5))
def test_conjugation_is_automorphism(g, x, y):
    s3 = symmetric_group(3)
    ad = conjugation_aut(g, s3)
    assert ad(s3.mul[x][y]) == s3.mul[ad(x)][ad(y)]
    assert check_hom(ad).ok


@given(st.integers(1, 12))
def test_word_for_evaluates_to_element(n):
    g = cyclic_group(n)
    for x, w in enumerate(g.word_for()):
        assert g.prod(*[g.generators[i] for i in w]) == x
