import json

import pytest

from eternal_pursuit.errors import GraphError
from eternal_pursuit.reduction import (
    ATTACHED,
    ELEMENT,
    EXTRA,
    SUBSET,
    SetCoverInstance,
    build_reduction,
    check_structure,
    expected_order,
    extra_path_count,
    set_cover_oracle,
    small_instances,
    verify_reduction,
)


def test_parse_and_format_round_trip():
    text = "3 2 1\n1 2\n2 3  # comment\n"
    inst = SetCoverInstance.parse(text)
    assert inst.universe == 3 and inst.beta == 2
    assert SetCoverInstance.parse(inst.format()) == inst


@pytest.mark.parametrize("text", ["", "2 2 1\n1\n", "2 1 1\n1\n", "x y z\n"])
def test_parse_rejects(text):
    with pytest.raises(GraphError):
        SetCoverInstance.parse(text)


def test_extra_path_count():
    assert [extra_path_count(t) for t in (1, 2, 3, 4, 7, 8)] == [1, 2, 2, 3, 3, 4]


def test_construction_shape():
    inst = SetCoverInstance(3, (frozenset({1, 2}), frozenset({2, 3}), frozenset({3})))
    red = build_reduction(inst, 4)
    g, roles = red.graph, red.roles
    assert g.n == expected_order(inst, 4) == 3 + 3 + 3 * 3 + 3 * 4
    assert roles.count(SUBSET) == 3 and roles.count(ELEMENT) == 3
    assert roles.count(ATTACHED) == 9 and roles.count(EXTRA) == 12
    assert not check_structure(red)
    # every attached-path tip is exactly t-1 from its element
    for e in range(3):
        tip = 6 + e * 3 + 2
        assert g.dist[3 + e, tip] == 3
    assert json.loads(red.role_map())["roles"] == list(roles)


def test_check_structure_detects_tampering():
    inst = SetCoverInstance(2, (frozenset({1}), frozenset({2})))
    red = build_reduction(inst, 2)
    red.roles = (ELEMENT,) + red.roles[1:]
    assert check_structure(red)


def test_set_cover_oracle():
    inst = SetCoverInstance(3, (frozenset({1}), frozenset({2}), frozenset({3}), frozenset({1, 2})))
    assert set_cover_oracle(inst) == 2
    assert set_cover_oracle(SetCoverInstance(2, (frozenset({1, 2}),))) == 1


def test_small_instances_cover():
    seen = list(small_instances(2, 2))
    assert len(seen) == 7
    assert all(frozenset().union(*i.subsets) == frozenset({1, 2}) for i in seen if i.universe == 2)


@pytest.mark.parametrize("inst", list(small_instances(2, 2)), ids=lambda i: i.format().replace("\n", "|"))
@pytest.mark.parametrize("t", [1, 2])
def test_reduction_equivalence(inst, t):
    res = verify_reduction(inst, t)
    assert res.upper_holds and res.lower_holds


def test_reduction_equivalence_three_elements():
    subsets = (frozenset({1, 2}), frozenset({3}))
    res = verify_reduction(SetCoverInstance(3, subsets), 2)
    assert res.cover == 2 and bool(res)


@pytest.mark.parametrize("t", [2, 3])
def test_reduction_equivalence_up_to_three_subsets(t):
    failures = [inst.format() for inst in small_instances(3, 3) if not verify_reduction(inst, t)]
    assert not failures
