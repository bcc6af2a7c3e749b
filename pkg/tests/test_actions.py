"""Actions, orbit spaces, equivalences and the imprimitivity quotient."""

from __future__ import annotations

import pytest

from isosearch import isomorphic
from generators import unit_carrier_equivalence
from haarsys import (
    Equivalence,
    imprimitivity_groupoid,
    imprimitivity_iso,
    is_free,
    left_action,
    left_translation_action,
    opposite,
    opposite_equivalence,
    orbit_space,
    pair_arrow,
    pair_groupoid,
    right_action,
    right_translation_action,
    validate_action,
    validate_equivalence,
)
from haarsys.fixtures import pair2, pair3, rect32, swap_action, trivial_group, z2


def trivial_point_action():
    return left_action(z2(), ["p"], {"p": "e"}, {("e", "p"): "p", ("g", "p"): "p"})


# ---------------------------------------------------------------------------
# construction and validation


def test_swap_action_is_valid_and_free():
    A = swap_action()
    assert validate_action(A).passed
    assert is_free(A)
    assert A.apply("g", "z1") == "z2"


def test_trivial_action_is_valid_but_not_free():
    A = trivial_point_action()
    assert validate_action(A).passed
    assert not is_free(A)


def test_translation_actions_are_free():
    assert is_free(left_translation_action(pair2()))
    assert is_free(right_translation_action(pair2()))


def test_action_table_must_cover_exactly_the_matched_pairs():
    with pytest.raises(ValueError):
        left_action(z2(), ["p"], {"p": "e"}, {("e", "p"): "p"})
    with pytest.raises(ValueError):
        left_action(
            z2(),
            ["p"],
            {"p": "e"},
            {("e", "p"): "p", ("g", "p"): "p", ("g", "q"): "q"},
        )


def test_action_must_leave_the_carrier_alone():
    with pytest.raises(ValueError):
        left_action(z2(), ["p"], {"p": "e"}, {("e", "p"): "p", ("g", "p"): "w"})


# ---------------------------------------------------------------------------
# sides and the opposite involution


def test_opposite_is_an_involution():
    A = swap_action()
    assert opposite(opposite(A)) == A


def test_right_action_application_reads_the_presented_table():
    A = right_action(
        z2(),
        ["x1", "x2"],
        {"x1": "e", "x2": "e"},
        {("x1", "e"): "x1", ("x2", "e"): "x2", ("x1", "g"): "x2", ("x2", "g"): "x1"},
    )
    assert A.side == "right"
    assert A.apply_right("x1", "g") == "x2"
    assert validate_action(A).passed


def test_opposite_of_rectangle_right_side_keeps_the_column_moment():
    E = rect32()
    B = opposite(E.right)
    assert B.side == "left"
    assert B.moment == E.right.moment


def test_opposite_of_right_translation_acts_by_inverses():
    from generators import cyclic_table
    from haarsys import group_as_groupoid

    G = group_as_groupoid(cyclic_table(3))
    A = opposite(right_translation_action(G))
    for g in G.sorted_elements():
        for z in G.sorted_elements():
            assert A.apply(g, z) == G.compose_map[(z, G.inverse_map[g])]


# ---------------------------------------------------------------------------
# orbits


def test_swap_action_has_one_orbit():
    reps, qmap = orbit_space(swap_action())
    assert len(reps) == 1
    assert set(qmap.values()) == {"z1"}


def test_trivial_action_on_two_points_has_two_orbits():
    A = left_action(
        z2(),
        ["p", "q"],
        {"p": "e", "q": "e"},
        {("e", "p"): "p", ("g", "p"): "p", ("e", "q"): "q", ("g", "q"): "q"},
    )
    reps, _ = orbit_space(A)
    assert reps == ("p", "q")


def test_rectangle_left_orbits_are_the_columns():
    E = rect32()
    reps, qmap = orbit_space(E.left)
    assert reps == ("1|a", "1|b")
    assert qmap["3|b"] == "1|b"
    assert qmap["2|a"] == "1|a"


# ---------------------------------------------------------------------------
# equivalences


def test_rectangle_is_an_equivalence():
    assert validate_equivalence(rect32()).passed


def test_unit_carrier_equivalence_for_relation_groupoid():
    _, _, E = unit_carrier_equivalence({"1": "A", "2": "A", "3": "B"})
    assert validate_equivalence(E).passed


def test_missing_right_transitivity_is_flagged():
    # a genuine G-space with a do-nothing right group is not an equivalence
    rows = pair2()
    carrier = ["1|a", "1|b", "2|a", "2|b"]
    moment = {z: pair_arrow(z[0], z[0]) for z in carrier}
    lact = {
        (pair_arrow(u, v), f"{v}|{t}"): f"{u}|{t}"
        for u in "12"
        for v in "12"
        for t in "ab"
    }
    left = left_action(rows, carrier, moment, lact)
    point = trivial_group()
    right = right_action(
        point,
        carrier,
        {z: "e" for z in carrier},
        {(z, "e"): z for z in carrier},
    )
    report = validate_equivalence(Equivalence(left, right))
    assert not report.passed


def test_opposite_equivalence_swaps_sides_and_involutes():
    E = rect32()
    F = opposite_equivalence(E)
    assert F.left.groupoid == E.right.groupoid
    assert F.right.groupoid == E.left.groupoid
    assert opposite_equivalence(F) == E


def test_equivalence_shape_errors():
    A = swap_action()
    with pytest.raises(ValueError):
        Equivalence(A, A)


# ---------------------------------------------------------------------------
# imprimitivity quotients


def test_imprimitivity_of_right_swap_is_the_two_element_group():
    A = right_action(
        z2(),
        ["x1", "x2"],
        {"x1": "e", "x2": "e"},
        {("x1", "e"): "x1", ("x2", "e"): "x2", ("x1", "g"): "x2", ("x2", "g"): "x1"},
    )
    imp, labeling = imprimitivity_groupoid(A)
    assert len(labeling) == 4
    assert len(imp.elements) == 2
    assert len(imp.units) == 1
    assert labeling[("x1", "x1")] == labeling[("x2", "x2")]
    assert labeling[("x1", "x2")] == labeling[("x2", "x1")]
    assert isomorphic(imp, z2())


def test_imprimitivity_of_right_translation_recovers_the_groupoid():
    imp, _ = imprimitivity_groupoid(right_translation_action(pair2()))
    assert isomorphic(imp, pair2())


def test_imprimitivity_of_rectangle_left_side_is_the_column_pair_groupoid():
    imp, _ = imprimitivity_groupoid(rect32().left)
    assert isomorphic(imp, pair_groupoid(["a", "b"]))


def test_imprimitivity_needs_freeness():
    with pytest.raises(ValueError):
        imprimitivity_groupoid(trivial_point_action())


def test_imprimitivity_orientation_tag_must_match():
    with pytest.raises(ValueError):
        imprimitivity_groupoid(swap_action(), orientation="right")


def test_imprimitivity_iso_matches_the_right_groupoid():
    E = rect32()
    imp, labeling, iso = imprimitivity_iso(E)
    cols = pair_groupoid(["a", "b"])
    assert sorted(iso.values()) == cols.sorted_elements()
    # the translator of a diagonal class is the matching column unit
    assert iso[labeling[("1|a", "1|a")]] == pair_arrow("a", "a")
    assert iso[labeling[("1|a", "1|b")]] == pair_arrow("a", "b")
    for (c1, c2), c3 in imp.compose_map.items():
        assert cols.compose_map[(iso[c1], iso[c2])] == iso[c3]
