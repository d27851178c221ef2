import random

import pytest
from hypothesis import given, settings, strategies as st

from nvthompson import geometry as geo
from nvthompson.elements import identity, random_element
from nvthompson.errors import DimensionMismatch, NotBijective, ParseError
from nvthompson.generators import generator, sym
from nvthompson.trees import (
    LEAF, Caret, TreePairDiagram, all_trees, caret_count, diagram_to_element, element_to_diagram,
    format_diagram, format_tree, leaf_count, leaves, ordered_tree, parse_diagram, parse_tree,
    pattern_to_canonical_tree, random_tree, tree_depth, tree_to_pattern,
)

QUAD_SWAP = "(0 (1 L L) (1 L L)) | [0,2,1,3] | (1 (0 L L) (0 L L))"


def test_parse_and_format_tree():
    t = parse_tree(" (0 (1 L L)  L) ")
    assert t == Caret(0, Caret(1, LEAF, LEAF), LEAF)
    assert format_tree(t) == "(0 (1 L L) L)"
    assert (leaf_count(t), caret_count(t), tree_depth(t)) == (3, 2, 2)


@pytest.mark.parametrize("text,pos", [("(0 L", 4), ("(x L L)", 1), ("(0 L L) L", 8), ("(0 L L]", 6)])
def test_parse_tree_errors_carry_positions(text, pos):
    with pytest.raises(ParseError) as exc:
        parse_tree(text)
    assert exc.value.position == pos


def test_diagram_errors():
    with pytest.raises(ParseError) as exc:
        parse_diagram("(0 L L) | [1,0] | (0 L X)", 2)
    assert exc.value.position == 23
    with pytest.raises(ParseError):
        parse_diagram("(0 L L) | [1;0] | (0 L L)", 2)
    with pytest.raises(NotBijective):
        parse_diagram("(0 L L) | [0,0] | (0 L L)", 2)
    with pytest.raises(NotBijective):
        parse_diagram("(0 L L) | [0,1] | L", 2)


def test_tree_pattern_leaf_order():
    pat, order = tree_to_pattern(parse_tree("(0 (1 L L) L)"), 2)
    assert order == [((0, 1), (0, 1)), ((0, 1), (1, 1)), ((1, 1), (0, 0))]
    assert pat.blocks == tuple(sorted(order))
    with pytest.raises(DimensionMismatch):
        tree_to_pattern(parse_tree("(1 L L)"), 1)


def test_trivial_diagram_is_identity():
    assert diagram_to_element(TreePairDiagram(2, LEAF, (0,), LEAF)) == identity(2)
    assert format_diagram(element_to_diagram(identity(2))) == "L | [0] | L"


def test_quadrant_swap_diagram_is_identity():
    assert diagram_to_element(parse_diagram(QUAD_SWAP, 2)) == identity(2)
    same_order = QUAD_SWAP.replace("[0,2,1,3]", "[0,1,2,3]")
    assert diagram_to_element(parse_diagram(same_order, 2)) != identity(2)


def test_c0_diagram():
    d = parse_diagram("(1 L L) | [0,1] | (0 L L)", 2)
    assert diagram_to_element(d) == generator(sym("C", 0), 2)
    assert element_to_diagram(generator(sym("C", 0), 2)) == d


def test_ordered_tree():
    order = leaves(parse_tree("(1 (0 L L) (0 L L))"), 2)
    assert format_tree(ordered_tree(order, 2)) == "(1 (0 L L) (0 L L))"
    # left column first: only the tree with a vertical root lists the quadrants this way
    quads = [((0, 1), (0, 1)), ((0, 1), (1, 1)), ((1, 1), (0, 1)), ((1, 1), (1, 1))]
    assert format_tree(ordered_tree(quads, 2)) == "(0 (1 L L) (1 L L))"
    assert ordered_tree([quads[0], quads[3], quads[1], quads[2]], 2) is None


def test_all_trees_counts_are_catalan():
    assert [len(all_trees(k, 0)) for k in range(1, 7)] == [1, 1, 2, 5, 14, 42]


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10**6), carets=st.integers(0, 15), dim=st.integers(1, 3))
def test_canonical_tree_round_trip(seed, carets, dim):
    t = random_tree(random.Random(seed), carets, dim)
    pat, order = tree_to_pattern(t, dim)
    assert len(order) == len(set(order)) == len(pat) == carets + 1
    canon = pattern_to_canonical_tree(pat)
    assert tree_to_pattern(canon, dim)[0] == pat
    assert ordered_tree(order, dim) == t
    assert parse_tree(format_tree(t)) == t


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10**6), dim=st.integers(1, 3), size=st.integers(0, 8))
def test_element_diagram_round_trip(seed, dim, size):
    x = random_element(seed, size, dim)
    d = element_to_diagram(x)
    assert diagram_to_element(d) == x
    assert parse_diagram(format_diagram(d), dim) == d
    assert geo.validate_pattern(leaves(d.dom, dim), dim) == x.domain
