import itertools

import pytest
from hypothesis import given, settings, strategies as st

from nvthompson import normal_form as nf
from nvthompson.elements import identity, make_element, power, random_element
from nvthompson.errors import NotPositive, UnverifiedDecomposition
from nvthompson.generators import (
    comb_blocks, evaluate_word, format_word, generator, parse_word, perm_element, sym,
)
from nvthompson.normal_form import (
    adjacent_transpositions, decompose, decompose_permutation, decompose_positive, monotone,
    semi_normal_form, split_PPiQ, upper_bound_length,
)
from nvthompson.trees import leaves, parse_tree


def positive(tree_text, dim=2):
    order = leaves(parse_tree(tree_text), dim)
    return make_element(list(zip(order, comb_blocks(len(order), dim))), dim)


def test_attach_orientation_is_right_multiplication():
    # hanging a caret under leaf 0 of the comb is A0 multiplied on the right
    p = positive("(0 L L)")
    assert nf.ATTACH_ON_RIGHT
    assert p * generator(sym("A", 0), 2) == positive("(0 (0 L L) L)")
    assert p * generator(sym("B", 0), 2) == positive("(0 (1 L L) L)")


def test_split_of_identity_and_permutations():
    P, (k, sigma), Q = split_PPiQ(identity(2))
    assert P == Q == identity(2) and (k, sigma) == (1, (0,))
    x = perm_element(3, (2, 0, 1), 2)
    P, (k, sigma), Q = split_PPiQ(x)
    assert P == Q == identity(2) and (k, sigma) == (3, (2, 0, 1))


@pytest.mark.parametrize("tree,word", [
    ("L", ""),
    ("(0 (0 L L) L)", "A0"),
    ("(1 L L)", "C0"),
    ("(0 L (1 L L))", "C1"),
    ("(1 (0 L L) L)", "C0 A0"),
    ("(1 (0 (0 L L) L) (0 L L))", "C0 A0 A0"),
    ("(0 (1 L L) (1 (0 L L) L))", "C1 B0 A2"),
])
def test_positive_words(tree, word):
    p = positive(tree)
    w = decompose_positive(p)
    assert format_word(w) == word
    assert evaluate_word(w, 2) == p
    assert monotone(w)


def test_decompose_positive_rejects_non_positive():
    with pytest.raises(NotPositive):
        decompose_positive(~generator(sym("A", 0), 2))


def test_adjacent_transpositions():
    assert adjacent_transpositions((0, 1, 2)) == []
    assert adjacent_transpositions((1, 0)) == [0]
    assert len(adjacent_transpositions((3, 2, 1, 0))) == 6


def test_permutation_words():
    assert decompose_permutation(1, (0,)) == ()
    assert decompose_permutation(3, (0, 1, 2)) == ()
    assert format_word(decompose_permutation(2, (1, 0))) == "p0"
    w = decompose_permutation(4, (3, 2, 1, 0))
    assert len(w) <= 6 * (2 * 2 + 1)
    for k in range(2, 6):
        for sigma in itertools.permutations(range(k)):
            assert evaluate_word(decompose_permutation(k, sigma, 1, verify=False), 1) \
                == perm_element(k, sigma, 1)


def test_decompose_small_elements():
    assert decompose(identity(2)) == ()
    assert upper_bound_length(identity(2)) == ((), 0)
    assert upper_bound_length(generator(sym("A", 0), 2))[1] == 1
    c0sq = power(generator(sym("C", 0), 2), 2)
    assert evaluate_word(decompose(c0sq), 2) == c0sq
    big = evaluate_word(parse_word("A4 B3' C5 q3"), 2)
    w, n = upper_bound_length(big, full_check=True)
    assert all(s.index <= 1 for s in w) and n == len(w)


def test_failed_verification_is_reported(monkeypatch):
    monkeypatch.setattr(nf, "decompose_permutation", lambda k, s, dim=2, verify=True: ())
    with pytest.raises(UnverifiedDecomposition):
        decompose(perm_element(3, (1, 2, 0), 2))


def test_monotone_scan():
    assert monotone(parse_word("C0 C2 A0 B0 A3"))
    assert not monotone(parse_word("C2 C0"))
    assert not monotone(parse_word("A1 A0"))
    assert not monotone(parse_word("A0 C1"))
    assert not monotone(parse_word("A0'"))


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10**6), dim=st.integers(1, 3), size=st.integers(0, 8))
def test_semi_normal_form_reconstructs(seed, dim, size):
    x = random_element(seed, size, dim)
    snf = semi_normal_form(x)
    P, (k, sigma), Q = split_PPiQ(x)
    assert P * perm_element(k, sigma, dim) * ~Q == x
    assert evaluate_word(snf.positive_p, dim) == P
    assert evaluate_word(snf.positive_q, dim) == Q
    assert monotone(snf.positive_p) and monotone(snf.positive_q)
    assert evaluate_word(snf.word(), dim) == x
    w, n = upper_bound_length(x, full_check=True)
    assert evaluate_word(w, dim) == x
