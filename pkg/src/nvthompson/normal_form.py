"""Semi-normal form: x = P * Pi * Q^-1 with P, Q positive and Pi a comb permutation.

Positive elements are built from the identity by right multiplication: under
the apply-left-first product, ``P * A_i`` hangs a vertical caret under leaf i
of P's domain tree (``B_i.d`` a direction-d caret), and ``P * C_m.d`` turns
position m of the right backbone into a direction-d caret.  Every
decomposition is checked against the engine before it is returned.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .elements import Element, make_element
from .errors import NotPositive, UnverifiedDecomposition
from .generators import (
    Symbol, Word, comb_blocks, evaluate_word, free_reduce, inverse_word, perm_element,
    shift_rewrite, sym,
)
from .geometry import Block
from .trees import Caret, Leaf, Tree, leaves, ordered_tree, pattern_to_canonical_tree

# Calibrated once against the engine (see tests/test_normal_form.py): building a
# positive element multiplies generators on the right.
ATTACH_ON_RIGHT = True


@dataclass(frozen=True)
class SemiNormalForm:
    positive_p: Word
    perm_size: int
    sigma: tuple[int, ...]
    positive_q: Word

    def word(self) -> Word:
        return self.positive_p + decompose_permutation(self.perm_size, self.sigma, verify=False) \
            + inverse_word(self.positive_q)


def _positive_from_order(order: Sequence[Block], dim: int) -> Element:
    return make_element(list(zip(order, comb_blocks(len(order), dim))), dim)


def split_PPiQ(x: Element) -> tuple[Element, tuple[int, tuple[int, ...]], Element]:
    """Split along the canonical leaf orders of the domain and range patterns."""
    dom_order, sigma, ran_order = _split_orders(x)
    k = len(dom_order)
    return (_positive_from_order(dom_order, x.dim), (k, sigma),
            _positive_from_order(ran_order, x.dim))


def _split_orders(x: Element) -> tuple[list[Block], tuple[int, ...], list[Block]]:
    dom_order = leaves(pattern_to_canonical_tree(x.domain), x.dim)
    ran_order = leaves(pattern_to_canonical_tree(x.range), x.dim)
    ran_index = {b: i for i, b in enumerate(ran_order)}
    image = dict(x.pairs)
    sigma = tuple(ran_index[image[b]] for b in dom_order)
    return dom_order, sigma, ran_order


def positive_word(tree: Tree) -> Word:
    """C symbols for the backbone, then A/B symbols in preorder.

    A caret hung under leaf i is emitted as ``A_i``/``B_i``, where i is the
    index of the leftmost final leaf below it; preorder makes these indices
    nondecreasing.
    """
    backbone: list[Caret] = []
    node = tree
    while isinstance(node, Caret):
        backbone.append(node)
        node = node.high
    word: list[Symbol] = [sym("C", m, c.direction) for m, c in enumerate(backbone) if c.direction]

    def visit(t: Tree, base: int) -> int:
        if isinstance(t, Leaf):
            return 1
        word.append(sym("A", base) if t.direction == 0 else sym("B", base, t.direction))
        n = visit(t.low, base)
        return n + visit(t.high, base + n)

    base = 0
    for c in backbone:
        base += visit(c.low, base)
    out = tuple(word)
    return out if ATTACH_ON_RIGHT else out[::-1]


def _positive_order(p: Element) -> list[Block]:
    """Domain blocks of a positive element listed in the order of their comb images."""
    k = len(p.pairs)
    strips = comb_blocks(k, p.dim)
    where = {r: d for d, r in p.pairs}
    try:
        return [where[s] for s in strips]
    except KeyError:
        raise NotPositive("range is not a comb") from None


def decompose_positive(p: Element, verify: bool = True) -> Word:
    order = _positive_order(p)
    tree = ordered_tree(order, p.dim)
    if tree is None:
        raise NotPositive("no caret tree lists the domain in comb order")
    w = positive_word(tree)
    if verify and evaluate_word(w, p.dim) != p:
        raise UnverifiedDecomposition(f"positive word {w} does not evaluate to the element")
    return w


def _positive_word_for_order(order: Sequence[Block], dim: int) -> Word:
    tree = ordered_tree(order, dim)
    if tree is None:
        raise NotPositive("no caret tree lists the domain in this order")
    return positive_word(tree)


def adjacent_transpositions(sigma: Sequence[int]) -> list[int]:
    """Positions j of swaps (j, j+1) whose product, first to last, is sigma.

    Bubble sort on the image list: right-multiplying by a swap exchanges two
    entries, so sorting ``sigma * s_1 * ... * s_m`` to the identity gives
    ``sigma = s_m * ... * s_1`` as maps, i.e. apply s_1 first.
    """
    arr = list(sigma)
    out = []
    n = len(arr)
    for end in range(n - 1, 0, -1):
        for j in range(end):
            if arr[j] > arr[j + 1]:
                arr[j], arr[j + 1] = arr[j + 1], arr[j]
                out.append(j)
    return out


def decompose_permutation(k: int, sigma: Sequence[int], dim: int = 2, verify: bool = True) -> Word:
    """A word in p_{k-2}, q_{k-2} for the comb permutation strip j -> sigma[j]."""
    sigma = tuple(sigma)
    if sorted(sigma) != list(range(k)):
        raise ValueError(f"{list(sigma)} is not a permutation of {k}")
    if k < 2:
        return ()
    s = sym("p", k - 2)
    c = sym("q", k - 2)
    word: list[Symbol] = []
    for j in adjacent_transpositions(sigma):
        a = k - 2 - j
        word += [c] * a + [s] + [~c] * a
    out = free_reduce(word)
    if verify and evaluate_word(out, dim) != perm_element(k, sigma, dim):
        raise UnverifiedDecomposition(f"permutation word for {sigma} failed verification")
    return out


def semi_normal_form(x: Element) -> SemiNormalForm:
    dom_order, sigma, ran_order = _split_orders(x)
    return SemiNormalForm(_positive_word_for_order(dom_order, x.dim), len(sigma), sigma,
                          _positive_word_for_order(ran_order, x.dim))


def decompose(x: Element, verify: bool = True) -> Word:
    """Word over the infinite families evaluating to x (checked when ``verify``)."""
    nf = semi_normal_form(x)
    w = free_reduce(nf.positive_p + decompose_permutation(nf.perm_size, nf.sigma, x.dim, verify=False)
                    + inverse_word(nf.positive_q))
    if verify and evaluate_word(w, x.dim) != x:
        raise UnverifiedDecomposition("semi-normal form word does not evaluate to the element")
    return w


def upper_bound_length(x: Element, full_check: bool = False) -> tuple[Word, int]:
    """Certified word over the finite set.

    The infinite-family word is always checked against ``x``; the rewriting
    step is sound because every shift relation it uses was verified by the
    relation table.  ``full_check`` additionally evaluates the final word.
    """
    w = shift_rewrite(decompose(x), x.dim)
    if full_check and evaluate_word(w, x.dim) != x:
        raise UnverifiedDecomposition("finite-set word does not evaluate to the element")
    return w, len(w)


def monotone(w: Sequence[Symbol]) -> bool:
    """Positive-word shape: C indices strictly increasing, then A/B indices nondecreasing."""
    cs = [s.index for s in w if s.family == "C"]
    rest = [s for s in w if s.family != "C"]
    n_c = len(cs)
    if any(s.family == "C" for s in w[n_c:]) or any(s.family not in "C" for s in w[:n_c]):
        return False
    if any(a >= b for a, b in zip(cs, cs[1:])):
        return False
    idx = [s.index for s in rest]
    return all(s.family in "AB" and not s.inverse for s in rest) and idx == sorted(idx)
