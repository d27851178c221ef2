"""Caret trees, tree-pair diagrams and their text grammar.

Tree grammar::

    tree := "L" | "(" dir tree tree ")"

e.g. ``(0 (1 L L) L)``.  A diagram is ``tree | [p0,p1,...] | tree`` where the
bracketed list sends domain leaf ``i`` to range leaf ``p[i]``.  Leaves are
numbered depth-first, low child first.
"""
from __future__ import annotations

import random
import re
from dataclasses import dataclass
from typing import Sequence, Union

from . import geometry as geo
from .elements import Element, make_element
from .errors import DimensionMismatch, InvalidPattern, NotBijective, ParseError
from .geometry import Block, Pattern


class Leaf:
    __slots__ = ()

    def __repr__(self) -> str:
        return "L"


LEAF = Leaf()


@dataclass(frozen=True)
class Caret:
    direction: int
    low: "Tree"
    high: "Tree"

    def __repr__(self) -> str:
        return format_tree(self)


Tree = Union[Leaf, Caret]


def leaf_count(t: Tree) -> int:
    return 1 if isinstance(t, Leaf) else leaf_count(t.low) + leaf_count(t.high)


def caret_count(t: Tree) -> int:
    return leaf_count(t) - 1


def tree_depth(t: Tree) -> int:
    return 0 if isinstance(t, Leaf) else 1 + max(tree_depth(t.low), tree_depth(t.high))


def max_direction(t: Tree) -> int:
    if isinstance(t, Leaf):
        return -1
    return max(t.direction, max_direction(t.low), max_direction(t.high))


def tree_to_pattern(t: Tree, dim: int) -> tuple[Pattern, list[Block]]:
    """The partition a tree describes, plus its leaves in depth-first order."""
    if max_direction(t) >= dim:
        raise DimensionMismatch(f"tree uses direction {max_direction(t)} in dimension {dim}")
    order: list[Block] = []
    stack: list[tuple[Tree, Block]] = [(t, geo.cube(dim))]
    while stack:
        node, region = stack.pop()
        if isinstance(node, Leaf):
            order.append(region)
            continue
        lo, hi = geo.split_block(region, node.direction)
        stack.append((node.high, hi))
        stack.append((node.low, lo))
    return Pattern(dim, tuple(sorted(order))), order


def pattern_to_canonical_tree(p: Pattern | Sequence[Block], dim: int | None = None) -> Tree:
    """The tree cutting each region in the smallest valid direction."""
    if isinstance(p, Pattern):
        dim, blocks = p.dim, list(p.blocks)
    else:
        blocks = list(p)
        dim = dim if dim is not None else len(blocks[0])

    def build(region: Block, bs: list[Block]) -> Tree:
        if len(bs) == 1:
            if bs[0] != region:
                raise InvalidPattern("measure deficit", geo.format_block(region))
            return LEAF
        d = geo.split_direction(region, bs)
        if d is None:
            raise InvalidPattern("non-hierarchical", geo.format_block(region))
        level = region[d][1]
        lo, hi = geo.split_block(region, d)
        low = [b for b in bs if geo._side(b, d, level) == 0]
        high = [b for b in bs if geo._side(b, d, level) == 1]
        return Caret(d, build(lo, low), build(hi, high))

    return build(geo.cube(dim), blocks)


def ordered_tree(order: Sequence[Block], dim: int) -> Tree | None:
    """The tree whose depth-first leaf order is exactly ``order``, or None.

    When such a tree exists it is unique: two different root cuts cannot both
    put all low leaves before all high leaves.
    """
    def build(region: Block, items: list[tuple[int, Block]]) -> Tree | None:
        if len(items) == 1:
            return LEAF if items[0][1] == region else None
        for d in range(dim):
            level = region[d][1]
            if not all(b[d][1] > level for _, b in items):
                continue
            sides = [geo._side(b, d, level) for _, b in items]
            low = [it for it, s in zip(items, sides) if s == 0]
            high = [it for it, s in zip(items, sides) if s == 1]
            if not low or not high or max(i for i, _ in low) > min(i for i, _ in high):
                continue
            lo, hi = geo.split_block(region, d)
            a = build(lo, low)
            b = build(hi, high)
            if a is None or b is None:
                return None
            return Caret(d, a, b)
        return None

    return build(geo.cube(dim), list(enumerate(order)))


def leaves(t: Tree, dim: int) -> list[Block]:
    return tree_to_pattern(t, dim)[1]


def random_tree(rng: random.Random, carets: int, dim: int) -> Tree:
    """Grow a tree by splitting a uniformly chosen leaf in a uniform direction."""
    # leaves held as mutable path lists so a split can be applied in place
    root: list = [None]
    slots = [(root, 0)]
    for _ in range(carets):
        holder, idx = slots.pop(rng.randrange(len(slots)))
        node = [rng.randrange(dim), None, None]
        holder[idx] = node
        slots.append((node, 1))
        slots.append((node, 2))

    def freeze(n) -> Tree:
        if n is None:
            return LEAF
        return Caret(n[0], freeze(n[1]), freeze(n[2]))

    return freeze(root[0])


def all_trees(leaves_: int, direction: int) -> list[Tree]:
    """Every tree with the given number of leaves and a single caret direction."""
    if leaves_ == 1:
        return [LEAF]
    out = []
    for k in range(1, leaves_):
        for a in all_trees(k, direction):
            for b in all_trees(leaves_ - k, direction):
                out.append(Caret(direction, a, b))
    return out


# grammar ---------------------------------------------------------------------

def format_tree(t: Tree) -> str:
    if isinstance(t, Leaf):
        return "L"
    return f"({t.direction} {format_tree(t.low)} {format_tree(t.high)})"


_TOKEN = re.compile(r"\s*(\(|\)|L|\d+)")


def parse_tree(text: str) -> Tree:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        tokens.append((m.group(1), m.start(1)))
        pos = m.end()
    i = 0

    def take() -> tuple[str, int]:
        nonlocal i
        if i >= len(tokens):
            raise ParseError("unexpected end of tree", len(text))
        i += 1
        return tokens[i - 1]

    def tree() -> Tree:
        tok, at = take()
        if tok == "L":
            return LEAF
        if tok != "(":
            raise ParseError(f"expected 'L' or '(' but got {tok!r}", at)
        d, at = take()
        if not d.isdigit():
            raise ParseError(f"expected a direction but got {d!r}", at)
        low = tree()
        high = tree()
        tok, at = take()
        if tok != ")":
            raise ParseError(f"expected ')' but got {tok!r}", at)
        return Caret(int(d), low, high)

    t = tree()
    if i != len(tokens):
        raise ParseError("trailing input after tree", tokens[i][1])
    return t


@dataclass(frozen=True)
class TreePairDiagram:
    dim: int
    dom: Tree
    perm: tuple[int, ...]
    ran: Tree

    def __post_init__(self) -> None:
        k = leaf_count(self.dom)
        if leaf_count(self.ran) != k:
            raise NotBijective(f"trees have {k} and {leaf_count(self.ran)} leaves")
        if sorted(self.perm) != list(range(k)):
            raise NotBijective(f"{list(self.perm)} is not a permutation of {k} leaves")

    def __str__(self) -> str:
        return format_diagram(self)


def format_perm(perm: Sequence[int]) -> str:
    return "[" + ",".join(str(i) for i in perm) + "]"


def parse_perm(text: str, offset: int = 0) -> tuple[int, ...]:
    s = text.strip()
    if not (s.startswith("[") and s.endswith("]")):
        raise ParseError("permutation must be a bracketed list", offset)
    body = s[1:-1].strip()
    if not body:
        return ()
    try:
        return tuple(int(x) for x in body.split(","))
    except ValueError:
        raise ParseError("permutation entries must be integers", offset) from None


def format_diagram(d: TreePairDiagram) -> str:
    return f"{format_tree(d.dom)} | {format_perm(d.perm)} | {format_tree(d.ran)}"


def parse_diagram(text: str, dim: int) -> TreePairDiagram:
    parts = text.split("|")
    if len(parts) != 3:
        raise ParseError("a diagram has three '|'-separated parts", 0)
    offsets = [0, len(parts[0]) + 1, len(parts[0]) + len(parts[1]) + 2]
    try:
        dom = parse_tree(parts[0])
    except ParseError as exc:
        raise ParseError(str(exc).rsplit(" (at", 1)[0], exc.position) from None
    perm = parse_perm(parts[1], offsets[1])
    try:
        ran = parse_tree(parts[2])
    except ParseError as exc:
        raise ParseError(str(exc).rsplit(" (at", 1)[0], exc.position + offsets[2]) from None
    return TreePairDiagram(dim, dom, perm, ran)


def diagram_to_element(d: TreePairDiagram) -> Element:
    """Pair domain leaf i with range leaf perm[i]."""
    _, dom = tree_to_pattern(d.dom, d.dim)
    _, ran = tree_to_pattern(d.ran, d.dim)
    return make_element([(dom[i], ran[d.perm[i]]) for i in range(len(dom))], d.dim)


def element_to_diagram(e: Element) -> TreePairDiagram:
    dom_tree = pattern_to_canonical_tree(e.domain)
    ran_tree = pattern_to_canonical_tree(e.range)
    dom_order = leaves(dom_tree, e.dim)
    ran_index = {b: i for i, b in enumerate(leaves(ran_tree, e.dim))}
    image = dict(e.pairs)
    perm = tuple(ran_index[image[b]] for b in dom_order)
    return TreePairDiagram(e.dim, dom_tree, perm, ran_tree)
