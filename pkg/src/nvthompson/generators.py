"""Generator families, words, and the index-shift rewriting onto a finite set.

Block tables (``comb(k)`` is the all-right vertical comb with ``k`` strips):

* ``A_i``: comb(i+2) with leaf i cut in direction 0, onto comb(i+3), in order.
* ``B_i.d``: comb(i+2) with leaf i cut in direction d, onto comb(i+3), in order.
* ``C_i.d``: comb(i+1) with its last leaf cut in direction d, onto comb(i+2), in order.
* ``p_i`` (pi): swap of the last two strips of comb(i+2).
* ``q_i`` (pi-bar): the cycle sending strip j to strip j+1 mod i+2 of comb(i+2).

Word grammar: whitespace separated tokens ``FAMILY INDEX ["." DIRECTION] ["'"]``,
e.g. ``C0' A1 B2.1 p1``; a trailing ``'`` marks an inverse.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Iterable, Sequence

from . import geometry as geo
from .elements import Element, identity, make_element, product
from .errors import DimensionMismatch, NotBijective, ParseError, RelationTableFailure
from .geometry import Block, Pattern

FAMILIES = "ABCpq"


@dataclass(frozen=True, order=True)
class Symbol:
    family: str
    index: int
    direction: int = 0
    inverse: bool = False

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.index < 0:
            raise ValueError("generator index must be nonnegative")
        if self.family in "BC":
            if self.direction < 1:
                raise ValueError(f"{self.family} needs a direction >= 1")
        elif self.direction != 0:
            raise ValueError(f"{self.family} is always direction 0")

    def __invert__(self) -> Symbol:
        return _inverted(self)

    def __str__(self) -> str:
        s = f"{self.family}{self.index}"
        if self.family in "BC" and self.direction != 1:
            s += f".{self.direction}"
        return s + ("'" if self.inverse else "")

    def base(self) -> Symbol:
        return replace(self, inverse=False)


@lru_cache(maxsize=None)
def _inverted(s: Symbol) -> Symbol:
    return replace(s, inverse=not s.inverse)


def sym(family: str, index: int, direction: int | None = None, inverse: bool = False) -> Symbol:
    if direction is None:
        direction = 1 if family in "BC" else 0
    return Symbol(family, index, direction, inverse)


Word = tuple[Symbol, ...]

_TOKEN_RE = re.compile(r"([ABCpq])(\d+)(?:\.(\d+))?(')?$")


def parse_word(text: str) -> Word:
    out = []
    for m in re.finditer(r"\S+", text):
        tok = _TOKEN_RE.match(m.group())
        if tok is None:
            raise ParseError(f"bad generator token {m.group()!r}", m.start())
        family, index, direction, prime = tok.groups()
        if direction is not None and family not in "BC":
            raise ParseError(f"family {family} takes no direction", m.start())
        try:
            out.append(sym(family, int(index), int(direction) if direction else None, bool(prime)))
        except ValueError as exc:
            raise ParseError(str(exc), m.start()) from None
    return tuple(out)


def format_word(w: Iterable[Symbol]) -> str:
    return " ".join(str(s) for s in w)


def inverse_word(w: Sequence[Symbol]) -> Word:
    return tuple(~s for s in reversed(w))


def free_reduce(w: Iterable[Symbol]) -> Word:
    out: list[Symbol] = []
    for s in w:
        t = out[-1] if out else None
        if (t is not None and t.inverse != s.inverse and t.family == s.family
                and t.index == s.index and t.direction == s.direction):
            out.pop()
        else:
            out.append(s)
    return tuple(out)


# concrete elements -------------------------------------------------------------

def comb_blocks(k: int, dim: int) -> list[Block]:
    """Strips of the all-right vertical tree with ``k`` leaves, left to right."""
    if k < 1:
        raise ValueError("comb needs at least one leaf")
    if k - 1 > geo.max_level():
        raise geo.OverflowLevel(f"comb({k}) exceeds max_level {geo.max_level()}")
    rest = ((0, 0),) * (dim - 1)
    out = [(((1 << (j + 1)) - 2, j + 1),) + rest for j in range(k - 1)]
    out.append((((1 << (k - 1)) - 1, k - 1),) + rest)
    return out


def comb(k: int, dim: int) -> Pattern:
    return Pattern(dim, tuple(sorted(comb_blocks(k, dim))))


def perm_element(k: int, sigma: Sequence[int], dim: int) -> Element:
    """Strip j of comb(k) onto strip sigma[j]."""
    if sorted(sigma) != list(range(k)):
        raise NotBijective(f"{list(sigma)} is not a permutation of {k} strips")
    strips = comb_blocks(k, dim)
    return make_element([(strips[j], strips[sigma[j]]) for j in range(k)], dim)


def _attach(k: int, leaf: int, direction: int, dim: int) -> Element:
    """comb(k) with ``leaf`` cut in ``direction``, mapped in order onto comb(k+1)."""
    strips = comb_blocks(k, dim)
    dom = strips[:leaf] + list(geo.split_block(strips[leaf], direction)) + strips[leaf + 1:]
    return make_element(list(zip(dom, comb_blocks(k + 1, dim))), dim)


def check_symbol(s: Symbol, dim: int) -> None:
    if s.family in "BC" and s.direction >= dim:
        raise DimensionMismatch(f"{s} needs direction {s.direction} < dimension {dim}")


@lru_cache(maxsize=None)
def generator(s: Symbol, dim: int) -> Element:
    check_symbol(s, dim)
    if s.inverse:
        return ~generator(s.base(), dim)
    i = s.index
    if s.family == "A":
        return _attach(i + 2, i, 0, dim)
    if s.family == "B":
        return _attach(i + 2, i, s.direction, dim)
    if s.family == "C":
        return _attach(i + 1, i, s.direction, dim)
    k = i + 2
    if s.family == "p":
        sigma = list(range(k))
        sigma[i], sigma[i + 1] = i + 1, i
        return perm_element(k, sigma, dim)
    return perm_element(k, [(j + 1) % k for j in range(k)], dim)


def evaluate_word(w: Iterable[Symbol], dim: int) -> Element:
    """Left-to-right product; the empty word is the identity."""
    return product((generator(s, dim) for s in w), dim)


def verify_relation(lhs: Sequence[Symbol], rhs: Sequence[Symbol], dim: int) -> bool:
    return evaluate_word(lhs, dim) == evaluate_word(rhs, dim)


def finite_set(dim: int) -> list[Symbol]:
    """The finite generating set: index 0 and 1 of every family (inverses not included)."""
    out = []
    for i in (0, 1):
        out.append(sym("A", i))
        for d in range(1, dim):
            out.append(sym("B", i, d))
        for d in range(1, dim):
            out.append(sym("C", i, d))
        out.append(sym("p", i))
        out.append(sym("q", i))
    return out


def finite_set_with_inverses(dim: int) -> list[Symbol]:
    out = []
    for s in finite_set(dim):
        out.extend((s, ~s))
    return out


def in_finite_set(s: Symbol) -> bool:
    return s.index <= 1


# index-shift rewriting -----------------------------------------------------------

A0, A1 = sym("A", 0), sym("A", 1)

# wrapper pairs (L, R) tried in order for G_{i+1} = L G_i R
SHIFT_CANDIDATES: tuple[tuple[Symbol, Symbol], ...] = (
    (~A0, A0),
    (A0, ~A0),
    (~A0, A1),
    (A0, ~A1),
    (~A1, A0),
    (A1, ~A0),
)


class RelationTable:
    """Verified shift relations ``G_{i+1} = L G_i R`` for each family and direction.

    Relations are checked by engine equality for every index from 1 up to the
    verified bound; :meth:`ensure` extends the bound on demand.
    """

    def __init__(self, dim: int, bound: int = 10):
        self.dim = dim
        self.wrappers: dict[tuple[str, int], tuple[Symbol, Symbol]] = {}
        self.verified: dict[tuple[str, int], int] = {}
        for family in FAMILIES:
            dirs = range(1, dim) if family in "BC" else (0,)
            for d in dirs:
                self._calibrate(family, d, bound)

    def _check(self, family: str, d: int, wrap: tuple[Symbol, Symbol], i: int) -> bool:
        left, right = wrap
        return verify_relation((Symbol(family, i + 1, d),),
                               (left, Symbol(family, i, d), right), self.dim)

    def _calibrate(self, family: str, d: int, bound: int) -> None:
        for wrap in SHIFT_CANDIDATES:
            if all(self._check(family, d, wrap, i) for i in range(1, bound)):
                self.wrappers[(family, d)] = wrap
                self.verified[(family, d)] = bound
                return
        raise RelationTableFailure(f"no verified shift relation for family {family} direction {d}")

    def ensure(self, family: str, d: int, index: int) -> None:
        key = (family, d)
        top = self.verified[key]
        for i in range(top, index):
            if not self._check(family, d, self.wrappers[key], i):
                raise RelationTableFailure(f"shift relation fails for {family}{i + 1}.{d}")
        self.verified[key] = max(top, index)

    def expand(self, s: Symbol) -> Word:
        """A word over indices <= 1 equal to ``s``."""
        if s.index <= 1:
            return (s,)
        self.ensure(s.family, s.direction, s.index)
        left, right = self.wrappers[(s.family, s.direction)]
        n = s.index - 1
        core = (left,) * n + (Symbol(s.family, 1, s.direction),) + (right,) * n
        return inverse_word(core) if s.inverse else core

    def lines(self) -> list[str]:
        out = []
        for (family, d), (left, right) in sorted(self.wrappers.items()):
            name = family + (f".{d}" if family in "BC" and d != 1 else "")
            top = self.verified[(family, d)]
            out.append(f"{name}[i+1] = {left} {name}[i] {right}    verified for indices 2..{top}")
        return out


@lru_cache(maxsize=None)
def relation_table(dim: int, bound: int = 10) -> RelationTable:
    return RelationTable(dim, bound)


def shift_rewrite(w: Sequence[Symbol], dim: int, table: RelationTable | None = None) -> Word:
    """Rewrite a word onto the finite set, then cancel adjacent inverse pairs."""
    table = table or relation_table(dim)
    out: list[Symbol] = []
    for s in w:
        check_symbol(s, dim)
        out.extend(table.expand(s))
    return free_reduce(out)
