"""Exact dyadic intervals, blocks and hierarchical partitions of the unit n-cube.

An interval is a pair ``(num, level)`` standing for ``[num/2^level, (num+1)/2^level]``.
A block is a tuple of intervals, one per coordinate.  Everything is a plain
tuple so blocks hash, compare and sort structurally.

Direction 0 is the x-axis (a "vertical" cut, drawn as a triangular caret),
direction 1 the y-axis (a "horizontal" cut, a square caret).
"""
from __future__ import annotations

import enum
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .errors import DimensionMismatch, InvalidAddress, InvalidPattern, OverflowLevel

Interval = tuple[int, int]
Block = tuple[Interval, ...]

DEFAULT_MAX_LEVEL = 64
_max_level = DEFAULT_MAX_LEVEL


def max_level() -> int:
    return _max_level


def set_max_level(level: int) -> None:
    global _max_level
    if level < 0:
        raise ValueError("max_level must be nonnegative")
    _max_level = level


@contextmanager
def level_cap(level: int) -> Iterator[None]:
    """Temporarily change the level cap."""
    old = _max_level
    set_max_level(level)
    try:
        yield
    finally:
        set_max_level(old)


class Relation(str, enum.Enum):
    EQUAL = "equal"
    A_INSIDE_B = "a-inside-b"
    B_INSIDE_A = "b-inside-a"
    DISJOINT = "disjoint"


def check_interval(iv: Interval) -> Interval:
    num, level = iv
    if level < 0 or num < 0 or num >= (1 << level):
        raise InvalidAddress(f"not a dyadic subinterval of [0,1]: {iv}")
    if level > _max_level:
        raise OverflowLevel(f"level {level} exceeds max_level {_max_level}")
    return (num, level)


def interval_inside(a: Interval, b: Interval) -> bool:
    """True when ``a`` is contained in ``b`` (not necessarily strictly)."""
    shift = a[1] - b[1]
    return shift >= 0 and (a[0] >> shift) == b[0]


def classify_intervals(a: Interval, b: Interval) -> Relation:
    if a == b:
        return Relation.EQUAL
    if interval_inside(a, b):
        return Relation.A_INSIDE_B
    if interval_inside(b, a):
        return Relation.B_INSIDE_A
    return Relation.DISJOINT


def cube(dim: int) -> Block:
    if dim < 1:
        raise DimensionMismatch("dimension must be positive")
    return ((0, 0),) * dim


def block_level(b: Block) -> int:
    """Sum of the interval levels: the depth of the block in any caret tree."""
    return sum(level for _, level in b)


def measure(b: Block) -> Fraction:
    return Fraction(1, 1 << block_level(b))


def contains(sup: Block, sub: Block) -> bool:
    return all(interval_inside(s, t) for s, t in zip(sub, sup))


def intersect(a: Block, b: Block) -> Block | None:
    """Intersection of two dyadic blocks, or None if they do not overlap."""
    out = []
    for x, y in zip(a, b):
        if x[1] >= y[1]:
            if (x[0] >> (x[1] - y[1])) != y[0]:
                return None
            out.append(x)
        else:
            if (y[0] >> (y[1] - x[1])) != x[0]:
                return None
            out.append(y)
    return tuple(out)


def split_block(b: Block, d: int) -> tuple[Block, Block]:
    """Halve ``b`` in coordinate ``d``; lower half first."""
    if not 0 <= d < len(b):
        raise DimensionMismatch(f"direction {d} invalid in dimension {len(b)}")
    num, level = b[d]
    if level + 1 > _max_level:
        raise OverflowLevel(f"splitting would exceed max_level {_max_level}")
    lo = b[:d] + ((2 * num, level + 1),) + b[d + 1:]
    hi = b[:d] + ((2 * num + 1, level + 1),) + b[d + 1:]
    return lo, hi


def relative_address(sub: Block, sup: Block) -> tuple[str, ...]:
    if len(sub) != len(sup):
        raise DimensionMismatch("blocks of different dimensions")
    out = []
    for (n, l), (m, k) in zip(sub, sup):
        shift = l - k
        if shift < 0 or (n >> shift) != m:
            raise InvalidAddress(f"{format_block(sub)} is not inside {format_block(sup)}")
        out.append(format(n - (m << shift), "b").zfill(shift) if shift else "")
    return tuple(out)


def transfer_subblock(sub: Block, frm: Block, to: Block) -> Block:
    """Push ``sub`` through the canonical affine map taking ``frm`` onto ``to``."""
    if not len(sub) == len(frm) == len(to):
        raise DimensionMismatch("blocks of different dimensions")
    out = []
    for (n, l), (fn, fl), (tn, tl) in zip(sub, frm, to):
        shift = l - fl
        if shift < 0 or (n >> shift) != fn:
            raise InvalidAddress(f"{format_block(sub)} is not inside {format_block(frm)}")
        level = tl + shift
        if level > _max_level:
            raise OverflowLevel(f"level {level} exceeds max_level {_max_level}")
        out.append(((tn << shift) + n - (fn << shift), level))
    return tuple(out)


def _transfer(sub: Block, frm: Block, to: Block) -> Block:
    # unchecked variant for the composition hot path
    out = []
    for (n, l), (fn, fl), (tn, tl) in zip(sub, frm, to):
        shift = l - fl
        out.append(((tn << shift) + n - (fn << shift), tl + shift))
    return tuple(out)


def split_direction(region: Block, blocks: Iterable[Block]) -> int | None:
    """Smallest direction in which every block is strictly finer than ``region``.

    For blocks tiling ``region`` hierarchically this is a valid root cut.
    """
    blocks = list(blocks)
    for d in range(len(region)):
        level = region[d][1]
        if all(b[d][1] > level for b in blocks):
            return d
    return None


def _side(b: Block, d: int, level: int) -> int:
    """0/1 for the half of a level-``level`` interval that ``b`` lies in, 2 if it spans both."""
    n, l = b[d]
    if l <= level:
        return 2
    return (n >> (l - level - 1)) & 1


def _check_blocks(blocks: Iterable[Block], dim: int) -> list[Block]:
    out = []
    for b in blocks:
        b = tuple(tuple(iv) for iv in b)
        if len(b) != dim:
            raise DimensionMismatch(f"block {b} is not {dim}-dimensional")
        for iv in b:
            check_interval(iv)
        out.append(b)
    return out


def _hierarchy(blocks: Sequence[Block], dim: int) -> None:
    """Raise InvalidPattern unless ``blocks`` tile the cube by iterated halving."""
    stack = [(cube(dim), list(blocks))]
    while stack:
        region, bs = stack.pop()
        if not bs:
            raise InvalidPattern("measure deficit", f"nothing covers {format_block(region)}")
        if len(bs) == 1:
            if bs[0] != region:
                raise InvalidPattern("measure deficit", f"{format_block(region)} only partly covered")
            continue
        d = split_direction(region, bs)
        if d is None:
            for i, a in enumerate(bs):
                for b in bs[i + 1:]:
                    if intersect(a, b) is not None:
                        raise InvalidPattern(
                            "overlap", f"{format_block(a)} meets {format_block(b)}")
            raise InvalidPattern("non-hierarchical", f"no halving of {format_block(region)}")
        level = region[d][1]
        lo, hi = split_block(region, d)
        halves: tuple[list[Block], list[Block]] = ([], [])
        for b in bs:
            halves[_side(b, d, level)].append(b)
        stack.append((hi, halves[1]))
        stack.append((lo, halves[0]))


@dataclass(frozen=True)
class Pattern:
    """A hierarchical dyadic partition of the n-cube, stored as a sorted block tuple."""

    dim: int
    blocks: tuple[Block, ...]

    def __len__(self) -> int:
        return len(self.blocks)

    def __iter__(self) -> Iterator[Block]:
        return iter(self.blocks)

    def __str__(self) -> str:
        return format_pattern(self)


def validate_pattern(blocks: Iterable[Block], dim: int) -> Pattern:
    bs = _check_blocks(blocks, dim)
    if len(set(bs)) != len(bs):
        raise InvalidPattern("overlap", "repeated block")
    _hierarchy(bs, dim)
    return Pattern(dim, tuple(sorted(bs)))


def overlay_indexed(p: Sequence[Block], q: Sequence[Block], dim: int) -> list[tuple[Block, int, int]]:
    """All nonempty intersections of a block of ``p`` with a block of ``q``.

    Returns ``(block, i, j)`` with ``block = p[i] & q[j]``.  Both inputs must be
    hierarchical partitions; the recursion follows the cuts of ``p``.
    """
    if len(p) == len(q):
        where = {b: j for j, b in enumerate(q)}
        if len(where) == len(q):
            hits = [where.get(b) for b in p]
            if None not in hits:
                return [(b, i, j) for i, (b, j) in enumerate(zip(p, hits))]
    out: list[tuple[Block, int, int]] = []
    stack = [(cube(dim), list(range(len(p))), list(range(len(q))))]
    while stack:
        region, ps, qs = stack.pop()
        if len(ps) == 1:
            i = ps[0]
            for j in qs:
                out.append((intersect(q[j], region), i, j))
            continue
        if len(qs) == 1:
            j = qs[0]
            for i in ps:
                out.append((intersect(p[i], region), i, j))
            continue
        d = split_direction(region, (p[i] for i in ps))
        if d is None:
            raise InvalidPattern("non-hierarchical", f"cannot split {format_block(region)}")
        level = region[d][1]
        lo, hi = split_block(region, d)
        pl: tuple[list[int], list[int], list[int]] = ([], [], [])
        for i in ps:
            pl[_side(p[i], d, level)].append(i)
        ql: tuple[list[int], list[int], list[int]] = ([], [], [])
        for j in qs:
            ql[_side(q[j], d, level)].append(j)
        stack.append((hi, pl[1], ql[1] + ql[2]))
        stack.append((lo, pl[0], ql[0] + ql[2]))
    return out


def overlay(p: Pattern, q: Pattern) -> Pattern:
    """Coarsest common refinement of two patterns."""
    if p.dim != q.dim:
        raise DimensionMismatch(f"dimensions {p.dim} and {q.dim}")
    pieces = overlay_indexed(p.blocks, q.blocks, p.dim)
    return Pattern(p.dim, tuple(sorted(b for b, _, _ in pieces)))


def refines(fine: Pattern, coarse: Pattern) -> bool:
    return all(sum(contains(c, b) for c in coarse) == 1 for b in fine)


# text forms ---------------------------------------------------------------

def format_block(b: Block) -> str:
    return " x ".join(f"{n}/2^{l}" for n, l in b)


def parse_block(text: str) -> Block:
    out = []
    for part in text.split("x"):
        part = part.strip()
        try:
            num, den = part.split("/")
            base, level = den.split("^")
            if base.strip() != "2":
                raise ValueError
            iv = (int(num), int(level))
        except ValueError:
            raise InvalidAddress(f"malformed interval {part!r}") from None
        out.append(check_interval(iv))
    return tuple(out)


def format_pattern(p: Pattern) -> str:
    return "\n".join(format_block(b) for b in p.blocks)


def parse_pattern(text: str, dim: int | None = None) -> Pattern:
    blocks = [parse_block(line) for line in text.splitlines() if line.strip()]
    if not blocks:
        raise InvalidPattern("measure deficit", "empty pattern")
    return validate_pattern(blocks, dim if dim is not None else len(blocks[0]))
