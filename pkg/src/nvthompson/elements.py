"""Elements of nV as bijections between dyadic partitions.

An element is stored as a sorted tuple of ``(domain block, range block)``
pairs; each pair is the canonical coordinate-wise affine map between the two
blocks.  Composition follows the convention *apply the left factor first*:
``compose(f, g)(p) == g(f(p))``.

Stored elements are always in canonical reduced form, so equality of
elements is equality of pair tuples.  Sibling merging alone is not enough for
that in dimension >= 2 (two different merge sequences can get stuck at
different partitions of the same size), so reduction finishes with a
minimum-size partition search that breaks ties by the smallest cut direction.
"""
from __future__ import annotations

import random
import re
from fractions import Fraction
from typing import Iterable, Sequence

from . import geometry as geo
from .errors import DecodeError, DimensionMismatch, InvalidAddress, NotBijective, OverflowLevel
from .geometry import Block, Pattern

Pair = tuple[Block, Block]


class Element:
    """A reduced element of nV.  Build with :func:`make_element` or the group operations."""

    __slots__ = ("dim", "pairs", "_hash")

    def __init__(self, dim: int, pairs: tuple[Pair, ...]):
        # trusted constructor: pairs must already be canonical
        self.dim = dim
        self.pairs = pairs
        self._hash = hash((dim, pairs))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Element):
            return NotImplemented
        return self.dim == other.dim and self.pairs == other.pairs

    def __hash__(self) -> int:
        return self._hash

    def __mul__(self, other: Element) -> Element:
        return compose(self, other)

    def __invert__(self) -> Element:
        return invert(self)

    def __len__(self) -> int:
        return len(self.pairs)

    def __repr__(self) -> str:
        body = ", ".join(f"{geo.format_block(d)} -> {geo.format_block(r)}" for d, r in self.pairs)
        return f"Element(dim={self.dim}, [{body}])"

    @property
    def domain(self) -> Pattern:
        return Pattern(self.dim, tuple(d for d, _ in self.pairs))

    @property
    def range(self) -> Pattern:
        return Pattern(self.dim, tuple(sorted(r for _, r in self.pairs)))

    def is_identity(self) -> bool:
        return len(self.pairs) == 1 and self.pairs[0][0] == self.pairs[0][1]


def identity(dim: int) -> Element:
    c = geo.cube(dim)
    return Element(dim, ((c, c),))


# reduction -------------------------------------------------------------------

def merge_siblings(pairs: Iterable[Pair], dim: int, rng: random.Random | None = None) -> list[Pair]:
    """Apply the sibling-merge rule until no merge is possible.

    Two pairs merge when their domains are the low/high halves of a block in
    direction ``a`` and their ranges are the low/high halves, in the same
    order, of a block in the same direction ``a``.  With ``rng`` the worklist
    is visited in a shuffled order.
    """
    table = dict(pairs)
    work = list(table)
    if rng is not None:
        rng.shuffle(work)
    dirs = list(range(dim))
    while work:
        d = work.pop()
        r = table.get(d)
        if r is None:
            continue
        if rng is not None:
            rng.shuffle(dirs)
        for a in dirs:
            n, l = d[a]
            if l == 0:
                continue
            sib = d[:a] + ((n ^ 1, l),) + d[a + 1:]
            rs = table.get(sib)
            if rs is None:
                continue
            if n & 1:
                lo_r, hi_r = rs, r
            else:
                lo_r, hi_r = r, rs
            rn, rl = lo_r[a]
            if rl == 0 or rn & 1 or hi_r[a] != (rn + 1, rl):
                continue
            if lo_r[:a] != hi_r[:a] or lo_r[a + 1:] != hi_r[a + 1:]:
                continue
            del table[d], table[sib]
            parent = d[:a] + ((n >> 1, l - 1),) + d[a + 1:]
            table[parent] = lo_r[:a] + ((rn >> 1, rl - 1),) + lo_r[a + 1:]
            work.append(parent)
            if rng is not None:
                work.insert(rng.randrange(len(work)), work.pop())
            break
    return list(table.items())


def _affine_target(region: Block, pieces: Sequence[Pair]) -> Block | None:
    """Block S such that the map restricted to ``region`` is the canonical map region -> S."""
    d0, r0 = pieces[0]
    p0 = geo.intersect(d0, region)
    img0 = p0 if d0 == r0 else geo._transfer(p0, d0, r0)
    target = []
    for (pn, pl), (rn, rl), (qn, ql) in zip(p0, region, img0):
        k = pl - rl
        tl = ql - k
        if tl < 0:
            return None
        tn = qn >> k
        if qn - (tn << k) != pn - (rn << k):
            return None
        target.append((tn, tl))
    target_t = tuple(target)
    for d, r in pieces[1:]:
        p = geo.intersect(d, region)
        if geo._transfer(p, d, r) != geo._transfer(p, region, target_t):
            return None
    return target_t


def canonical_pairs(pairs: Sequence[Pair], dim: int) -> tuple[Pair, ...]:
    """Minimum-size affine partition of the domain, ties broken by smallest cut direction."""
    if len(pairs) == 1:
        return tuple(pairs)
    memo: dict[Block, tuple[int, int, Block | None]] = {}

    def solve(region: Block, pieces: list[Pair]) -> int:
        hit = memo.get(region)
        if hit is not None:
            return hit[0]
        target = _affine_target(region, pieces)
        if target is not None:
            memo[region] = (1, -1, target)
            return 1
        best_cost, best_dir = -1, -1
        for a in range(dim):
            level = region[a][1]
            if not any(d[a][1] > level for d, _ in pieces):
                continue
            lo, hi = geo.split_block(region, a)
            halves: tuple[list[Pair], list[Pair], list[Pair]] = ([], [], [])
            for pc in pieces:
                halves[geo._side(pc[0], a, level)].append(pc)
            cost = solve(lo, halves[0] + halves[2]) + solve(hi, halves[1] + halves[2])
            if best_cost < 0 or cost < best_cost:
                best_cost, best_dir = cost, a
        memo[region] = (best_cost, best_dir, None)
        return best_cost

    root = geo.cube(dim)
    solve(root, list(pairs))
    out = []
    stack = [root]
    while stack:
        region = stack.pop()
        _, a, target = memo[region]
        if target is not None:
            out.append((region, target))
        else:
            stack.extend(geo.split_block(region, a))
    out.sort()
    return tuple(out)


def reduce_pairs(pairs: Iterable[Pair], dim: int, rng: random.Random | None = None) -> tuple[Pair, ...]:
    merged = merge_siblings(pairs, dim, rng)
    if dim == 1:
        # in one dimension the sibling-merge fixpoint is already unique
        merged.sort()
        return tuple(merged)
    return canonical_pairs(merged, dim)


def reduce(e: Element, rng: random.Random | None = None) -> Element:
    return Element(e.dim, reduce_pairs(e.pairs, e.dim, rng))


def make_element(pairs: Iterable[Pair], dim: int) -> Element:
    """Validate a block bijection and return it reduced."""
    pairs = [(tuple(map(tuple, d)), tuple(map(tuple, r))) for d, r in pairs]
    if not pairs:
        raise NotBijective("no pairs")
    doms = [d for d, _ in pairs]
    rans = [r for _, r in pairs]
    for b in doms + rans:
        if len(b) != dim:
            raise DimensionMismatch(f"block {b} is not {dim}-dimensional")
    if len(set(doms)) != len(doms) or len(set(rans)) != len(rans):
        raise NotBijective("a block is used twice")
    geo.validate_pattern(doms, dim)
    geo.validate_pattern(rans, dim)
    return Element(dim, reduce_pairs(pairs, dim))


# group operations --------------------------------------------------------------

def compose_pairs(fp: Sequence[Pair], gp: Sequence[Pair], dim: int) -> list[Pair]:
    """Unreduced pairs of ``compose`` (f first, then g)."""
    pieces = geo.overlay_indexed([r for _, r in fp], [d for d, _ in gp], dim)
    cap = geo.max_level()
    out = []
    for c, i, j in pieces:
        d1, r1 = fp[i]
        d2, r2 = gp[j]
        a = d1 if c == r1 else geo._transfer(c, r1, d1)
        b = r2 if c == d2 else geo._transfer(c, d2, r2)
        out.append((a, b))
    for a, b in out:
        for _, level in a + b:
            if level > cap:
                raise OverflowLevel(f"level {level} exceeds max_level {cap}")
    return out


def compose(f: Element, g: Element) -> Element:
    if f.dim != g.dim:
        raise DimensionMismatch(f"dimensions {f.dim} and {g.dim}")
    if f.is_identity():
        return g
    if g.is_identity():
        return f
    return Element(f.dim, reduce_pairs(compose_pairs(f.pairs, g.pairs, f.dim), f.dim))


def product(factors: Iterable[Element], dim: int) -> Element:
    """Left-to-right product; reduction is deferred to the end except for cheap merges."""
    pairs: list[Pair] | None = None
    for g in factors:
        if g.dim != dim:
            raise DimensionMismatch(f"dimensions {dim} and {g.dim}")
        if pairs is None:
            pairs = list(g.pairs)
        elif not g.is_identity():
            pairs = merge_siblings(compose_pairs(pairs, g.pairs, dim), dim)
    if pairs is None:
        return identity(dim)
    return Element(dim, reduce_pairs(pairs, dim))


def invert(e: Element) -> Element:
    return Element(e.dim, tuple(sorted((r, d) for d, r in e.pairs)))


def equals(e: Element, f: Element) -> bool:
    return e == f


def power(e: Element, m: int) -> Element:
    if m < 0:
        e, m = invert(e), -m
    result = identity(e.dim)
    base = e
    while m:
        if m & 1:
            result = compose(result, base)
        m >>= 1
        if m:
            base = compose(base, base)
    return result


def conjugate(e: Element, g: Element) -> Element:
    """``g^-1 e g``: apply g^-1, then e, then g."""
    return compose(compose(invert(g), e), g)


def _locate(iv: geo.Interval, x: Fraction) -> bool:
    n, l = iv
    lo = Fraction(n, 1 << l)
    hi = Fraction(n + 1, 1 << l)
    return lo <= x < hi or (x == 1 and hi == 1)


def eval_point(e: Element, point: Sequence[Fraction | int]) -> tuple[Fraction, ...]:
    """Image of a point; blocks are closed below and open above except at 1."""
    p = tuple(Fraction(x) for x in point)
    if len(p) != e.dim:
        raise DimensionMismatch(f"point has {len(p)} coordinates, element has {e.dim}")
    if any(x < 0 or x > 1 for x in p):
        raise InvalidAddress(f"point {p} is outside the cube")
    for d, r in e.pairs:
        if all(_locate(iv, x) for iv, x in zip(d, p)):
            return tuple(
                Fraction(rn, 1 << rl) + (x - Fraction(dn, 1 << dl)) * Fraction(1 << dl, 1 << rl)
                for (dn, dl), (rn, rl), x in zip(d, r, p))
    raise AssertionError("domain blocks do not cover the cube")


def block_count(e: Element) -> int:
    return len(e.pairs)


def caret_count(e: Element) -> int:
    return len(e.pairs) - 1


def depth(e: Element) -> int:
    return max(max(geo.block_level(d), geo.block_level(r)) for d, r in e.pairs)


def random_element(rng: random.Random | int, size: int, dim: int) -> Element:
    """Two random caret trees with ``size`` carets each and a uniform permutation, reduced."""
    from .trees import random_tree, tree_to_pattern

    if not isinstance(rng, random.Random):
        rng = random.Random(rng)
    _, dom = tree_to_pattern(random_tree(rng, size, dim), dim)
    _, ran = tree_to_pattern(random_tree(rng, size, dim), dim)
    rng.shuffle(ran)
    return Element(dim, reduce_pairs(list(zip(dom, ran)), dim))


# serialization -------------------------------------------------------------------

_MAGIC = b"nV/"


def serialize(e: Element) -> bytes:
    """Canonical bytes: ``nV/<dim>/`` then ``;``-separated ``dom=ran`` pairs, blocks as ``n.l:n.l``.

    The identity of 2V encodes as ``b"nV/2/0.0:0.0=0.0:0.0"``.
    """
    def blk(b: Block) -> str:
        return ":".join(f"{n}.{l}" for n, l in b)

    body = ";".join(f"{blk(d)}={blk(r)}" for d, r in e.pairs)
    return _MAGIC + f"{e.dim}/{body}".encode("ascii")


_PAIR_RE = re.compile(r"^(\d+\.\d+(?::\d+\.\d+)*)=(\d+\.\d+(?::\d+\.\d+)*)$")


def deserialize(data: bytes) -> Element:
    try:
        text = data.decode("ascii")
    except UnicodeDecodeError:
        raise DecodeError("not ASCII") from None
    if not text.startswith(_MAGIC.decode()):
        raise DecodeError("missing nV/ prefix")
    try:
        dim_s, body = text[len(_MAGIC):].split("/", 1)
        dim = int(dim_s)
    except ValueError:
        raise DecodeError("malformed header") from None
    pairs = []
    for item in body.split(";"):
        m = _PAIR_RE.match(item)
        if m is None:
            raise DecodeError(f"malformed pair {item!r}")
        pairs.append(tuple(
            tuple(tuple(int(v) for v in iv.split(".")) for iv in side.split(":"))
            for side in m.groups()))
    try:
        e = make_element(pairs, dim)
    except Exception as exc:
        raise DecodeError(str(exc)) from exc
    if serialize(e) != data:
        raise DecodeError("not in canonical form")
    return e


def format_element(e: Element) -> str:
    lines = [f"dim: {e.dim}", "pairs:"]
    lines += [f"from {geo.format_block(d)} -> to {geo.format_block(r)}" for d, r in e.pairs]
    return "\n".join(lines) + "\n"


def parse_element(text: str) -> Element:
    """Read the element file format; unreduced pair lists are accepted and reduced."""
    dim = None
    pairs = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#") or line == "pairs:":
            continue
        if line.startswith("dim:"):
            dim = int(line[4:])
            continue
        m = re.match(r"^from (.+?) -> to (.+)$", line)
        if m is None:
            raise DecodeError(f"unrecognized line {raw!r}")
        pairs.append((geo.parse_block(m.group(1)), geo.parse_block(m.group(2))))
    if dim is None:
        raise DecodeError("missing dim field")
    return make_element(pairs, dim)
