"""Word-length experiments: Cayley balls, bound checks, C0 powers, distortion, counting.

CSV files written here have fixed headers and are written atomically, so an
aborted run never leaves a half-written table behind.
"""
from __future__ import annotations

import csv
import io
import itertools
import math
import os
import tempfile
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import mpmath

from .elements import (
    Element, block_count, conjugate, depth, identity, power, serialize,
)
from .errors import BallTooLarge, BoundViolation
from .generators import (
    Symbol, evaluate_word, finite_set_with_inverses, generator, sym,
)
from .normal_form import upper_bound_length
from .trees import TreePairDiagram, all_trees, diagram_to_element

DEFAULT_BUDGET = 2_000_000


# Cayley balls -----------------------------------------------------------------

@dataclass(frozen=True)
class BallRecord:
    key: bytes
    length: int
    blocks: int
    depth: int
    upper_bound: int | None = None


def bfs_ball(radius: int, dim: int, gens: Sequence[Symbol] | None = None,
             budget: int = DEFAULT_BUDGET, upper_bounds: bool = True) -> dict[bytes, BallRecord]:
    """Every element of word length <= radius, with its exact length.

    The frontier is expanded in key order and generators in list order, so the
    result does not depend on anything but the arguments.
    """
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    gens = list(gens) if gens is not None else finite_set_with_inverses(dim)
    gen_elems = [generator(s, dim) for s in gens]
    e = identity(dim)
    found: dict[bytes, tuple[int, Element]] = {serialize(e): (0, e)}
    frontier = [(serialize(e), e)]
    for length in range(1, radius + 1):
        nxt: dict[bytes, Element] = {}
        for _, x in frontier:
            for g in gen_elems:
                y = x * g
                k = serialize(y)
                if k in found or k in nxt:
                    continue
                nxt[k] = y
                if len(found) + len(nxt) > budget:
                    raise BallTooLarge(f"ball of radius {radius} exceeds {budget} elements")
        for k in sorted(nxt):
            found[k] = (length, nxt[k])
        frontier = sorted(nxt.items())
    out = {}
    for k in sorted(found):
        length, x = found[k]
        ub = upper_bound_length(x)[1] if upper_bounds else None
        out[k] = BallRecord(k, length, block_count(x), depth(x), ub)
    return out


@dataclass
class BoundReport:
    dim: int
    records: int
    max_length: int
    # ratios over records with at least two blocks
    length_over_log: tuple[float, float, float] = (math.nan, math.nan, math.nan)
    length_over_nlogn: tuple[float, float, float] = (math.nan, math.nan, math.nan)
    max_growth_base: float = 1.0
    max_depth_ratio: float = 0.0
    checked: list[str] = field(default_factory=list)

    def lines(self) -> list[str]:
        def fmt(t: tuple[float, float, float]) -> str:
            return "min %.4f max %.4f mean %.4f" % t
        return [
            f"dim {self.dim}: {self.records} elements, max length {self.max_length}",
            f"checked: {', '.join(self.checked)}",
            f"length / log2(blocks): {fmt(self.length_over_log)}",
            f"length / (blocks log2(blocks)): {fmt(self.length_over_nlogn)}",
            f"max blocks^(1/length): {self.max_growth_base:.4f}",
            f"max depth / length: {self.max_depth_ratio:.4f}",
        ]


def _stats(xs: list[float]) -> tuple[float, float, float]:
    if not xs:
        return (math.nan, math.nan, math.nan)
    return (min(xs), max(xs), sum(xs) / len(xs))


def check_bounds(ball: Mapping[bytes, BallRecord], dim: int) -> BoundReport:
    """Raise BoundViolation on the first record breaking a bound; otherwise summarize.

    blocks <= 4^length is asserted in dimension 2 only; elsewhere the largest
    observed base is reported instead.
    """
    checked = ["depth <= 3*length"]
    if dim == 2:
        checked.insert(0, "blocks <= 4^length")
    with_ub = all(r.upper_bound is not None for r in ball.values())
    if with_ub:
        checked.append("length <= upper bound")
    log_ratio, nlogn_ratio = [], []
    base, depth_ratio = 1.0, 0.0
    for r in ball.values():
        name = r.key.decode()
        if dim == 2 and r.blocks > 4 ** r.length:
            raise BoundViolation(f"{name}: {r.blocks} blocks at length {r.length}")
        if r.depth > 3 * r.length:
            raise BoundViolation(f"{name}: depth {r.depth} at length {r.length}")
        if with_ub and r.length > r.upper_bound:
            raise BoundViolation(f"{name}: length {r.length} above upper bound {r.upper_bound}")
        if r.length:
            base = max(base, r.blocks ** (1 / r.length))
            depth_ratio = max(depth_ratio, r.depth / r.length)
        if r.blocks > 1:
            lg = math.log2(r.blocks)
            log_ratio.append(r.length / lg)
            nlogn_ratio.append(r.length / (r.blocks * lg))
    return BoundReport(dim, len(ball), max((r.length for r in ball.values()), default=0),
                       _stats(log_ratio), _stats(nlogn_ratio), base, depth_ratio, checked)


# C0 powers and distortion --------------------------------------------------------

def bit_reverse(j: int, n: int) -> int:
    return int(format(j, f"0{n}b")[::-1], 2) if n else 0


def _only_direction(blocks: Iterable, d: int) -> bool:
    return all(all(iv[1] == 0 for a, iv in enumerate(b) if a != d) for b in blocks)


@dataclass(frozen=True)
class C0Row:
    n: int
    blocks: int
    depth: int
    domain_horizontal: bool
    range_vertical: bool
    bit_reversal: bool


def c0_is_bit_reversal(x: Element, n: int) -> bool:
    """Horizontal strip j of height 2^-n goes to vertical strip bit_reverse(j)."""
    if block_count(x) != 1 << n:
        return False
    image = dict(x.pairs)
    for j in range(1 << n):
        dom = ((0, 0), (j, n)) + ((0, 0),) * (x.dim - 2)
        ran = ((bit_reverse(j, n), n),) + ((0, 0),) * (x.dim - 1)
        if image.get(dom) != ran:
            return False
    return True


def experiment_c0_growth(n_max: int, dim: int = 2, strict: bool = True) -> list[C0Row]:
    """Powers C0^n for n = 1..n_max; ``strict`` raises BoundViolation on any failed check."""
    c0 = generator(sym("C", 0), dim)
    x = identity(dim)
    rows = []
    for n in range(1, n_max + 1):
        x = x * c0
        row = C0Row(n, block_count(x), depth(x), _only_direction(x.domain, 1),
                    _only_direction(x.range, 0), c0_is_bit_reversal(x, n))
        if strict and not (row.blocks == 1 << n and row.depth == n and row.domain_horizontal
                           and row.range_vertical and row.bit_reversal):
            raise BoundViolation(f"C0^{n} fails its checks: {row}")
        rows.append(row)
    return rows


@dataclass(frozen=True)
class DistortionRow:
    n: int
    word_length: int
    blocks: int
    vertical_only: bool


def distortion_word(n: int) -> tuple[Symbol, ...]:
    c0 = sym("C", 0)
    return (~c0,) * n + (sym("A", 0),) + (c0,) * n


GROWTH_WINDOW = (1.8, 2.2)


def experiment_distortion(n_max: int, dim: int = 2, check_words: bool = True,
                          strict: bool = True) -> list[DistortionRow]:
    """g_n = C0^-n A0 C0^n for n = 0..n_max.

    Each g_n only cuts in direction 0, so it lies in the copy of F, while its
    word over the finite set has length 2n+1.  With ``check_words`` the word is
    evaluated and compared with the conjugate.  ``strict`` raises
    BoundViolation unless every g_n is vertical-only and the block counts grow
    by a factor inside GROWTH_WINDOW from n = 6 on.
    """
    a0 = generator(sym("A", 0), dim)
    c0 = generator(sym("C", 0), dim)
    rows = []
    for n in range(n_max + 1):
        g = conjugate(a0, power(c0, n))
        w = distortion_word(n)
        if check_words and evaluate_word(w, dim) != g:
            raise AssertionError(f"distortion word for n={n} does not evaluate to g_n")
        row = DistortionRow(n, len(w), block_count(g),
                            _only_direction(g.domain, 0) and _only_direction(g.range, 0))
        if strict and not row.vertical_only:
            raise BoundViolation(f"g_{n} cuts in a direction other than 0")
        if strict and n >= 6:
            ratio = row.blocks / rows[-1].blocks
            if not GROWTH_WINDOW[0] <= ratio <= GROWTH_WINDOW[1]:
                raise BoundViolation(f"g_{n} grows by {ratio} over g_{n - 1}")
        rows.append(row)
    return rows


# counting ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def catalan(m: int) -> int:
    """C_0 = 1, C_{m+1} = sum C_i C_{m-i}."""
    if m < 0:
        raise ValueError("catalan index must be nonnegative")
    if m == 0:
        return 1
    return sum(catalan(i) * catalan(m - 1 - i) for i in range(m))


def count_mixed(k: int) -> int:
    """Elements with k leaves, all-horizontal domain tree and all-vertical range tree."""
    if k < 1:
        raise ValueError("need at least one leaf")
    return catalan(k - 1) ** 2 * math.factorial(k)


ENUMERATE_LIMIT = 6


def enumerate_mixed(k: int, dim: int = 2) -> set[Element]:
    if k < 1:
        raise ValueError("need at least one leaf")
    if k > ENUMERATE_LIMIT:
        raise ValueError(f"enumerate_mixed is limited to k <= {ENUMERATE_LIMIT}")
    out = set()
    for dom in all_trees(k, 1):
        for ran in all_trees(k, 0):
            for perm in itertools.permutations(range(k)):
                out.add(diagram_to_element(TreePairDiagram(dim, dom, perm, ran)))
    return out


PRECISION = 50


@dataclass(frozen=True)
class CountRow:
    n: int
    trees: int
    elements: int
    stirling: mpmath.mpf
    stirling_ratio: mpmath.mpf
    corrected: mpmath.mpf
    corrected_ratio: mpmath.mpf
    genericity: mpmath.mpf


@dataclass
class CountTable:
    """Rows for n = 1..n_max.

    Columns: trees = C_n, elements = C_n^2 n! (n counts carets per tree here,
    while count_mixed counts leaves), stirling = sqrt(2/pi) 16^n e^-n n^(n-2)
    as printed in the source estimate, corrected = the same with n^(n-5/2),
    the ratios exact/estimate, and genericity = n^n / elements.  Arithmetic
    uses mpmath at PRECISION significant digits.
    """
    rows: list[CountRow]

    HEADER = ("n_carets", "catalan", "elements", "stirling", "exact_over_stirling",
              "stirling_corrected", "exact_over_corrected", "genericity")

    def as_csv_rows(self) -> list[list[str]]:
        def f(x: mpmath.mpf) -> str:
            return mpmath.nstr(x, 20)
        return [[str(r.n), str(r.trees), str(r.elements), f(r.stirling), f(r.stirling_ratio),
                 f(r.corrected), f(r.corrected_ratio), f(r.genericity)] for r in self.rows]


def genericity_table(n_max: int) -> CountTable:
    if not 1 <= n_max <= 64:
        raise ValueError("n_max must be in 1..64")
    rows = []
    with mpmath.workdps(PRECISION):
        for n in range(1, n_max + 1):
            c = catalan(n)
            exact = c * c * math.factorial(n)
            base = mpmath.sqrt(2 / mpmath.pi) * mpmath.mpf(16) ** n / mpmath.e ** n
            stirling = base * mpmath.mpf(n) ** (n - 2)
            corrected = base * mpmath.mpf(n) ** (mpmath.mpf(n) - mpmath.mpf(5) / 2)
            rows.append(CountRow(n, c, exact, stirling, exact / stirling, corrected,
                                 exact / corrected, mpmath.mpf(n) ** n / exact))
    return CountTable(rows)


# output ---------------------------------------------------------------------------

def atomic_write(path: str | os.PathLike, data: bytes | str) -> None:
    """Write to a temporary file beside ``path``, then rename over it."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(data, str):
        data = data.encode()
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _csv_text(header: Sequence[str], rows: Iterable[Sequence[object]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


BALL_HEADER = ("key", "length", "blocks", "depth", "upper_bound")
C0_HEADER = ("n", "blocks", "depth", "domain_horizontal", "range_vertical", "bit_reversal")
DISTORTION_HEADER = ("n", "word_length", "blocks", "vertical_only")


def write_ball_csv(path, ball: Mapping[bytes, BallRecord]) -> None:
    rows = [(r.key.decode(), r.length, r.blocks, r.depth, "" if r.upper_bound is None else r.upper_bound)
            for r in ball.values()]
    atomic_write(path, _csv_text(BALL_HEADER, rows))


def write_c0_csv(path, rows: Sequence[C0Row]) -> None:
    atomic_write(path, _csv_text(C0_HEADER, [(r.n, r.blocks, r.depth, int(r.domain_horizontal),
                                               int(r.range_vertical), int(r.bit_reversal)) for r in rows]))


def write_distortion_csv(path, rows: Sequence[DistortionRow]) -> None:
    atomic_write(path, _csv_text(DISTORTION_HEADER, [(r.n, r.word_length, r.blocks, int(r.vertical_only))
                                                     for r in rows]))


def write_counts_csv(path, table: CountTable) -> None:
    atomic_write(path, _csv_text(CountTable.HEADER, table.as_csv_rows()))


def write_manifest(path, settings: Mapping[str, object]) -> None:
    """One ``key = value`` line per setting, sorted by key."""
    atomic_write(path, "".join(f"{k} = {settings[k]}\n" for k in sorted(settings)))
