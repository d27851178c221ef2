"""ASCII and SVG pictures of partitions, caret trees and tree-pair diagrams.

Partitions are drawn with y increasing upwards, so the first half of a
direction-1 cut is the bottom rectangle.  ASCII output uses only ``+-|``,
spaces and digits.  Block labels are leaf numbers: for a diagram, the range
block receiving domain leaf i is labelled i as well, so matching numbers show
the map.
"""
from __future__ import annotations

import xml.etree.ElementTree as ET
from typing import Sequence

from .elements import Element
from .errors import UnsupportedDimension
from .geometry import Block, Pattern
from .trees import Leaf, Tree, TreePairDiagram, element_to_diagram, leaves, pattern_to_canonical_tree

SVG_NS = "http://www.w3.org/2000/svg"


def _check_dim(dim: int) -> None:
    if dim > 2:
        raise UnsupportedDimension(f"cannot draw a partition of the {dim}-cube")


def _numbered(p: Pattern, order: Sequence[Block] | None,
              labels: Sequence[int] | None) -> list[tuple[Block, int]]:
    if order is None:
        order = leaves(pattern_to_canonical_tree(p), p.dim)
    if labels is None:
        labels = range(len(order))
    return list(zip(order, labels))


def _extent(b: Block, dim: int, scale: tuple[int, int]) -> tuple[int, int, int, int]:
    """Block corners (x0, x1, y0, y1) on an integer grid of ``scale`` cells."""
    (xn, xl) = b[0]
    x0 = xn << (scale[0] - xl)
    x1 = (xn + 1) << (scale[0] - xl)
    if dim == 1:
        return x0, x1, 0, 1
    yn, yl = b[1]
    return x0, x1, yn << (scale[1] - yl), (yn + 1) << (scale[1] - yl)


def _levels(blocks: Sequence[Block], dim: int) -> tuple[int, int]:
    lx = max(b[0][1] for b in blocks)
    ly = max(b[1][1] for b in blocks) if dim == 2 else 0
    return lx, ly


def pattern_ascii(p: Pattern, numbered: bool = True, order: Sequence[Block] | None = None,
                  labels: Sequence[int] | None = None) -> str:
    _check_dim(p.dim)
    items = _numbered(p, order, labels)
    lx, ly = _levels(p.blocks, p.dim)
    width = max(3, len(str(max(lab for _, lab in items))) + 2)
    cw, ch = width + 1, 2
    cols, rows = (1 << lx) * cw + 1, (1 << ly) * ch + 1
    grid = [[" "] * cols for _ in range(rows)]

    def put(r: int, c: int, ch_: str) -> None:
        old = grid[r][c]
        if old == " " or old == ch_:
            grid[r][c] = ch_
        else:
            grid[r][c] = "+"

    top = 1 << ly
    for b, lab in items:
        x0, x1, y0, y1 = _extent(b, p.dim, (lx, ly))
        c0, c1 = x0 * cw, x1 * cw
        r0, r1 = (top - y1) * ch, (top - y0) * ch
        for c in range(c0, c1 + 1):
            put(r0, c, "-")
            put(r1, c, "-")
        for r in range(r0, r1 + 1):
            put(r, c0, "|")
            put(r, c1, "|")
        for r, c in ((r0, c0), (r0, c1), (r1, c0), (r1, c1)):
            grid[r][c] = "+"
        if numbered:
            text = str(lab)
            r = (r0 + r1) // 2
            c = (c0 + c1 - len(text) + 1) // 2
            for k, t in enumerate(text):
                grid[r][c + k] = t
    return "\n".join("".join(row).rstrip() for row in grid) + "\n"


def tree_ascii(t: Tree) -> str:
    """One line per node: carets as ``-+<direction>``, leaves as ``--<leaf number>``."""
    lines: list[str] = []
    counter = [0]

    def walk(node: Tree, head: str, prefix: str) -> None:
        if isinstance(node, Leaf):
            lines.append(f"{head}--{counter[0]}")
            counter[0] += 1
            return
        lines.append(f"{head}-+{node.direction}")
        walk(node.low, prefix + " +", prefix + " |")
        walk(node.high, prefix + " +", prefix + "  ")

    walk(t, "", "")
    return "\n".join(line.rstrip() for line in lines) + "\n"


def diagram_ascii(d: TreePairDiagram, numbered: bool = True) -> str:
    _check_dim(d.dim)
    dom_order = leaves(d.dom, d.dim)
    ran_order = leaves(d.ran, d.dim)
    ran_labels = [0] * len(ran_order)
    for i, j in enumerate(d.perm):
        ran_labels[j] = i
    left = pattern_ascii(Pattern(d.dim, tuple(sorted(dom_order))), numbered, dom_order).splitlines()
    right = pattern_ascii(Pattern(d.dim, tuple(sorted(ran_order))), numbered, ran_order,
                          ran_labels).splitlines()
    w = max(len(s) for s in left)
    n = max(len(left), len(right))
    left += [""] * (n - len(left))
    right += [""] * (n - len(right))
    return "\n".join(f"{a:<{w}}    {b}".rstrip() for a, b in zip(left, right)) + "\n"


def _svg_panel(parent: ET.Element, items: Sequence[tuple[Block, int]], dim: int,
               x_off: float, size: float, numbered: bool) -> None:
    lx, ly = _levels([b for b, _ in items], dim)
    sx, sy = size / (1 << lx), size / (1 << ly)
    for b, lab in items:
        x0, x1, y0, y1 = _extent(b, dim, (lx, ly))
        x, y = x_off + x0 * sx, size - y1 * sy
        w, h = (x1 - x0) * sx, (y1 - y0) * sy
        ET.SubElement(parent, "rect", {
            "x": f"{x:g}", "y": f"{y:g}", "width": f"{w:g}", "height": f"{h:g}",
            "fill": "none", "stroke": "black", "stroke-width": "1"})
        if numbered:
            text = ET.SubElement(parent, "text", {
                "x": f"{x + w / 2:g}", "y": f"{y + h / 2:g}", "font-size": f"{min(w, h, 24) / 2:g}",
                "text-anchor": "middle", "dominant-baseline": "middle"})
            text.text = str(lab)


def _svg_document(width: float, height: float) -> ET.Element:
    return ET.Element("svg", {
        "xmlns": SVG_NS, "version": "1.1", "width": f"{width:g}", "height": f"{height:g}",
        "viewBox": f"0 0 {width:g} {height:g}"})


def _svg_bytes(root: ET.Element) -> bytes:
    return b'<?xml version="1.0" encoding="UTF-8"?>\n' + ET.tostring(root, encoding="utf-8",
                                                                    xml_declaration=False) + b"\n"


def pattern_svg(p: Pattern, numbered: bool = True, order: Sequence[Block] | None = None,
                size: float = 256) -> bytes:
    _check_dim(p.dim)
    root = _svg_document(size, size)
    _svg_panel(root, _numbered(p, order, None), p.dim, 0, size, numbered)
    return _svg_bytes(root)


def diagram_svg(d: TreePairDiagram, numbered: bool = True, size: float = 256) -> bytes:
    _check_dim(d.dim)
    gap = size / 4
    root = _svg_document(2 * size + gap, size)
    dom_order = leaves(d.dom, d.dim)
    ran_order = leaves(d.ran, d.dim)
    ran_items = [(ran_order[j], i) for i, j in enumerate(d.perm)]
    _svg_panel(ET.SubElement(root, "g", {"id": "domain"}), list(zip(dom_order, range(len(dom_order)))),
               d.dim, 0, size, numbered)
    _svg_panel(ET.SubElement(root, "g", {"id": "range"}), ran_items, d.dim, size + gap, size, numbered)
    return _svg_bytes(root)


def render(obj: Pattern | TreePairDiagram | Element | Tree, fmt: str = "ascii",
           numbered: bool = True) -> str | bytes:
    """Dispatch on the object: trees draw as ASCII trees, everything else as partitions."""
    if isinstance(obj, Element):
        obj = element_to_diagram(obj)
    if fmt not in ("ascii", "svg"):
        raise ValueError(f"unknown format {fmt!r}")
    if isinstance(obj, Pattern):
        return pattern_ascii(obj, numbered) if fmt == "ascii" else pattern_svg(obj, numbered)
    if isinstance(obj, TreePairDiagram):
        return diagram_ascii(obj, numbered) if fmt == "ascii" else diagram_svg(obj, numbered)
    if fmt == "svg":
        raise ValueError("trees only render as ascii")
    return tree_ascii(obj)
