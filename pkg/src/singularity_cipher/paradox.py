"""Bits as geometric glyphs: a filled right triangle for 0, a missing-square
arrangement for 1.

Both glyphs share the 13 x 5 right-triangle footprint.  The 1-glyph is five
pieces with a 1 x 1 hole, so its pieces cover 32.0 units against the
triangle's 32.5; decoding only looks at that area deficit, which makes it
independent of the drawing scale.

Images are written as a small SVG subset::

    <svg xmlns=... width=W height=H data-columns=C data-cell="15x7">
      <polygon points="x,y x,y x,y"/>
      ...
    </svg>

Cells are 15 x 7 units with the glyph drawn at offset (1, 1), row-major.
"""
from __future__ import annotations

import math
import re
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .codec import BitStream, from_bitstream
from .errors import (
    AmbiguousCell,
    DegeneratePolygon,
    EmptyImage,
    FramingError,
    LengthMismatch,
    MalformedDocument,
    MalformedHeader,
    OrphanPolygon,
)

Point = Tuple[float, float]
Polygon = Tuple[Point, ...]

CELL_W = 15
CELL_H = 7
GLYPH_ORIGIN = (1, 1)

ZERO_AREA = 32.5
ONE_AREA = 32.0

# Filled-area ratio: 1.0 for a 0-glyph, 32/32.5 for a 1-glyph.
BIT_THRESHOLD = 0.99
RATIO_MIN = 0.95
RATIO_MAX = 1.01

SVG_NS = "http://www.w3.org/2000/svg"


def signed_area(poly) -> float:
    n = len(poly)
    s = 0.0
    for i in range(n):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % n]
        s += x0 * y1 - x1 * y0
    return s / 2


def polygon_area(poly) -> float:
    """Shoelace area of a simple polygon."""
    if len(poly) < 3:
        raise DegeneratePolygon(f"polygon needs at least 3 vertices, got {len(poly)}")
    return abs(signed_area(poly))


@dataclass(frozen=True)
class Glyph:
    kind: int  # the encoded bit
    polygons: tuple[Polygon, ...]

    def area(self) -> float:
        return sum(polygon_area(p) for p in self.polygons)


_ZERO = Glyph(0, (((0, 0), (13, 0), (13, 5)),))
_ONE = Glyph(1, (
    ((0, 0), (5, 0), (5, 2)),
    ((5, 2), (13, 2), (13, 5)),
    ((5, 0), (13, 0), (13, 1), (5, 1)),
    ((5, 1), (10, 1), (10, 2), (5, 2)),
    ((11, 1), (13, 1), (13, 2), (11, 2)),
))
_GLYPHS = (_ZERO, _ONE)


def glyph_zero() -> Glyph:
    return _ZERO


def glyph_one() -> Glyph:
    return _ONE


def fill_ratio(glyph: Glyph) -> float:
    """Covered area over the area of the glyph's right-triangle footprint.

    The footprint is half the bounding box of all vertices, which is the
    convex hull area for any cell drawn as one of the two glyphs.
    """
    pts = [pt for poly in glyph.polygons for pt in poly]
    xs = [x for x, _ in pts]
    ys = [y for _, y in pts]
    footprint = (max(xs) - min(xs)) * (max(ys) - min(ys)) / 2
    if footprint == 0:
        return math.inf
    return glyph.area() / footprint


@dataclass(frozen=True)
class CipherImage:
    columns: int
    cells: Sequence[Glyph]

    def __post_init__(self):
        if self.columns < 1:
            raise ValueError("columns must be >= 1")

    @property
    def rows(self) -> int:
        return -(-len(self.cells) // self.columns)

    def kinds(self) -> list[int]:
        return [g.kind for g in self.cells]


def assemble_image(bs: BitStream, columns: int = 16) -> CipherImage:
    if columns < 1:
        raise ValueError("columns must be >= 1")
    return CipherImage(columns, tuple(_GLYPHS[b] for b in bs.bits.tolist()))


def fmt(v: float) -> str:
    s = f"{v:.3f}".rstrip("0").rstrip(".")
    return "0" if s == "-0" else s


def render_svg(img: CipherImage) -> str:
    cols = img.columns
    # list() keeps lazily built cells alive so id() stays unique per cell
    cells = list(img.cells)
    out = [
        f'<svg xmlns="{SVG_NS}" version="1.1" width="{fmt(cols * CELL_W)}" '
        f'height="{fmt(img.rows * CELL_H)}" data-columns="{cols}" '
        f'data-cell="{CELL_W}x{CELL_H}">\n'
    ]
    # x coordinates depend only on (glyph, column) and y coordinates only on
    # (glyph, row), so each row is one pre-joined template filled once.
    unique = {}
    for g in cells:
        if id(g) not in unique:
            unique[id(g)] = g
    local_ys = sorted({y for g in unique.values() for poly in g.polygons for _, y in poly})
    slot = {y: k for k, y in enumerate(local_ys)}
    by_value: dict = {}
    templates = {}
    for key, g in unique.items():
        if g not in by_value:
            by_value[g] = [
                "".join(
                    '<polygon points="'
                    + " ".join(f"{fmt(col * CELL_W + GLYPH_ORIGIN[0] + x)},{{{slot[y]}}}" for x, y in poly)
                    + '"/>\n'
                    for poly in g.polygons
                )
                for col in range(cols)
            ]
        templates[key] = by_value[g]
    for row in range(img.rows):
        oy = row * CELL_H + GLYPH_ORIGIN[1]
        row_cells = cells[row * cols:(row + 1) * cols]
        tmpl = "".join([templates[id(g)][c] for c, g in enumerate(row_cells)])
        out.append(tmpl.format(*[fmt(oy + y) for y in local_ys]))
    out.append("</svg>\n")
    return "".join(out)


# --- parsing ---------------------------------------------------------------

_PROLOG_RE = re.compile(r"<\?xml[^>]*\?>|<!--.*?-->", re.S)
_ATTR_RE = re.compile(r"([\w:.-]+)\s*=\s*(\"[^\"]*\"|'[^']*')")
_TAG_NAME_RE = re.compile(r"<\s*/?\s*([^\s/>]*)")
_POLYGON_RE = re.compile(r"<polygon(?:\s[^>]*)?/>|<polygon(?:\s[^>]*)?>\s*</polygon\s*>")
_POINTS_RE = re.compile(r"\spoints\s*=\s*(?:\"([^\"]*)\"|'([^']*)')")
_POINTS_FAST_RE = re.compile(r' points="([^"]*)"')
_CELL_RE = re.compile(r"(\d+)x(\d+)")


def _attrs(text: str) -> dict[str, str]:
    found = {k: v[1:-1] for k, v in _ATTR_RE.findall(text)}
    if _ATTR_RE.sub("", text).strip(" \t\r\n/"):
        raise MalformedDocument(f"unparseable attributes: {text.strip()!r}")
    return found


def _number(attrs: dict, name: str) -> float:
    try:
        v = float(attrs[name])
    except KeyError:
        raise MalformedDocument(f"root element lacks {name!r}") from None
    except ValueError:
        raise MalformedDocument(f"bad {name!r}: {attrs[name]!r}") from None
    if not math.isfinite(v) or v <= 0:
        raise MalformedDocument(f"{name!r} must be positive, got {attrs[name]!r}")
    return v


class ParsedCells(Sequence):
    """Cells recovered from a document, kept as flat arrays.

    Glyph objects are built on access; decoding reads the precomputed fill
    ratios directly.
    """

    def __init__(self, xs, ys, poly_starts, cell_starts, ratios):
        self._xs = xs
        self._ys = ys
        self._poly_starts = poly_starts  # len = polygons + 1
        self._cell_starts = cell_starts  # len = cells + 1, indexes polygons
        self.ratios = ratios
        self.kinds = (ratios <= BIT_THRESHOLD).astype(np.uint8)

    def __len__(self):
        return self.ratios.size

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(len(self)))]
        if i < 0:
            i += len(self)
        if not 0 <= i < len(self):
            raise IndexError(i)
        polys = []
        for k in range(self._cell_starts[i], self._cell_starts[i + 1]):
            a, b = self._poly_starts[k], self._poly_starts[k + 1]
            polys.append(tuple(zip(self._xs[a:b].tolist(), self._ys[a:b].tolist())))
        return Glyph(int(self.kinds[i]), tuple(polys))


def _split_document(doc: str) -> tuple[dict, str]:
    doc = _PROLOG_RE.sub("", doc).strip()
    if not doc.startswith("<svg") or doc[4:5] not in (" ", "\t", "\r", "\n", ">", "/"):
        raise MalformedDocument("document does not start with an <svg> element")
    head_end = doc.find(">")
    if head_end < 0:
        raise MalformedDocument("unterminated <svg> tag")
    head = doc[4:head_end]
    if head.endswith("/"):
        if doc[head_end + 1:].strip():
            raise MalformedDocument("content after self-closing <svg/>")
        return _attrs(head[:-1]), ""
    close = doc.rfind("</svg")
    if close < head_end or doc[close + 5:].strip() != ">":
        raise MalformedDocument("missing </svg> at end of document")
    return _attrs(head), doc[head_end + 1:close]


def _polygon_points(body: str) -> list[str]:
    if _POLYGON_RE.sub("", body).strip():
        names = set(_TAG_NAME_RE.findall(body)) - {"polygon"}
        if names:
            raise MalformedDocument(f"unexpected elements: {sorted(names)}")
        raise MalformedDocument("stray text or unbalanced tags between elements")
    count = body.count("<polygon")
    points = _POINTS_FAST_RE.findall(body)
    if len(points) != count:
        points = [a or b for a, b in _POINTS_RE.findall(body)]
    if len(points) != count:
        raise MalformedDocument("<polygon> without points")
    return points


_DIGIT, _MINUS, _DOT, _COMMA, _SPACE, _END = range(6)
_CHAR_CLASS = np.full(256, -1, dtype=np.int8)
_CHAR_CLASS[ord("0"):ord("9") + 1] = _DIGIT
_CHAR_CLASS[ord("-")] = _MINUS
_CHAR_CLASS[ord(".")] = _DOT
_CHAR_CLASS[ord(",")] = _COMMA
for _c in " \t\r\n":
    _CHAR_CLASS[ord(_c)] = _SPACE
_CHAR_CLASS[ord(";")] = _END


def _vertex_counts(joined: str, npoly: int) -> np.ndarray:
    """Validate ``;``-terminated ``x,y x,y`` lists; return vertices per list.

    Numbers are ``-?digits(.digits)?`` with at most three fraction digits.
    Checks run over the whole byte string at once.
    """
    try:
        raw = np.frombuffer(joined.encode("ascii"), dtype=np.uint8)
    except UnicodeEncodeError:
        raise MalformedDocument("non-ASCII character in points") from None
    cls = _CHAR_CLASS[raw]
    if (cls < 0).any():
        raise MalformedDocument("unexpected character in points")
    ends = np.flatnonzero(cls == _END)
    if ends.size != npoly:
        raise MalformedDocument("';' inside points attribute")
    seps = np.flatnonzero(cls >= _SPACE)
    commas = np.flatnonzero(cls == _COMMA)
    dots = np.flatnonzero(cls == _DOT)
    minus = np.flatnonzero(cls == _MINUS)
    digit = np.concatenate((cls == _DIGIT, np.zeros(5, dtype=bool)))
    before = np.concatenate(([_SPACE], cls))  # before[i] is the class of byte i - 1

    if not (digit[dots - 1].all() and digit[dots + 1].all()):
        raise MalformedDocument("malformed decimal in points")
    if (digit[dots + 1] & digit[dots + 2] & digit[dots + 3] & digit[dots + 4]).any():
        raise MalformedDocument("more than 3 fraction digits in points")
    if not digit[minus + 1].all() or not (before[minus] >= _COMMA).all():
        raise MalformedDocument("misplaced '-' in points")
    after = cls[np.minimum(commas + 1, cls.size - 1)]
    if not digit[commas - 1].all() or not ((after == _DIGIT) | (after == _MINUS)).all():
        raise MalformedDocument("malformed coordinate pair in points")

    # at most one dot per number; exactly one comma per non-empty token
    bounds = np.union1d(seps, commas)
    if (np.diff(np.searchsorted(bounds, dots)) == 0).any():
        raise MalformedDocument("malformed decimal in points")
    token = np.searchsorted(seps, commas)
    nonempty = np.count_nonzero(np.diff(np.concatenate(([-1], seps))) > 1)
    if (np.diff(token) == 0).any() or commas.size != nonempty:
        raise MalformedDocument("points must be whitespace-separated x,y pairs")

    return np.bincount(np.searchsorted(ends, commas), minlength=npoly)


def parse_svg(doc: str) -> CipherImage:
    """Recover the glyph grid from a rendered document.

    Polygons are assigned to cells by the centre of their bounding box, on a
    lattice whose pitch is ``width / data-columns``; any uniform scaling of
    the whole document is therefore tolerated.
    """
    root, body = _split_document(doc)
    points = _polygon_points(body)
    if not points:
        raise EmptyImage("document contains no polygons")

    try:
        columns = int(root["data-columns"])
    except (KeyError, ValueError):
        raise MalformedDocument("root needs an integer data-columns attribute") from None
    if columns < 1:
        raise MalformedDocument("data-columns must be >= 1")
    cell = _CELL_RE.fullmatch(root.get("data-cell", ""))
    if cell is None or int(cell.group(1)) == 0 or int(cell.group(2)) == 0:
        raise MalformedDocument("root needs a data-cell attribute like '15x7'")
    cell_w, cell_h = int(cell.group(1)), int(cell.group(2))
    pitch_x = _number(root, "width") / columns
    pitch_y = pitch_x * cell_h / cell_w
    height = _number(root, "height")
    unit = pitch_x / cell_w

    joined = ";".join(points) + ";"
    counts = _vertex_counts(joined, len(points))
    if counts.min() < 3:
        raise MalformedDocument("polygon with fewer than 3 vertices")
    coords = np.fromstring(joined.replace(",", " ").replace(";", " "), dtype=np.float64, sep=" ")
    if coords.size != 2 * counts.sum():
        raise MalformedDocument("bad coordinate in points")
    xs, ys = coords[0::2], coords[1::2]

    starts = np.concatenate(([0], np.cumsum(counts)))
    first = starts[:-1]
    nxt = np.arange(1, xs.size + 1)
    nxt[starts[1:] - 1] = first
    cross = xs * ys[nxt] - xs[nxt] * ys
    areas = np.abs(np.add.reduceat(cross, first)) / 2
    xmin = np.minimum.reduceat(xs, first)
    xmax = np.maximum.reduceat(xs, first)
    ymin = np.minimum.reduceat(ys, first)
    ymax = np.maximum.reduceat(ys, first)

    col = np.floor((xmin + xmax) / 2 / pitch_x).astype(np.int64)
    row = np.floor((ymin + ymax) / 2 / pitch_y).astype(np.int64)
    nrows = max(1, round(height / pitch_y))
    bad = (col < 0) | (col >= columns) | (row < 0) | (row >= nrows)
    if bad.any():
        k = int(np.flatnonzero(bad)[0])
        raise OrphanPolygon(f"polygon {k} lies outside the {columns}-column grid")

    cell_idx = row * columns + col
    order = np.argsort(cell_idx, kind="stable")
    cell_idx = cell_idx[order]
    ncells = int(cell_idx[-1]) + 1
    per_cell = np.bincount(cell_idx, minlength=ncells)
    if (per_cell == 0).any():
        k = int(np.flatnonzero(per_cell == 0)[0])
        raise MalformedDocument(f"cell {k} has no polygons")
    cell_starts = np.concatenate(([0], np.cumsum(per_cell)))
    cfirst = cell_starts[:-1]

    area_sum = np.add.reduceat(areas[order], cfirst)
    footprint = (
        (np.maximum.reduceat(xmax[order], cfirst) - np.minimum.reduceat(xmin[order], cfirst))
        * (np.maximum.reduceat(ymax[order], cfirst) - np.minimum.reduceat(ymin[order], cfirst))
        / 2
    )
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(footprint > 0, area_sum / footprint, np.inf)

    # Vertices back in the glyph's local frame, in cell order.
    if (np.diff(order) < 0).any():
        vert_order = np.concatenate([np.arange(starts[k], starts[k + 1]) for k in order])
        xs, ys = xs[vert_order], ys[vert_order]
        starts = np.concatenate(([0], np.cumsum(counts[order])))
    vcell = np.repeat(cell_idx, counts[order])
    lx = (xs - (vcell % columns) * pitch_x) / unit - GLYPH_ORIGIN[0]
    ly = (ys - (vcell // columns) * pitch_y) / unit - GLYPH_ORIGIN[1]
    return CipherImage(columns, ParsedCells(lx, ly, starts, cell_starts, ratios))


def cell_ratios(img: CipherImage) -> np.ndarray:
    cells = img.cells
    if isinstance(cells, ParsedCells):
        return cells.ratios
    return np.array([fill_ratio(g) for g in cells], dtype=np.float64)


def decode_bits(img: CipherImage) -> BitStream:
    """Classify each cell by its filled-area ratio and reassemble the frame."""
    ratios = cell_ratios(img)
    bad = (ratios < RATIO_MIN) | (ratios > RATIO_MAX)
    if bad.any():
        k = int(np.flatnonzero(bad)[0])
        raise AmbiguousCell(f"cell {k} has fill ratio {ratios[k]:.5f}")
    bs = BitStream((ratios <= BIT_THRESHOLD).astype(np.uint8))
    try:
        from_bitstream(bs)
    except (MalformedHeader, LengthMismatch) as e:
        raise FramingError(str(e)) from e
    return bs


_SCALABLE_ATTR_RE = re.compile(r"(\s(?:width|height)\s*=\s*\")([^\"]*)(\")")
_POINTS_ATTR_RE = re.compile(r"(\spoints\s*=\s*\")([^\"]*)(\")")
_NUMBER_RE = re.compile(r"-?\d+(?:\.\d+)?")


def scale_document(doc: str, factor: float) -> str:
    """Multiply every coordinate and the root width/height by ``factor``."""
    def scale_numbers(m):
        nums = _NUMBER_RE.sub(lambda n: fmt(float(n.group()) * factor), m.group(2))
        return m.group(1) + nums + m.group(3)

    head, sep, rest = doc.partition(">")
    head = _SCALABLE_ATTR_RE.sub(scale_numbers, head)
    return head + sep + _POINTS_ATTR_RE.sub(scale_numbers, rest)
