import random
import re
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from shapely.geometry import Polygon as ShapelyPolygon, box

from singularity_cipher.codec import BitStream, from_bitstream, to_bitstream
from singularity_cipher.errors import (
    AmbiguousCell,
    DegeneratePolygon,
    EmptyImage,
    FramingError,
    MalformedDocument,
    OrphanPolygon,
)
from singularity_cipher.paradox import (
    CipherImage,
    Glyph,
    assemble_image,
    cell_ratios,
    decode_bits,
    fill_ratio,
    fmt,
    glyph_one,
    glyph_zero,
    parse_svg,
    polygon_area,
    render_svg,
    scale_document,
    signed_area,
)


def exact_area(poly):
    """Shoelace in rational arithmetic."""
    pts = [(Fraction(x), Fraction(y)) for x, y in poly]
    s = sum(x0 * y1 - x1 * y0 for (x0, y0), (x1, y1) in zip(pts, pts[1:] + pts[:1]))
    return abs(s) / 2


def random_stream(rng, n):
    return BitStream([rng.randrange(2) for _ in range(n)])


def polygon_count(doc):
    return len(re.findall(r"<polygon\b", doc))


# polygon_area

@pytest.mark.parametrize("poly, area", [
    (((0, 0), (1, 0), (1, 1), (0, 1)), 1.0),
    (((0, 0), (13, 0), (13, 5)), 32.5),
    (((5, 0), (13, 0), (13, 1), (5, 1)), 8.0),
])
def test_polygon_area_examples(poly, area):
    assert polygon_area(poly) == area
    assert polygon_area(poly[::-1]) == area


def test_polygon_area_degenerate():
    with pytest.raises(DegeneratePolygon):
        polygon_area(((0, 0), (1, 1)))


# glyphs

def test_glyph_zero():
    g = glyph_zero()
    assert g.kind == 0
    assert len(g.polygons) == 1
    assert exact_area(g.polygons[0]) == Fraction(65, 2)
    assert g.area() == 32.5
    assert signed_area(g.polygons[0]) > 0


def test_glyph_one_areas_exact():
    g = glyph_one()
    assert g.kind == 1
    assert [exact_area(p) for p in g.polygons] == [5, 12, 8, 5, 2]
    assert sum(exact_area(p) for p in g.polygons) == 32
    assert exact_area(glyph_zero().polygons[0]) - sum(exact_area(p) for p in g.polygons) == Fraction(1, 2)
    assert g.area() == 32.0


def test_glyph_polygons_valid_and_counterclockwise():
    for g in (glyph_zero(), glyph_one()):
        for poly in g.polygons:
            assert len(poly) >= 3
            assert signed_area(poly) > 0
            assert ShapelyPolygon(poly).is_valid


def test_glyph_one_pieces_disjoint():
    pieces = [ShapelyPolygon(p) for p in glyph_one().polygons]
    for a, b in combinations(pieces, 2):
        assert a.intersection(b).area == 0


def test_glyph_one_bulge_and_hole():
    # the bent hypotenuse through (5, 2) pokes 0.5 outside the triangle,
    # while the 1x1 hole leaves 1.0 of the triangle uncovered
    pieces = [ShapelyPolygon(p) for p in glyph_one().polygons]
    union = pieces[0]
    for p in pieces[1:]:
        union = union.union(p)
    footprint = ShapelyPolygon(glyph_zero().polygons[0])
    assert union.area == pytest.approx(32.0)
    assert union.difference(footprint).area == pytest.approx(0.5)
    assert footprint.difference(union).area == pytest.approx(1.0)
    assert union.intersection(box(10, 1, 11, 2)).area == 0


def test_deficit_ratio_is_one_sixty_fifth():
    zero = exact_area(glyph_zero().polygons[0])
    one = sum(exact_area(p) for p in glyph_one().polygons)
    assert (zero - one) / zero == Fraction(1, 65)


def test_fill_ratios():
    assert fill_ratio(glyph_zero()) == 1.0
    assert fill_ratio(glyph_one()) == pytest.approx(32 / 32.5, abs=1e-12)
    assert fill_ratio(glyph_one()) == pytest.approx(0.98462, abs=1e-5)


# assembly

def test_assemble_full_rows():
    img = assemble_image(BitStream([0] * 40), 8)
    assert len(img.cells) == 40 and img.rows == 5


def test_assemble_partial_row():
    img = assemble_image(BitStream([1] * 33), 8)
    assert len(img.cells) == 33 and img.rows == 5


def test_assemble_header_cells_are_zero():
    img = assemble_image(to_bitstream(b"\xff"), 16)
    assert img.kinds()[:31] == [0] * 31
    assert img.kinds()[31:] == [1] * 9


def test_assemble_rejects_bad_columns():
    with pytest.raises(ValueError):
        assemble_image(BitStream([0]), 0)


# rendering

@pytest.mark.parametrize("v, text", [(1.5, "1.5"), (2.0, "2"), (0.1234, "0.123"), (-0.0001, "0"), (14, "14"), (3.25, "3.25")])
def test_fmt(v, text):
    assert fmt(v) == text


def test_render_single_cells():
    assert polygon_count(render_svg(assemble_image(BitStream([0]), 16))) == 1
    assert polygon_count(render_svg(assemble_image(BitStream([1]), 16))) == 5


def test_render_layout():
    doc = render_svg(assemble_image(BitStream([0, 1, 0]), 2))
    assert 'width="30" height="14" data-columns="2" data-cell="15x7"' in doc
    lines = [l for l in doc.splitlines() if l.startswith("<polygon")]
    assert lines[0] == '<polygon points="1,1 14,1 14,6"/>'
    assert lines[1] == '<polygon points="16,1 21,1 21,3"/>'
    assert lines[-1] == '<polygon points="1,8 14,8 14,13"/>'


def test_render_deterministic():
    img = assemble_image(to_bitstream(b"determinism"), 7)
    assert render_svg(img) == render_svg(img)


@settings(max_examples=40)
@given(st.lists(st.integers(0, 1), min_size=1, max_size=300), st.integers(1, 40))
def test_polygon_count_invariant(bitlist, columns):
    doc = render_svg(assemble_image(BitStream(bitlist), columns))
    assert polygon_count(doc) == bitlist.count(0) + 5 * bitlist.count(1)


# parsing

def test_parse_render_round_trip_200_streams():
    rng = random.Random(13)
    for _ in range(200):
        bs = random_stream(rng, rng.randrange(1, 200))
        img = assemble_image(bs, rng.randrange(1, 30))
        parsed = parse_svg(render_svg(img))
        assert parsed.columns == img.columns
        assert [g.kind for g in parsed.cells] == img.kinds()


def test_parsed_glyphs_in_local_frame():
    img = assemble_image(BitStream([1, 0, 1, 1]), 3)
    parsed = parse_svg(render_svg(img))
    assert list(parsed.cells) == list(img.cells)
    assert render_svg(parsed) == render_svg(img)


def test_parse_scaled_by_four():
    img = assemble_image(random_stream(random.Random(1), 120), 16)
    doc = scale_document(render_svg(img), 4)
    assert 'width="960"' in doc
    assert [g.kind for g in parse_svg(doc).cells] == img.kinds()


def test_parse_empty_svg():
    with pytest.raises(EmptyImage):
        parse_svg("<svg></svg>")
    with pytest.raises(EmptyImage):
        parse_svg('<svg width="1"/>')


def test_parse_tolerates_whitespace_quotes_and_unknown_attributes():
    doc = """<?xml version="1.0"?>
    <svg xmlns="http://www.w3.org/2000/svg"   width='30' height="7" data-columns="2"
         data-cell="15x7" data-note="x">

      <polygon class="a" points='1,1  14,1 14,6' fill="black"/>
        <polygon points="16,1 21,1 21,3" ></polygon>
      <polygon points="21,3 29,3 29,6"/><polygon points="21,1 29,1 29,2 21,2"/>
      <polygon points="21,2 26,2 26,3 21,3"/>
      <!-- comment -->
      <polygon points="27,2 29,2 29,3 27,3"/>
    </svg>
    """
    img = parse_svg(doc)
    assert [g.kind for g in img.cells] == [0, 1]


@pytest.mark.parametrize("doc, error", [
    ('<svg width="15" height="7" data-columns="1" data-cell="15x7"><rect x="1"/></svg>', MalformedDocument),
    ('<svg width="15" height="7" data-columns="1" data-cell="15x7"><polygon points="1,1 14,x 14,6"/></svg>', MalformedDocument),
    ('<svg width="15" height="7" data-columns="1" data-cell="15x7"><polygon points="1,1 14,1"/></svg>', MalformedDocument),
    ('<svg width="15" height="7" data-columns="1" data-cell="15x7"><polygon points="1.0001,1 14,1 14,6"/></svg>', MalformedDocument),
    ('<svg width="15" height="7" data-columns="1" data-cell="15x7"><polygon/></svg>', MalformedDocument),
    ('<svg width="15" height="7" data-columns="1" data-cell="15x7">text<polygon points="1,1 14,1 14,6"/></svg>', MalformedDocument),
    ('<svg width="15" height="7" data-cell="15x7"><polygon points="1,1 14,1 14,6"/></svg>', MalformedDocument),
    ('<svg width="15" height="7" data-columns="1"><polygon points="1,1 14,1 14,6"/></svg>', MalformedDocument),
    ('<svg width="15" height="7" data-columns="1" data-cell="15x7"><polygon points="1,1 14,1 14,6"/>', MalformedDocument),
    ('<svg width="15" height="7" data-columns="1" data-cell="15x7"><polygon points="21,1 34,1 34,6"/></svg>', OrphanPolygon),
    ('<svg width="15" height="7" data-columns="1" data-cell="15x7"><polygon points="1,8 14,8 14,13"/></svg>', OrphanPolygon),
    ('<svg width="30" height="7" data-columns="2" data-cell="15x7"><polygon points="16,1 29,1 29,6"/></svg>', MalformedDocument),
    ("not svg at all", MalformedDocument),
])
def test_parse_errors(doc, error):
    with pytest.raises(error):
        parse_svg(doc)


def test_truncated_document():
    doc = render_svg(assemble_image(to_bitstream(b"truncate me"), 16))
    with pytest.raises(MalformedDocument):
        parse_svg(doc[: len(doc) // 2])


# decoding

def test_decode_single_byte():
    img = assemble_image(to_bitstream(b"\x41"), 16)
    assert from_bitstream(decode_bits(parse_svg(render_svg(img)))) == b"\x41"
    assert from_bitstream(decode_bits(img)) == b"\x41"


def test_decode_ratio_of_glyph_one_cell():
    ratios = cell_ratios(parse_svg(render_svg(assemble_image(BitStream([1]), 1))))
    assert ratios[0] == pytest.approx(float(Fraction(32) / Fraction(65, 2)), abs=1e-9)


@pytest.mark.parametrize("factor", [0.5, 0.75, 1, 2, 3.7, 6.25, 10])
def test_decode_scale_invariant(factor):
    data = bytes(range(40))
    img = assemble_image(to_bitstream(data), 16)
    doc = scale_document(render_svg(img), factor)
    assert from_bitstream(decode_bits(parse_svg(doc))) == data


def test_ambiguous_cell():
    rect = Glyph(0, (((0, 0), (13, 0), (13, 5), (0, 5)),))
    img = CipherImage(16, (rect,) * 32)
    with pytest.raises(AmbiguousCell):
        decode_bits(img)
    doc = render_svg(img)
    with pytest.raises(AmbiguousCell):
        decode_bits(parse_svg(doc))


def test_missing_piece_is_ambiguous():
    # dropping the 12-unit piece leaves ratio 20/32.5
    broken = Glyph(1, tuple(p for i, p in enumerate(glyph_one().polygons) if i != 1))
    with pytest.raises(AmbiguousCell):
        decode_bits(CipherImage(8, (glyph_zero(),) * 31 + (broken,)))


def test_framing_error():
    with pytest.raises(FramingError):
        decode_bits(assemble_image(BitStream([0] * 33), 8))
    with pytest.raises(FramingError):
        decode_bits(assemble_image(BitStream([0] * 20), 8))


@settings(max_examples=30, deadline=None)
@given(st.binary(max_size=120), st.integers(1, 64))
def test_full_pipeline_round_trip(data, columns):
    img = assemble_image(to_bitstream(data), columns)
    assert from_bitstream(decode_bits(parse_svg(render_svg(img)))) == data


def test_parsed_cells_sequence_protocol():
    img = assemble_image(BitStream([0, 1, 1]), 2)
    cells = parse_svg(render_svg(img)).cells
    assert len(cells) == 3
    assert cells[-1].kind == 1
    assert [g.kind for g in cells[0:2]] == [0, 1]
    with pytest.raises(IndexError):
        cells[3]
    assert isinstance(cells.ratios, np.ndarray)
