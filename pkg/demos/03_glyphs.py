"""The two glyphs, their areas, and the vector image they build."""
from singularity_cipher import BitStream, assemble_image, glyph_one, glyph_zero, parse_svg, render_svg
from singularity_cipher.errors import FramingError
from singularity_cipher.paradox import cell_ratios, decode_bits, fill_ratio, scale_document

zero, one = glyph_zero(), glyph_one()
print("zero: %d polygon, area %.1f, ratio %.6f" % (len(zero.polygons), zero.area(), fill_ratio(zero)))
print("one:  %d polygons, area %.1f, ratio %.6f" % (len(one.polygons), one.area(), fill_ratio(one)))

# both glyphs look like the same 13 x 5 triangle, but one is half a unit short
img = assemble_image(BitStream([0, 1, 1, 0, 1]), columns=3)
doc = render_svg(img)
print(doc)

parsed = parse_svg(doc)
print("parsed ratios:", [round(float(r), 6) for r in cell_ratios(parsed)])

# ratios do not depend on drawing scale
big = parse_svg(scale_document(doc, 7.5))
print("ratios at x7.5:", [round(float(r), 6) for r in cell_ratios(big)])
print("glyph kinds at x7.5:", list(big.kinds()))

# five bits carry no valid length header, so full decoding refuses them
try:
    decode_bits(big)
except FramingError as exc:
    print("decode_bits:", type(exc).__name__, exc)
