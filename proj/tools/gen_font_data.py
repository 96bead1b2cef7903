#!/usr/bin/env python3
"""Pre-rasterize the bundled DejaVu faces into glyph coverage atlases.

Writes src/font_data.cpp. Run once; the output is committed so builds never
depend on a FreeType installation.
"""
import sys
from pathlib import Path
from PIL import Image, ImageDraw, ImageFont

FACES = [
    ("dejavu-sans", "DejaVuSans.ttf"),
    ("dejavu-serif", "DejaVuSerif.ttf"),
    ("dejavu-mono", "DejaVuSansMono.ttf"),
]
SIZES = [8, 10, 12, 14, 16, 18, 20, 24]
FIRST, LAST = 32, 126
FONT_DIR = Path("/usr/share/fonts/truetype/dejavu")


def rasterize(path, size):
    font = ImageFont.truetype(str(path), size)
    ascent, descent = font.getmetrics()
    glyphs = []
    for code in range(FIRST, LAST + 1):
        ch = chr(code)
        advance = int(round(font.getlength(ch)))
        x0, y0, x1, y1 = font.getbbox(ch, anchor="ls")
        w, h = max(0, x1 - x0), max(0, y1 - y0)
        data = b""
        if w and h:
            img = Image.new("L", (w, h), 0)
            ImageDraw.Draw(img).text((-x0, -y0), ch, font=font, fill=255, anchor="ls")
            data = img.tobytes()
        glyphs.append((advance, x0, y0, w, h, data))
    return ascent, descent, glyphs


def main(out):
    coverage = bytearray()
    faces = []
    for name, file in FACES:
        for size in SIZES:
            ascent, descent, glyphs = rasterize(FONT_DIR / file, size)
            rows = []
            for advance, x0, y0, w, h, data in glyphs:
                rows.append((advance, x0, y0, w, h, len(coverage)))
                coverage += data
            faces.append((name, size, ascent, descent, rows))

    lines = [
        "// Generated by tools/gen_font_data.py from the DejaVu fonts",
        "// (Bitstream Vera / DejaVu license, see README). Do not edit.",
        "",
        '#include "font_data.hpp"',
        "",
        "namespace chartsynth::textraster::detail {",
        "namespace {",
        "",
        "constexpr unsigned char kCoverage[] = {",
    ]
    for i in range(0, len(coverage), 24):
        lines.append("    " + ",".join(str(b) for b in coverage[i:i + 24]) + ",")
    lines.append("};")
    lines.append("")
    for idx, (name, size, ascent, descent, rows) in enumerate(faces):
        lines.append(f"constexpr GlyphRecord kGlyphs{idx}[] = {{")
        for r in rows:
            lines.append("    {%d, %d, %d, %d, %d, %d}," % r)
        lines.append("};")
    lines.append("")
    lines.append("}  // namespace")
    lines.append("")
    lines.append("const FaceRecord kFaces[] = {")
    for idx, (name, size, ascent, descent, rows) in enumerate(faces):
        lines.append(f'    {{"{name}", {size}, {ascent}, {descent}, kGlyphs{idx}, kCoverage}},')
    lines.append("};")
    lines.append("")
    lines.append("const std::size_t kFaceCount = sizeof(kFaces) / sizeof(kFaces[0]);")
    lines.append("")
    lines.append("}  // namespace chartsynth::textraster::detail")
    Path(out).write_text("\n".join(lines) + "\n")
    print(f"{len(faces)} faces, {len(coverage)} coverage bytes", file=sys.stderr)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "src/font_data.cpp")
