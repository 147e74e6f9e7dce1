"""Builds the hand-derivable golden inputs and expectations.

Run from this directory. Outputs are plain P6/P5 files written without the
project's own code, so they can stand as independent expectations.
"""

import json


def write_ppm(path, w, h, pixels):
    with open(path, "wb") as f:
        f.write(b"P6\n%d %d\n255\n" % (w, h))
        for y in range(h):
            for x in range(w):
                f.write(bytes(pixels(x, y)))


def checker(x, y):
    # 8x8 with a distinct colour per 2x2 cell.
    cx, cy = x // 2, y // 2
    return (40 + 50 * cx, 30 + 60 * cy, 200 if (cx + cy) % 2 else 20)


# Bright 8x8 square in a 16x16 frame, input for the edge golden.
write_ppm("square16.ppm", 16, 16,
          lambda x, y: (255, 255, 255) if 4 <= x < 12 and 4 <= y < 12 else (0, 0, 0))

# Warp golden: an 8x8 panel (one full-panel Screen showing the checker)
# projected onto the quad (4,2)-(12,2)-(12,10)-(4,10) in a 16x12 frame is a
# pure integer shift, so the expectation is the checker pasted at (4, 2).
write_ppm("warp/checker.ppm", 8, 8, checker)
doc = {
    "version": 1,
    "mode": "edit",
    "inspector": False,
    "palette": [{"id": "lock", "kind": "LockControl", "size": {"w": 0.1, "h": 0.1}}],
    "elements": [{
        "id": "screen", "kind": "Screen",
        "bounds": {"u": 0, "v": 0, "w": 1, "h": 1},
        "locked": False, "z": 0,
        "frames": ["checker.ppm"], "frame_index": 0,
    }],
    "connections": [],
}
with open("warp/doc.json", "w") as f:
    json.dump(doc, f, indent=2)
    f.write("\n")
write_ppm("warp/expected.ppm", 16, 12,
          lambda x, y: checker(x - 4, y - 2) if 4 <= x < 12 and 2 <= y < 10 else (0, 0, 0))

# Edge golden for square16.ppm under default Canny settings: the blurred step
# gives equal magnitudes to the two pixels straddling each side, and the tie
# goes to the bright side, so the map is the square's own outer ring of
# pixels, corners included.
with open("square16_edges.pgm", "wb") as f:
    f.write(b"P5\n16 16\n255\n")
    for y in range(16):
        for x in range(16):
            ring = 4 <= x < 12 and 4 <= y < 12 and (x in (4, 11) or y in (4, 11))
            f.write(bytes([255 if ring else 0]))
