#!/usr/bin/env python3
"""Convert WireFrame line annotations into per-image segment-map JSON.

Input is the common preprocessed layout: a JSON list whose entries carry
"filename", "width", "height" and "lines" ([[x1, y1, x2, y2], ...], or
[[[x1, y1], [x2, y2]], ...]). Each entry becomes <outdir>/<stem>.json with
{"width", "height", "segments"}, the format read by `afm roundtrip` and by
the acceptance suite through AFM_WIREFRAME_DIR.

Endpoints are clamped to [0, width] x [0, height]; segments that end up with
zero length are dropped and counted.
"""

import argparse
import json
import sys
from pathlib import Path


def flatten(line):
    if len(line) == 2 and all(isinstance(p, (list, tuple)) for p in line):
        (x1, y1), (x2, y2) = line
    else:
        x1, y1, x2, y2 = line
    return [float(x1), float(y1), float(x2), float(y2)]


def convert(entry):
    width, height = int(entry["width"]), int(entry["height"])
    segments, dropped = [], 0
    for line in entry["lines"]:
        x1, y1, x2, y2 = flatten(line)
        x1, x2 = (min(max(v, 0.0), float(width)) for v in (x1, x2))
        y1, y2 = (min(max(v, 0.0), float(height)) for v in (y1, y2))
        if x1 == x2 and y1 == y2:
            dropped += 1
            continue
        segments.append([x1, y1, x2, y2])
    return {"width": width, "height": height, "segments": segments}, dropped


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("annotations", type=Path, help="JSON list of annotated images")
    parser.add_argument("outdir", type=Path, help="directory for per-image segment maps")
    args = parser.parse_args(argv)

    entries = json.loads(args.annotations.read_text())
    if not isinstance(entries, list):
        parser.error("expected a JSON list of image entries")
    args.outdir.mkdir(parents=True, exist_ok=True)

    total_dropped = 0
    for entry in entries:
        doc, dropped = convert(entry)
        total_dropped += dropped
        stem = Path(entry["filename"]).stem
        (args.outdir / f"{stem}.json").write_text(json.dumps(doc))
    print(f"wrote {len(entries)} maps to {args.outdir}, dropped {total_dropped} zero-length segments")
    return 0


if __name__ == "__main__":
    sys.exit(main())
