#!/usr/bin/env python3
"""
OCR helper process for the `subprocess` text backend.

Reads one image path per line on stdin and answers each with token lines
(`text<TAB>x<TAB>y<TAB>w<TAB>h<TAB>confidence`) followed by a blank line.
A failed request is answered with a single `ERROR<TAB>message` line.

Configure it in config.ini:

    [textkx]
    backend = subprocess
    backend_command = python scripts/easyocr_backend.py --gpu

Requires the optional easyocr package (pip install easyocr).
"""

import argparse
import sys


def parse_args():
    parser = argparse.ArgumentParser(description="EasyOCR token server for the curation pipeline")
    parser.add_argument("--lang", action="append", default=None,
                        help="Recognition language; repeat for several (default: en)")
    parser.add_argument("--gpu", action="store_true", help="Run recognition on the GPU")
    return parser.parse_args()


def quad_to_box(quad):
    """Axis-aligned (x, y, w, h) around an EasyOCR corner quadrilateral"""
    xs = [point[0] for point in quad]
    ys = [point[1] for point in quad]
    x, y = int(min(xs)), int(min(ys))
    return x, y, max(1, int(round(max(xs))) - x), max(1, int(round(max(ys))) - y)


def format_results(results):
    lines = []
    for quad, text, confidence in results:
        # Tabs and newlines would break the line protocol
        text = " ".join(str(text).split())
        if not text:
            continue
        x, y, w, h = quad_to_box(quad)
        lines.append(f"{text}\t{x}\t{y}\t{w}\t{h}\t{float(confidence):.4f}")
    return lines


def main():
    args = parse_args()
    try:
        import easyocr
    except ImportError:
        print("Error: easyocr is not installed (pip install easyocr)", file=sys.stderr)
        return 1

    reader = easyocr.Reader(args.lang or ["en"], gpu=args.gpu, verbose=False)
    for request in sys.stdin:
        path = request.strip()
        if not path:
            continue
        try:
            results = reader.readtext(path, detail=1, paragraph=False)
            response = format_results(results)
        except Exception as e:
            response = [f"ERROR\t{type(e).__name__}: {e}"]
        for line in response:
            sys.stdout.write(line + "\n")
        sys.stdout.write("\n")
        sys.stdout.flush()
    return 0


if __name__ == "__main__":
    sys.exit(main())
