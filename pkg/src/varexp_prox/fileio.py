"""Plain-text and binary serialization: spec files, CSV tables,
PGM images, and SVG line plots.

Everything here is deliberately dependency-free and deterministic:
identical inputs produce byte-identical outputs, which is what makes
reproducibility checks on the command-line tool meaningful.
"""

import os

import numpy as np

from .experiments import ExperimentSpec


# ---------------------------------------------------------------------
# experiment spec files


def parse_spec_text(text, name=None):
    """Parse flat key-value spec text into an ExperimentSpec.

    One `key = value` pair per line; keys use dotted sections
    (solver.tau0 = 0.5); `#` starts a comment; blank lines are
    ignored.  Values are kept as strings, the spec's typed getters
    coerce on read.
    """
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError("line %d: expected 'key = value', got %r"
                             % (lineno, raw.strip()))
        key, value = line.split("=", 1)
        key, value = key.strip(), value.strip()
        if not key or not value:
            raise ValueError("line %d: empty key or value" % lineno)
        if key in entries:
            raise ValueError("line %d: duplicate key %r" % (lineno, key))
        entries[key] = value
    return ExperimentSpec(entries, name=name)


def read_spec(path):
    """Read an ExperimentSpec from a UTF-8 spec file.

    The file's stem is used as the experiment name unless the file
    sets `name` itself.
    """
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    stem = os.path.splitext(os.path.basename(str(path)))[0]
    return parse_spec_text(text, name=stem)


# ---------------------------------------------------------------------
# CSV tables


def format_value(v):
    """Render one CSV cell; floats get 12 significant digits."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.12g" % float(v)
    return str(v)


def write_csv(path, header, rows):
    """Write a CSV table with LF line endings.

    Column order is exactly the header order; every row must have the
    same number of cells as the header.
    """
    header = [str(h) for h in header]
    lines = [",".join(header)]
    for i, row in enumerate(rows):
        cells = [format_value(v) for v in row]
        if len(cells) != len(header):
            raise ValueError("row %d has %d cells, header has %d"
                             % (i, len(cells), len(header)))
        lines.append(",".join(cells))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------------
# PGM images (binary P5)


def quantize_image(image):
    """Linear rescale of an image onto the 8-bit range.

    The [min, max] of the image maps onto [0, 255]; a constant image
    maps to 0.
    """
    image = np.asarray(image, dtype=float)
    if image.ndim != 2:
        raise ValueError("PGM image must be 2-D, got shape %s"
                         % (image.shape,))
    if not np.all(np.isfinite(image)):
        raise ValueError("image contains non-finite values")
    lo, hi = float(image.min()), float(image.max())
    if hi > lo:
        scaled = (image - lo) / (hi - lo) * 255.0
    else:
        scaled = np.zeros_like(image)
    return np.rint(scaled).astype(np.uint8)


def write_pgm(path, image):
    """Write a 2-D array as a binary (P5) PGM file, maxval 255.

    Returns the quantized uint8 array actually stored, so callers can
    verify round trips.
    """
    data = quantize_image(image)
    rows, cols = data.shape
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n255\n" % (cols, rows))
        fh.write(data.tobytes())
    return data


def read_pgm(path):
    """Read a binary (P5) PGM file written by write_pgm."""
    with open(path, "rb") as fh:
        blob = fh.read()
    # header: magic, dims, maxval, single whitespace, then raw pixels
    parts = blob.split(b"\n", 3)
    if len(parts) < 4 or parts[0].strip() != b"P5":
        raise ValueError("not a binary P5 PGM file")
    try:
        cols, rows = (int(t) for t in parts[1].split())
        maxval = int(parts[2])
    except Exception:
        raise ValueError("malformed PGM header")
    if maxval != 255:
        raise ValueError("only maxval 255 is supported, got %d" % maxval)
    pixels = parts[3][:rows * cols]
    if len(pixels) != rows * cols:
        raise ValueError("truncated PGM pixel data")
    return np.frombuffer(pixels, dtype=np.uint8).reshape(rows, cols)


# ---------------------------------------------------------------------
# SVG line plots


_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
            "#8c564b"]


def _ticks(lo, hi, count=5):
    if hi <= lo:
        hi = lo + 1.0
    return [lo + (hi - lo) * i / (count - 1) for i in range(count)]


def _fmt(x):
    return "%.6g" % x


def svg_line_plot(path, curves, title="", xlabel="", ylabel="",
                  log_x=False, log_y=False, width=640, height=440):
    """Write a minimal SVG 1.1 line plot.

    Parameters
    ----------
    path : str
    curves : sequence of (label, x, y)
        Arrays per curve; on log axes, points with non-positive
        coordinates are dropped.
    title, xlabel, ylabel : str
    log_x, log_y : bool
        Plot log10 of the coordinate (tick labels show the decade).
    width, height : int
        Canvas size in pixels.

    The output contains only axes, tick labels, polylines, and a
    legend; it is byte-deterministic for identical inputs.
    """
    ml, mr, mt, mb = 70, 20, 34, 50
    pw, ph = width - ml - mr, height - mt - mb

    prepared = []
    for label, xs, ys in curves:
        xs = np.asarray(xs, dtype=float).ravel()
        ys = np.asarray(ys, dtype=float).ravel()
        if xs.size != ys.size:
            raise ValueError("curve %r: x and y lengths differ" % label)
        keep = np.isfinite(xs) & np.isfinite(ys)
        if log_x:
            keep &= xs > 0
        if log_y:
            keep &= ys > 0
        xs, ys = xs[keep], ys[keep]
        if log_x:
            xs = np.log10(xs)
        if log_y:
            ys = np.log10(ys)
        prepared.append((str(label), xs, ys))

    xy = [a for _, xs, ys in prepared for a in (xs, ys) if a.size]
    if xy:
        x_lo = min(float(xs.min()) for _, xs, _ in prepared if xs.size)
        x_hi = max(float(xs.max()) for _, xs, _ in prepared if xs.size)
        y_lo = min(float(ys.min()) for _, _, ys in prepared if ys.size)
        y_hi = max(float(ys.max()) for _, _, ys in prepared if ys.size)
    else:
        x_lo, x_hi, y_lo, y_hi = 0.0, 1.0, 0.0, 1.0
    if x_hi <= x_lo:
        x_hi = x_lo + 1.0
    if y_hi <= y_lo:
        y_hi = y_lo + 1.0

    def sx(x):
        return ml + (x - x_lo) / (x_hi - x_lo) * pw

    def sy(y):
        return mt + ph - (y - y_lo) / (y_hi - y_lo) * ph

    out = []
    out.append('<?xml version="1.0" encoding="UTF-8"?>')
    out.append('<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
               'width="%d" height="%d" viewBox="0 0 %d %d">'
               % (width, height, width, height))
    out.append('<rect x="0" y="0" width="%d" height="%d" fill="white"/>'
               % (width, height))
    out.append('<g font-family="sans-serif" font-size="12" fill="black">')
    if title:
        out.append('<text x="%d" y="20" text-anchor="middle" '
                   'font-size="14">%s</text>' % (ml + pw // 2, title))

    # frame
    out.append('<rect x="%d" y="%d" width="%d" height="%d" fill="none" '
               'stroke="black"/>' % (ml, mt, pw, ph))

    for tx in _ticks(x_lo, x_hi):
        px = sx(tx)
        out.append('<line x1="%.2f" y1="%d" x2="%.2f" y2="%d" '
                   'stroke="black"/>' % (px, mt + ph, px, mt + ph + 4))
        label = "1e%s" % _fmt(tx) if log_x else _fmt(tx)
        out.append('<text x="%.2f" y="%d" text-anchor="middle">%s</text>'
                   % (px, mt + ph + 18, label))
    for ty in _ticks(y_lo, y_hi):
        py = sy(ty)
        out.append('<line x1="%d" y1="%.2f" x2="%d" y2="%.2f" '
                   'stroke="black"/>' % (ml - 4, py, ml, py))
        label = "1e%s" % _fmt(ty) if log_y else _fmt(ty)
        out.append('<text x="%d" y="%.2f" text-anchor="end">%s</text>'
                   % (ml - 8, py + 4, label))
    if xlabel:
        out.append('<text x="%d" y="%d" text-anchor="middle">%s</text>'
                   % (ml + pw // 2, height - 12, xlabel))
    if ylabel:
        out.append('<text x="16" y="%d" text-anchor="middle" '
                   'transform="rotate(-90 16 %d)">%s</text>'
                   % (mt + ph // 2, mt + ph // 2, ylabel))

    for i, (label, xs, ys) in enumerate(prepared):
        color = _PALETTE[i % len(_PALETTE)]
        if xs.size:
            pts = " ".join("%.2f,%.2f" % (sx(x), sy(y))
                           for x, y in zip(xs, ys))
            out.append('<polyline points="%s" fill="none" stroke="%s" '
                       'stroke-width="1.5"/>' % (pts, color))
        ly = mt + 16 + 16 * i
        out.append('<line x1="%d" y1="%d" x2="%d" y2="%d" stroke="%s" '
                   'stroke-width="1.5"/>' % (ml + 8, ly - 4, ml + 28,
                                             ly - 4, color))
        out.append('<text x="%d" y="%d">%s</text>' % (ml + 34, ly,
                                                      label))

    out.append('</g>')
    out.append('</svg>')
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(out) + "\n")
