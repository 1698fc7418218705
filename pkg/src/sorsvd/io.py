"""Matrix and image file formats.

SORD layout: ``b"SORD"``, u32 version (1), u64 rows, u64 cols, then
``rows * cols`` little-endian float64 values in row-major order.

CSV layout: a ``rows,cols`` header line, then one comma-separated matrix row
per line, floats written with ``repr`` so they parse back exactly.
"""
import os
import struct
from pathlib import Path

import numpy as np

from .core import as_matrix
from .errors import FormatError

SORD_MAGIC = b"SORD"
SORD_VERSION = 1
_HEADER = struct.Struct("<4sIQQ")
MATRIX_FORMATS = ("sord", "csv")


def write_sord(path, a):
    a = as_matrix(a)
    rows, cols = a.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(SORD_MAGIC, SORD_VERSION, rows, cols))
        fh.write(a.astype("<f8", copy=False).tobytes(order="C"))


def read_sord(path):
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise FormatError(f"{path}: too short for a SORD header")
    magic, version, rows, cols = _HEADER.unpack_from(data)
    if magic != SORD_MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}")
    if version != SORD_VERSION:
        raise FormatError(f"{path}: unsupported SORD version {version}")
    expected = _HEADER.size + 8 * rows * cols
    if len(data) != expected:
        raise FormatError(f"{path}: expected {expected} bytes for {rows}x{cols}, got {len(data)}")
    body = np.frombuffer(data, dtype="<f8", offset=_HEADER.size, count=rows * cols)
    return body.astype(np.float64).reshape(rows, cols)


def write_csv_matrix(path, a):
    a = as_matrix(a)
    lines = [f"{a.shape[0]},{a.shape[1]}"]
    lines.extend(",".join(repr(float(v)) for v in row) for row in a)
    Path(path).write_text("\n".join(lines) + "\n")


def read_csv_matrix(path):
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines:
        raise FormatError(f"{path}: empty file")
    try:
        rows, cols = (int(t) for t in lines[0].split(","))
    except ValueError as exc:
        raise FormatError(f"{path}: header must be 'rows,cols'") from exc
    if len(lines) - 1 != rows:
        raise FormatError(f"{path}: header says {rows} rows, found {len(lines) - 1}")
    out = np.empty((rows, cols))
    for i, ln in enumerate(lines[1:]):
        vals = ln.split(",")
        if len(vals) != cols:
            raise FormatError(f"{path}: row {i + 1} has {len(vals)} values, expected {cols}")
        try:
            out[i] = [float(v) for v in vals]
        except ValueError as exc:
            raise FormatError(f"{path}: row {i + 1}: {exc}") from exc
    return out


def read_matrix(path, fmt=None):
    fmt = fmt or _guess_format(path)
    if fmt == "sord":
        return read_sord(path)
    if fmt == "csv":
        return read_csv_matrix(path)
    raise FormatError(f"unknown matrix format {fmt!r}")


def write_matrix(path, a, fmt=None):
    fmt = fmt or _guess_format(path)
    if fmt == "sord":
        return write_sord(path, a)
    if fmt == "csv":
        return write_csv_matrix(path, a)
    raise FormatError(f"unknown matrix format {fmt!r}")


def _guess_format(path):
    return "csv" if str(path).lower().endswith(".csv") else "sord"


# PGM (binary P5, 8-bit) --------------------------------------------------

def _pgm_tokens(data, count):
    # header tokens are whitespace separated; '#' starts a comment to end of line
    tokens, pos = [], 0
    while len(tokens) < count:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if pos >= len(data):
            raise FormatError("truncated PGM header")
        if data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos])
    return tokens, pos + 1  # exactly one whitespace byte precedes the raster


def read_pgm(path):
    """Return ``(pixels uint8 height x width, maxval)``."""
    data = Path(path).read_bytes()
    if data[:2] != b"P5":
        raise FormatError(f"{path}: only binary P5 PGM is supported, got {data[:2]!r}")
    try:
        tokens, off = _pgm_tokens(data, 4)
        width, height, maxval = (int(t) for t in tokens[1:])
    except (ValueError, FormatError) as exc:
        raise FormatError(f"{path}: malformed PGM header") from exc
    if not 0 < maxval < 256:
        raise FormatError(f"{path}: only 8-bit PGM is supported (maxval={maxval})")
    raster = data[off:off + width * height]
    if len(raster) != width * height:
        raise FormatError(f"{path}: raster truncated")
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width), maxval


def write_pgm(path, pixels, maxval=255):
    pixels = np.asarray(pixels)
    if pixels.ndim != 2:
        raise FormatError("PGM frames must be 2-D")
    height, width = pixels.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{width} {height}\n{maxval}\n".encode("ascii"))
        fh.write(np.ascontiguousarray(pixels, dtype=np.uint8).tobytes())


def list_frames(directory):
    d = Path(directory)
    if not d.is_dir():
        raise FormatError(f"{directory}: not a directory")
    files = sorted(p for p in d.iterdir() if p.suffix.lower() == ".pgm" and p.is_file())
    if not files:
        raise FormatError(f"{directory}: no .pgm files")
    return files


def load_image_stack(directory, fmt="pgm"):
    """Stack frames as columns; returns ``(matrix, (height, width), maxval)``.

    Frames are ordered lexicographically by file name and pixels are scaled
    to [0, 1] by ``maxval``; each column is a frame flattened row-major.
    """
    if fmt != "pgm":
        raise FormatError(f"unsupported image format {fmt!r}")
    files = list_frames(directory)
    cols, shape, maxval = [], None, None
    for f in files:
        pix, mv = read_pgm(f)
        if shape is None:
            shape, maxval = pix.shape, mv
        elif pix.shape != shape:
            raise FormatError(f"{f}: frame is {pix.shape[1]}x{pix.shape[0]}, "
                              f"expected {shape[1]}x{shape[0]}")
        elif mv != maxval:
            raise FormatError(f"{f}: maxval {mv} differs from {maxval}")
        cols.append(pix.reshape(-1).astype(np.float64) / maxval)
    return np.column_stack(cols), shape, maxval


def write_frames(directory, matrix, shape, maxval=255, prefix="frame"):
    """Inverse of :func:`load_image_stack`; values are clipped to [0, 1]."""
    matrix = np.asarray(matrix, dtype=np.float64)
    height, width = shape
    if matrix.ndim != 2 or matrix.shape[0] != height * width:
        raise FormatError(f"matrix of shape {matrix.shape} does not hold {width}x{height} frames")
    os.makedirs(directory, exist_ok=True)
    ndigits = max(4, len(str(matrix.shape[1] - 1)))
    paths = []
    for j in range(matrix.shape[1]):
        pix = np.rint(np.clip(matrix[:, j], 0.0, 1.0) * maxval).astype(np.uint8)
        p = Path(directory) / f"{prefix}_{j:0{ndigits}d}.pgm"
        write_pgm(p, pix.reshape(height, width), maxval)
        paths.append(p)
    return paths
