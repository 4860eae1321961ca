"""Readers and writers for the flat files the command line produces."""
import csv
import json
import math
import platform
import sys

import numpy as np

from . import __version__
from ._backend import backend_name

PGM_MAXVAL = 255


def format_float(value):
    """17 significant digits: parses back to the identical double."""
    return format(float(value), ".17g")


def _cell(value):
    if isinstance(value, bool) or isinstance(value, (int, np.integer)):
        return str(int(value)) if not isinstance(value, bool) else str(value).lower()
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    return str(value)


def _parse_cell(text):
    for kind in (int, float):
        try:
            return kind(text)
        except ValueError:
            pass
    return text


def write_table_csv(rows, stream, columns=None):
    columns = list(columns or rows[0].keys())
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row[c]) for c in columns])


def read_table_csv(stream):
    reader = csv.reader(stream)
    header = next(reader)
    return [dict(zip(header, (_parse_cell(c) for c in line))) for line in reader]


def format_table(rows, columns=None, digits=6):
    """Fixed-width text table with ``digits`` significant digits."""
    columns = list(columns or rows[0].keys())

    def show(v):
        if isinstance(v, (float, np.floating)):
            return format(float(v), f".{digits}g")
        return str(v)

    cells = [[show(r[c]) for c in columns] for r in rows]
    widths = [max(len(c), *(len(line[i]) for line in cells)) for i, c in enumerate(columns)]
    lines = ["  ".join(c.rjust(w) for c, w in zip(columns, widths))]
    lines += ["  ".join(v.rjust(w) for v, w in zip(line, widths)) for line in cells]
    return "\n".join(lines)


def write_carpet_csv(carpet, stream):
    """One header row ``t\\x, x_0 .. x_{W-1}``, then one row ``t_i, v_i0 ..`` per time."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["t\\x"] + [format_float(x) for x in carpet.x_grid.points])
    for t, row in zip(carpet.t_grid.points, carpet.values):
        writer.writerow([format_float(t)] + [format_float(v) for v in row])


def read_carpet_csv(stream):
    """Return ``(x, t, values)`` arrays from :func:`write_carpet_csv` output."""
    reader = csv.reader(stream)
    header = next(reader)
    x = np.array([float(v) for v in header[1:]])
    t, values = [], []
    for line in reader:
        t.append(float(line[0]))
        values.append([float(v) for v in line[1:]])
    return x, np.array(t), np.array(values)


def carpet_to_pixels(values):
    """Scale to 0..255 by the per-image min and max.

    Returns ``(pixels, v_min, v_max, degenerate)``; a constant image becomes
    uniform mid-grey.
    """
    v_min = float(np.min(values))
    v_max = float(np.max(values))
    if not v_max > v_min:
        return np.full(values.shape, 128, dtype=np.uint8), v_min, v_max, True
    scaled = PGM_MAXVAL * (values - v_min) / (v_max - v_min)
    pixels = np.floor(scaled + 0.5).clip(0, PGM_MAXVAL).astype(np.uint8)
    return pixels, v_min, v_max, False


def write_pgm(pixels, path):
    """Binary P5 greymap; row 0 is the top of the image."""
    height, width = pixels.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{width} {height}\n{PGM_MAXVAL}\n".encode("ascii"))
        fh.write(np.ascontiguousarray(pixels, dtype=np.uint8).tobytes())


def read_pgm(path):
    with open(path, "rb") as fh:
        data = fh.read()
    tokens = []
    pos = 0
    while len(tokens) < 4:
        while data[pos:pos + 1].isspace():
            pos += 1
        start = pos
        while not data[pos:pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos].decode("ascii"))
    if tokens[0] != "P5":
        raise ValueError("not a binary PGM file")
    width, height, maxval = (int(t) for t in tokens[1:])
    pos += 1  # single whitespace byte before the raster
    raster = np.frombuffer(data, dtype=np.uint8, count=width * height, offset=pos)
    return raster.reshape(height, width), maxval


def load_config(path):
    """Read a flat ``key = value`` file. Blank lines and ``#`` comments are skipped."""
    config = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key, value = (part.strip() for part in line.split("=", 1))
            config[key.replace("-", "_")] = value
    return config


def _jsonable(value):
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if isinstance(value, (np.floating, float)):
        return float(value) if math.isfinite(value) else str(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def dump_json(obj, stream):
    json.dump(_jsonable(obj), stream, indent=2, sort_keys=True)
    stream.write("\n")


def manifest(command, parameters, tolerances, wall_time, **extra):
    record = {
        "command": command,
        "parameters": parameters,
        "tolerances": tolerances,
        "wall_time_s": wall_time,
        "versions": {
            "ptentropy": __version__,
            "numpy": np.__version__,
            "python": platform.python_version(),
            "kernel_backend": backend_name(),
        },
        "argv": sys.argv[1:],
    }
    record.update(extra)
    return record
