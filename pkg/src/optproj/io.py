"""Direction sets as JSON and samples as CSV.

JSON floats are written with ``repr``, the shortest decimal that reads back
to the same double, so save/load round-trips bit for bit.
"""

import csv
import json
import math

import numpy as np

from .errors import ProjectionError
from .objective import DirectionSet

SCHEMA_VERSION = 1
LOAD_UNIT_TOL = 1e-9


class FileFormatError(ProjectionError):
    """Malformed input file; the message names the offending line when known."""


def direction_set_to_dict(ds):
    return {
        "schema_version": SCHEMA_VERSION,
        "p": ds.p,
        "n": ds.n,
        "kind": ds.kind,
        "scale": ds.scale,
        "directions": ds.directions.tolist(),
    }


def dumps_direction_set(ds):
    return json.dumps(direction_set_to_dict(ds), indent=2) + "\n"


def save_direction_set(ds, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_direction_set(ds))


def direction_set_from_dict(doc):
    if not isinstance(doc, dict):
        raise FileFormatError("direction file must hold a JSON object")
    missing = {"schema_version", "p", "n", "kind", "scale", "directions"} - doc.keys()
    if missing:
        raise FileFormatError(f"direction file lacks fields {sorted(missing)}")
    if doc["schema_version"] != SCHEMA_VERSION:
        raise FileFormatError(f"unsupported schema_version {doc['schema_version']!r}")
    try:
        u = np.array(doc["directions"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise FileFormatError(f"directions are not a numeric matrix: {exc}") from None
    if u.ndim != 2 or u.shape != (doc["n"], doc["p"]):
        raise FileFormatError(f"directions have shape {u.shape}, header says "
                              f"({doc['n']}, {doc['p']})")
    try:
        return DirectionSet(u, float(doc["scale"]), doc["kind"], unit_tol=LOAD_UNIT_TOL)
    except (TypeError, ValueError) as exc:
        raise FileFormatError(str(exc)) from None


def loads_direction_set(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"line {exc.lineno}: invalid JSON ({exc.msg})") from None
    return direction_set_from_dict(doc)


def load_direction_set(path):
    with open(path, encoding="utf-8") as fh:
        return loads_direction_set(fh.read())


def _is_number(cell):
    try:
        float(cell)
    except ValueError:
        return False
    return True


def load_sample(path):
    """Read a CSV of observations, one row each; a non-numeric first row is a header."""
    rows = []
    width = None
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, rec in enumerate(csv.reader(fh), start=1):
            if not rec or all(not c.strip() for c in rec):
                continue
            if lineno == 1 and not all(_is_number(c) for c in rec):
                continue
            try:
                vals = [float(c) for c in rec]
            except ValueError:
                raise FileFormatError(f"{path}: line {lineno}: non-numeric value") from None
            if not all(math.isfinite(x) for x in vals):
                raise FileFormatError(f"{path}: line {lineno}: non-finite value")
            if width is None:
                width = len(vals)
            elif len(vals) != width:
                raise FileFormatError(f"{path}: line {lineno}: expected {width} columns, "
                                      f"got {len(vals)}")
            rows.append(vals)
    if not rows:
        raise FileFormatError(f"{path}: no observations")
    return np.array(rows, dtype=float)


def save_sample(data, path, header=None):
    data = np.atleast_2d(np.asarray(data, dtype=float))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        if header:
            w.writerow(header)
        for row in data:
            w.writerow([repr(float(x)) for x in row])
