"""JSON encoding of complex matrices and vectors, plus atomic file output.

A matrix is ``{"rows": r, "cols": c, "data": [[re, im], ...]}`` with
entries in row-major order. On input a nested list of rows is accepted
as well, each entry either a real number or an ``[re, im]`` pair.
"""

import csv
import io
import json
import os
import tempfile

import numpy as np


def _num(z):
    z = complex(z)
    return [float(z.real), float(z.imag)]


def _parse_entry(e):
    if isinstance(e, (int, float)):
        return complex(e)
    if isinstance(e, (list, tuple)) and len(e) == 2 and all(isinstance(x, (int, float)) for x in e):
        return complex(e[0], e[1])
    raise ValueError(f"bad matrix entry {e!r}; expected a number or an [re, im] pair")


def encode_matrix(M):
    M = np.asarray(M, dtype=np.complex128)
    return {
        "rows": int(M.shape[0]),
        "cols": int(M.shape[1]),
        "data": [_num(z) for z in M.reshape(-1)],
    }


def decode_matrix(obj, rows=None, cols=None):
    if isinstance(obj, dict):
        extra = set(obj) - {"rows", "cols", "data"}
        if extra:
            raise ValueError(f"unknown matrix keys {sorted(extra)}")
        r, c = int(obj["rows"]), int(obj["cols"])
        data = [_parse_entry(e) for e in obj["data"]]
        if len(data) != r * c:
            raise ValueError(f"matrix declares {r}x{c} but has {len(data)} entries")
        M = np.array(data, dtype=np.complex128).reshape(r, c)
    elif isinstance(obj, list):
        if len(obj) == 0:
            M = np.zeros((0, cols or 0), dtype=np.complex128)
        else:
            width = {len(row) for row in obj}
            if len(width) != 1:
                raise ValueError("ragged matrix rows")
            M = np.array([[_parse_entry(e) for e in row] for row in obj], dtype=np.complex128)
            if M.ndim == 1:
                M = M.reshape(len(obj), 0)
    else:
        raise ValueError(f"cannot decode matrix from {type(obj).__name__}")
    if rows is not None and M.shape[0] != rows:
        raise ValueError(f"expected {rows} rows, got {M.shape[0]}")
    if cols is not None and M.shape[1] != cols:
        raise ValueError(f"expected {cols} columns, got {M.shape[1]}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    return M


def encode_vector(v):
    return [_num(z) for z in np.asarray(v).reshape(-1)]


def decode_vector(obj, size=None):
    if not isinstance(obj, list):
        raise ValueError("vector must be a list")
    v = np.array([_parse_entry(e) for e in obj], dtype=np.complex128)
    if size is not None and v.shape[0] != size:
        raise ValueError(f"expected vector of length {size}, got {v.shape[0]}")
    return v


def dumps(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def fmt(x):
    """Shortest round-tripping text for a float."""
    return repr(float(x))


def csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(x) if isinstance(x, (float, np.floating)) else x for x in row])
    return buf.getvalue()


def write_atomic(path, text):
    """Write ``text`` to ``path`` via a temporary file and rename."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
