"""Atomic CSV/JSON writers with a fixed number format."""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile

__all__ = ["format_value", "write_csv", "write_json", "write_text_atomic"]


def format_value(v) -> str:
    """Empty for None, plain for ints and strings, 17 significant digits for floats
    (enough to round-trip any 64-bit float)."""
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, (int, str)):
        return str(v)
    return "%.17g" % float(v)


def write_text_atomic(path, text: str):
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=d)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([format_value(v) for v in r])
    write_text_atomic(path, buf.getvalue())


def write_json(path, obj):
    write_text_atomic(path, json.dumps(obj, indent=2, allow_nan=False) + "\n")
