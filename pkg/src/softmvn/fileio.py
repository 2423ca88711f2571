"""Atomic file output and stable serialization for experiment artifacts.

Reports are JSON with sorted keys and a trailing newline so identical runs are
byte-identical; CSV and JSON files are written to a temp file in the target
directory and moved into place, so readers never observe partial writes.
"""

from __future__ import annotations

import json
import os
import tempfile

__all__ = ["atomic_write_text", "json_text", "write_json"]


def atomic_write_text(path, text):
    path = os.path.abspath(path)
    dirname = os.path.dirname(path)
    os.makedirs(dirname, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=dirname, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def json_text(obj):
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json(path, obj):
    atomic_write_text(path, json_text(obj))
