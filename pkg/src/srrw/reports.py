"""Deterministic CSV and JSON emission.

Every artifact embeds provenance in its header: the package version, a short
hash of the effective run configuration, and the seed.  Numbers are written
with repr-level precision so a file re-parses to the values that produced it;
nothing locale- or time-dependent is ever written, which is what makes
byte-level comparison across thread counts a meaningful test.
"""

from __future__ import annotations

import hashlib
import json

VERSION = "0.1.0"


def format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def config_hash(mapping: dict) -> str:
    """Short stable digest of an effective configuration."""
    blob = "".join(f"{k}={mapping[k]}\n" for k in sorted(mapping))
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


def csv_bytes(meta: dict, columns, rows) -> bytes:
    """Render a CSV artifact: '#' metadata lines, header, data rows."""
    out = []
    for k in sorted(meta):
        out.append(f"# {k}: {meta[k]}")
    out.append(",".join(columns))
    for row in rows:
        out.append(",".join(format_value(v) for v in row))
    return ("\n".join(out) + "\n").encode()


def parse_csv(data: bytes):
    """Invert csv_bytes: (meta, columns, rows) with typed cells."""
    meta, columns, rows = {}, None, []
    for line in data.decode().splitlines():
        if not line:
            continue
        if line.startswith("#"):
            k, _, v = line[1:].partition(":")
            meta[k.strip()] = v.strip()
            continue
        cells = line.split(",")
        if columns is None:
            columns = cells
            continue
        typed = []
        for c in cells:
            if c == "true":
                typed.append(True)
            elif c == "false":
                typed.append(False)
            else:
                try:
                    typed.append(int(c))
                except ValueError:
                    try:
                        typed.append(float(c))
                    except ValueError:
                        typed.append(c)
        rows.append(tuple(typed))
    return meta, columns, rows


def json_bytes(payload: dict) -> bytes:
    return (json.dumps(payload, indent=2, sort_keys=True) + "\n").encode()
