"""One canonical JSON form shared by the CLI and the HTTP service.

CLI stdout and HTTP bodies must be byte-identical for the same query, so both
go through this serializer: UTF-8, compact separators, insertion-ordered keys,
trailing newline, NaN/Infinity rejected (degenerate values are encoded as null
plus an explicit flag by their payload builders).
"""
from __future__ import annotations

import json


def canonical_dumps(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"),
                      allow_nan=False) + "\n"


def canonical_bytes(obj) -> bytes:
    return canonical_dumps(obj).encode("utf-8")
