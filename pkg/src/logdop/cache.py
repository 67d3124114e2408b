"""Optional on-disk cache of computed invariant-factor lists, keyed (p, d, m)."""

from __future__ import annotations

import json
from pathlib import Path

from .errors import SectionFormatError


class DiskCache:
    """One JSON file per (p, d, m) holding the invariant exponents.

    Files use the h1-group/1 format, so cache entries are plain interface
    documents; corrupt entries are reported, never silently recomputed.
    """

    def __init__(self, directory):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    def _path(self, p: int, d: int, m: int) -> Path:
        return self.directory / f"h1-p{p}-d{d}-m{m}.json"

    def get(self, p: int, d: int, m: int):
        path = self._path(p, d, m)
        if not path.exists():
            return None
        doc = json.loads(path.read_text())
        if doc.get("format") != "h1-group/1" or \
                (doc.get("p"), doc.get("d"), doc.get("m")) != (p, d, m):
            raise SectionFormatError(f"corrupt cache entry {path}")
        return tuple(int(n) for n in doc["exponents"])

    def put(self, p: int, d: int, m: int, exponents) -> None:
        doc = {"format": "h1-group/1", "p": p, "d": d, "m": m,
               "exponents": list(exponents)}
        self._path(p, d, m).write_text(json.dumps(doc, indent=1) + "\n")
