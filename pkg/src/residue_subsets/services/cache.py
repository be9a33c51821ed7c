"""Persistent class-number cache backed by a ``d,h`` CSV file."""
from __future__ import annotations

import logging
import os
import tempfile
from pathlib import Path
from typing import Dict, Iterable, Mapping, Optional, Tuple

import pandas as pd

from residue_subsets.classnum.forms import class_number_forms
from residue_subsets.errors import UsageError

LOGGER = logging.getLogger(__name__)

CACHE_COLUMNS = ["d", "h"]


def load_class_numbers(path: Path) -> Dict[int, int]:
    """Read a cache file; a missing file is an empty cache."""

    if not path.exists():
        LOGGER.debug("No class-number cache at %s", path)
        return {}
    frame = pd.read_csv(path)
    missing = set(CACHE_COLUMNS) - set(frame.columns)
    if missing:
        raise UsageError(f"Cache file {path} lacks columns {sorted(missing)}")
    frame = frame.astype({"d": "int64", "h": "int64"})
    entries = dict(zip(frame["d"].tolist(), frame["h"].tolist()))
    LOGGER.info("Loaded %d class numbers from %s", len(entries), path)
    return entries


def write_class_numbers(path: Path, entries: Mapping[int, int]) -> None:
    """Rewrite the cache atomically: ascending |d|, one row per d."""

    ordered = sorted(entries.items(), key=lambda item: abs(item[0]))
    frame = pd.DataFrame(ordered, columns=CACHE_COLUMNS)
    path.parent.mkdir(parents=True, exist_ok=True)
    handle, temp_name = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(handle, "w", encoding="utf-8", newline="") as stream:
            frame.to_csv(stream, index=False, lineterminator="\n")
        os.replace(temp_name, path)
    except BaseException:
        Path(temp_name).unlink(missing_ok=True)
        raise
    LOGGER.info("Wrote %d class numbers to %s", len(ordered), path)


class ClassNumberCache:
    """In-memory class numbers seeded from disk; new values are tracked for a later merge.

    Absence of the cache never changes a result, only how long it takes.
    """

    def __init__(self, entries: Optional[Mapping[int, int]] = None) -> None:
        self._known: Dict[int, int] = dict(entries or {})
        self._fresh: Dict[int, int] = {}

    def __call__(self, d: int) -> int:
        return self.get(d)

    def __len__(self) -> int:
        return len(self._known)

    @classmethod
    def from_path(cls, path: Optional[Path]) -> "ClassNumberCache":
        return cls(load_class_numbers(path) if path else None)

    def get(self, d: int) -> int:
        h = self._known.get(d)
        if h is None:
            h = class_number_forms(d)
            self._known[d] = h
            self._fresh[d] = h
            LOGGER.debug("Cache miss for d=%d -> h=%d", d, h)
        return h

    def fresh_entries(self) -> Dict[int, int]:
        """Values computed since construction (what a worker hands back)."""

        return dict(self._fresh)

    def merge(self, entries: Iterable[Tuple[int, int]]) -> None:
        for d, h in entries:
            if d not in self._known:
                self._fresh[d] = h
            self._known[d] = h

    def snapshot(self) -> Dict[int, int]:
        return dict(self._known)

    def save(self, path: Path) -> None:
        if not self._fresh and path.exists():
            LOGGER.debug("Class-number cache %s already current", path)
            return
        write_class_numbers(path, self._known)
        self._fresh.clear()
