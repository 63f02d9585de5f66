"""Content-addressed response cache: append-only JSONL index plus per-key text files.

Layout under the cache directory:

    index.jsonl           one metadata record per stored response
    objects/<digest>.txt  the response for one cache key, JSON-framed

The object file is the source of truth; a missing, truncated, or
otherwise damaged object is treated as a miss and rewritten. Writes are
atomic (temp file + rename), so concurrent writers of the same key
degrade to last-writer-wins.
"""

from __future__ import annotations

import json
import logging
import os
import time
from pathlib import Path

logger = logging.getLogger(__name__)


class ResponseCache:
    def __init__(self, directory: str | Path):
        self.root = Path(directory)
        self.objects = self.root / "objects"
        self.objects.mkdir(parents=True, exist_ok=True)
        self.index_path = self.root / "index.jsonl"

    def _object_path(self, key: str) -> Path:
        return self.objects / f"{key}.txt"

    def get(self, key: str) -> str | None:
        path = self._object_path(key)
        try:
            raw = path.read_text(encoding="utf-8")
        except FileNotFoundError:
            return None
        except (OSError, UnicodeDecodeError) as exc:
            logger.warning("cache entry %s unreadable, treating as miss: %s", key, exc)
            return None
        try:
            record = json.loads(raw)
            return record["text"]
        except (ValueError, TypeError, KeyError) as exc:
            logger.warning("cache entry %s corrupt, treating as miss: %s", key, exc)
            return None

    def put(self, key: str, summary: dict, text: str) -> None:
        path = self._object_path(key)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps({"text": text}, ensure_ascii=False), encoding="utf-8")
        os.replace(tmp, path)
        record = {"key": key, "stored_at": time.time(), **summary}
        with self.index_path.open("a", encoding="utf-8") as handle:
            handle.write(json.dumps(record, sort_keys=True) + "\n")

    def stats(self) -> tuple[int, int]:
        """(entry count, total stored bytes) over the object store."""
        entries = 0
        size = 0
        for path in self.objects.glob("*.txt"):
            entries += 1
            size += path.stat().st_size
        return entries, size
