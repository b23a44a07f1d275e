"""Content-addressed vertex cache.

One JSON record per vertex keyed by the canonical fixed-point key (legs,
added boxes or box configuration, substitution): the TLaurent rendering of
V and the factored rendering of its Euler root, behind a versioned header.
The file lives at <dir>/vertices.jsonl; DT4VERTEX_CACHE_DIR overrides the
default directory.
"""

from __future__ import annotations

import json
import os
import threading

FORMAT = "dt4vertex-cache"
VERSION = 1
FILENAME = "vertices.jsonl"


def default_cache_dir():
    env = os.environ.get("DT4VERTEX_CACHE_DIR")
    if env:
        return env
    base = os.environ.get("XDG_CACHE_HOME", os.path.expanduser("~/.cache"))
    return os.path.join(base, "dt4vertex")


class VertexCache:
    """In-memory vertex store with optional JSONL persistence; get/put are
    thread-safe with single-writer appends."""

    def __init__(self, directory=None, persist=True):
        self.directory = directory if directory is not None else default_cache_dir()
        self.persist = persist
        self._lock = threading.Lock()
        self._data = {}
        self.hits = 0
        self.misses = 0
        if self.persist:
            self._load()

    @property
    def path(self):
        return os.path.join(self.directory, FILENAME)

    def _load(self):
        if not os.path.exists(self.path):
            return
        with open(self.path, "r", encoding="utf-8") as fh:
            header = fh.readline()
            if header:
                meta = json.loads(header)
                if meta.get("format") != FORMAT or meta.get("version") != VERSION:
                    raise ValueError(f"unrecognized cache file {self.path}")
            for line in fh:
                line = line.strip()
                if line:
                    rec = json.loads(line)
                    self._data[rec["key"]] = rec

    def _append(self, record):
        os.makedirs(self.directory, exist_ok=True)
        new = not os.path.exists(self.path)
        with open(self.path, "a", encoding="utf-8") as fh:
            if new:
                fh.write(json.dumps({"format": FORMAT, "version": VERSION}) + "\n")
            fh.write(json.dumps(record, sort_keys=True) + "\n")

    def get(self, key):
        with self._lock:
            rec = self._data.get(key)
            if rec is None:
                self.misses += 1
            else:
                self.hits += 1
            return rec

    def put(self, key, record):
        with self._lock:
            if key in self._data:
                return
            self._data[key] = record
            if self.persist:
                self._append(record)

    def keys(self):
        with self._lock:
            return sorted(self._data)

    def __len__(self):
        return len(self._data)

    def stats(self):
        with self._lock:
            return {
                "directory": self.directory,
                "entries": len(self._data),
                "hits": self.hits,
                "misses": self.misses,
            }

    def clear(self):
        with self._lock:
            self._data.clear()
            self.hits = 0
            self.misses = 0
            if self.persist and os.path.exists(self.path):
                os.remove(self.path)
