"""Content-addressed JSON cache for expensive exact results.

Keys are sha256 digests of a canonical JSON envelope (engine version,
result kind, parameters), so stale engines never read each other's
entries. Values must already be JSON-safe; big integers go in as
decimal strings. Writes are atomic.
"""

from __future__ import annotations

import hashlib
import json
import os
import sys
import tempfile

from ._version import ENGINE_VERSION

__all__ = [
    "cache_dir",
    "digest",
    "ensure_big_digits",
    "get",
    "put",
    "stable_json",
]


def ensure_big_digits(limit: int = 200000) -> None:
    """Raise the int-to-str guard; exact traces run to thousands of digits."""
    if sys.get_int_max_str_digits() < limit:
        sys.set_int_max_str_digits(limit)


def stable_json(obj) -> str:
    ensure_big_digits()
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def digest(obj) -> str:
    return hashlib.sha256(stable_json(obj).encode("utf-8")).hexdigest()


def cache_dir() -> str:
    env = os.environ.get("UPSLOPES_CACHE_DIR")
    if env:
        return env
    return os.path.join(os.path.expanduser("~"), ".cache", "upslopes")


def _path(kind: str, params) -> str:
    key = digest({"engine": ENGINE_VERSION, "kind": kind, "params": params})
    return os.path.join(cache_dir(), f"{kind}-{key}.json")


def get(kind: str, params):
    path = _path(kind, params)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            entry = json.load(fh)
    except (OSError, ValueError):
        return None
    if entry.get("kind") != kind or entry.get("params") != _jsonify(params):
        return None
    return entry.get("value")


def put(kind: str, params, value) -> None:
    path = _path(kind, params)
    os.makedirs(os.path.dirname(path), exist_ok=True)
    body = stable_json({"kind": kind, "params": _jsonify(params), "value": value})
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path), suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(body)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _jsonify(obj):
    # round-trip through json so comparisons see canonical types
    return json.loads(stable_json(obj))
