"""Shared helpers: keyed deterministic RNG, JSONL io, casing utilities.

Every random choice in the package flows through :func:`stable_rng` so that a
run is a pure function of its inputs and seed.  Python's builtin ``hash`` is
salted per process and must never be used for seeding; we hash the key parts
with blake2b instead.
"""

from __future__ import annotations

import hashlib
import json
import random
from pathlib import Path
from typing import Any, Iterable, Iterator

_KEY_SEP = "\x1f"  # unit separator: cannot collide with str() of sane key parts


def stable_seed(*parts: Any) -> int:
    """Derive a 64-bit seed from an arbitrary key tuple, stable across runs."""
    material = _KEY_SEP.join(str(p) for p in parts)
    digest = hashlib.blake2b(material.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def stable_rng(*parts: Any) -> random.Random:
    """A private ``random.Random`` seeded from the key tuple.

    Callers pass a distinct key per decision site (e.g. seed, sentence id,
    word index, intervention name) so draws are independent and insensitive
    to processing order.
    """
    return random.Random(stable_seed(*parts))


def content_digest(text: str, length: int = 12) -> str:
    """Short stable hex digest of a string (used for sentence ids)."""
    return hashlib.blake2b(text.encode("utf-8"), digest_size=16).hexdigest()[:length]


def match_case(replacement: str, template: str) -> str:
    """Re-apply the casing pattern of ``template`` onto ``replacement``.

    All-caps templates (longer than one char) yield all-caps output,
    title-case templates capitalize the first letter, anything else leaves
    the replacement as produced (lexicon entries are stored lowercase).
    """
    if not replacement or not template:
        return replacement
    if template.isupper() and len(template) > 1:
        return replacement.upper()
    if template[:1].isupper():
        return replacement[:1].upper() + replacement[1:]
    return replacement


def dumps_compact(obj: Any) -> str:
    """Canonical single-line JSON: compact separators, keys in insertion order."""
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def write_jsonl(path: str | Path, records: Iterable[dict]) -> int:
    """Write records as one JSON object per line; returns the record count."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    n = 0
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(dumps_compact(rec))
            fh.write("\n")
            n += 1
    return n


def read_jsonl(path: str | Path) -> Iterator[dict]:
    """Yield one dict per non-blank line; malformed lines raise ValueError."""
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{lineno}: bad JSON line: {exc}") from None
            if not isinstance(obj, dict):
                raise ValueError(f"{path}:{lineno}: expected a JSON object")
            yield obj


def write_json(path: str | Path, obj: Any) -> None:
    """Pretty, key-stable JSON file with a trailing newline."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, ensure_ascii=False, indent=2)
        fh.write("\n")


def read_json(path: str | Path) -> Any:
    with Path(path).open("r", encoding="utf-8") as fh:
        return json.load(fh)
