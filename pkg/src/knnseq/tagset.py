"""Label taxonomy with deterministic BIO index maps.

Two label spaces are derived from a tagset:

* the main space of size ``2 * |main_types| + 1`` with "O" at index 0,
  "B-<type>" at odd indices and "I-<type>" at even nonzero indices, types
  in file order;
* the sub space of size ``2 * |sub_types|`` with "B-<subtype>" at even
  indices and "I-<subtype>" at odd indices. There is no "O" in the sub
  space; absence of a subtype is simply the tag not being emitted.

The index assignment is a fixed convention of this package so that two
loads of the same file always agree, and artifacts built under one tagset
can be recognized (and stale ones rejected) via a content hash.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import cached_property

from .errors import ValidationError

OUTSIDE_TAG = "O"
OUTSIDE_INDEX = 0

TAGSET_VERSION = "tagset-v1"


def _check_type_name(name: str, seen: set[str]) -> None:
    if not name:
        raise ValidationError("tagset: empty type name")
    if any(ch.isspace() for ch in name):
        raise ValidationError(f"tagset: type name {name!r} contains whitespace")
    if name == OUTSIDE_TAG:
        raise ValidationError("tagset: 'O' is reserved for the outside tag")
    if name.startswith("B-") or name.startswith("I-"):
        raise ValidationError(f"tagset: type name {name!r} collides with a BIO prefix")
    if name in seen:
        raise ValidationError(f"tagset: duplicate type name {name!r}")
    seen.add(name)


@dataclass(frozen=True)
class Tagset:
    """Immutable taxonomy of main entity types and subtype types."""

    main_types: tuple[str, ...]
    sub_types: tuple[str, ...]
    version: str = TAGSET_VERSION

    def __post_init__(self) -> None:
        if not self.main_types:
            raise ValidationError("tagset: empty main type list")
        seen: set[str] = set()
        for name in self.main_types:
            _check_type_name(name, seen)
        for name in self.sub_types:
            _check_type_name(name, seen)

    @property
    def main_label_count(self) -> int:
        return 2 * len(self.main_types) + 1

    @property
    def sub_label_count(self) -> int:
        return 2 * len(self.sub_types)

    @cached_property
    def _main_index(self) -> dict[str, int]:
        table = {OUTSIDE_TAG: OUTSIDE_INDEX}
        for i, name in enumerate(self.main_types):
            table[f"B-{name}"] = 2 * i + 1
            table[f"I-{name}"] = 2 * i + 2
        return table

    @cached_property
    def _sub_index(self) -> dict[str, int]:
        table: dict[str, int] = {}
        for i, name in enumerate(self.sub_types):
            table[f"B-{name}"] = 2 * i
            table[f"I-{name}"] = 2 * i + 1
        return table

    def main_index_of(self, tag: str) -> int:
        """Index of a main-space BIO tag ("O", "B-<type>" or "I-<type>")."""
        idx = self._main_index.get(tag)
        if idx is None:
            raise ValidationError(f"unknown main tag {tag!r}")
        return idx

    def main_tag_of(self, idx: int) -> str:
        if idx == OUTSIDE_INDEX:
            return OUTSIDE_TAG
        if not 0 < idx < self.main_label_count:
            raise ValidationError(f"main label index {idx} out of range")
        prefix = "B" if idx % 2 == 1 else "I"
        return f"{prefix}-{self.main_types[(idx - 1) // 2]}"

    def sub_index_of(self, tag: str) -> int:
        """Index of a sub-space BIO tag ("B-<subtype>" or "I-<subtype>")."""
        idx = self._sub_index.get(tag)
        if idx is None:
            raise ValidationError(f"unknown sub tag {tag!r}")
        return idx

    def sub_tag_of(self, idx: int) -> str:
        if not 0 <= idx < self.sub_label_count:
            raise ValidationError(f"sub label index {idx} out of range")
        prefix = "B" if idx % 2 == 0 else "I"
        return f"{prefix}-{self.sub_types[idx // 2]}"

    @cached_property
    def hash_bytes(self) -> bytes:
        """sha256 digest over the canonical rendering; 32 bytes.

        Comments and blank lines in the source file do not affect the hash,
        only the version string and the two ordered name lists.
        """
        parts = [self.version, "main:", *self.main_types, "sub:", *self.sub_types]
        canonical = "\n".join(parts) + "\n"
        return hashlib.sha256(canonical.encode("utf-8")).digest()

    @property
    def hash_hex(self) -> str:
        return self.hash_bytes.hex()


def parse_tagset(text: str) -> Tagset:
    """Parse the tagset text format.

    Line 1 must be ``tagset-v1``; a ``main:`` section and a ``sub:`` section
    follow, one name per line. ``#`` starts a comment line; blank lines are
    ignored. The sub section may be empty.
    """
    lines = text.splitlines()
    if not lines or lines[0].strip() != TAGSET_VERSION:
        raise ValidationError(f"tagset: line 1 must be {TAGSET_VERSION!r}")
    sections: dict[str, list[str]] = {}
    current: list[str] | None = None
    for lineno, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line in ("main:", "sub:"):
            key = line[:-1]
            if key in sections:
                raise ValidationError(f"tagset: line {lineno}: duplicate section {line!r}")
            current = sections.setdefault(key, [])
            continue
        if current is None:
            raise ValidationError(f"tagset: line {lineno}: name {line!r} outside any section")
        current.append(line)
    if "main" not in sections:
        raise ValidationError("tagset: missing 'main:' section")
    if "sub" not in sections:
        raise ValidationError("tagset: missing 'sub:' section")
    return Tagset(main_types=tuple(sections["main"]), sub_types=tuple(sections["sub"]))


def load_tagset(path) -> Tagset:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ValidationError(f"tagset: cannot read {path}: {exc}") from exc
    return parse_tagset(text)


def format_tagset(ts: Tagset) -> str:
    """Render a tagset back to its file format (inverse of parse_tagset)."""
    parts = [ts.version, "main:", *ts.main_types, "sub:", *ts.sub_types]
    return "\n".join(parts) + "\n"
