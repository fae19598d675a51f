"""Reader for the tagset file format shared with the knnseq package.

This is a deliberately independent implementation: the exporter talks to
knnseq only through file formats, and the corpus header must carry the
same content hash knnseq computes, i.e. sha256 over

    "\\n".join([version, "main:", *main_types, "sub:", *sub_types]) + "\\n"

encoded as UTF-8. Main BIO tags are "O" plus B-/I- over the main types;
sub BIO tags are B-/I- over the subtype list, with no "O".
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import cached_property

from .errors import ExporterError

TAGSET_VERSION = "tagset-v1"


@dataclass(frozen=True)
class Taxonomy:
    main_types: tuple[str, ...]
    sub_types: tuple[str, ...]
    version: str = TAGSET_VERSION

    @property
    def main_label_count(self) -> int:
        return 2 * len(self.main_types) + 1

    @property
    def sub_label_count(self) -> int:
        return 2 * len(self.sub_types)

    @cached_property
    def hash_hex(self) -> str:
        parts = [self.version, "main:", *self.main_types, "sub:", *self.sub_types]
        canonical = "\n".join(parts) + "\n"
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    @cached_property
    def _main_tags(self) -> frozenset[str]:
        tags = {"O"}
        for name in self.main_types:
            tags.add(f"B-{name}")
            tags.add(f"I-{name}")
        return frozenset(tags)

    @cached_property
    def _sub_tags(self) -> frozenset[str]:
        tags = set()
        for name in self.sub_types:
            tags.add(f"B-{name}")
            tags.add(f"I-{name}")
        return frozenset(tags)

    def is_main_tag(self, tag: str) -> bool:
        return tag in self._main_tags

    def is_sub_tag(self, tag: str) -> bool:
        return tag in self._sub_tags


def read_taxonomy(path) -> Taxonomy:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ExporterError(f"cannot read tagset {path}: {exc}") from exc
    if not lines or lines[0].strip() != TAGSET_VERSION:
        raise ExporterError(f"tagset: line 1 must be {TAGSET_VERSION!r}")
    sections: dict[str, list[str]] = {}
    current: list[str] | None = None
    for lineno, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line in ("main:", "sub:"):
            key = line[:-1]
            if key in sections:
                raise ExporterError(f"tagset: line {lineno}: duplicate section {line!r}")
            current = sections.setdefault(key, [])
            continue
        if current is None:
            raise ExporterError(f"tagset: line {lineno}: name {line!r} outside any section")
        current.append(line)
    if "main" not in sections or "sub" not in sections:
        raise ExporterError("tagset: missing 'main:' or 'sub:' section")
    if not sections["main"]:
        raise ExporterError("tagset: empty main type list")
    return Taxonomy(main_types=tuple(sections["main"]), sub_types=tuple(sections["sub"]))
