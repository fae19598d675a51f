"""Reader for the labeled token/tag dataset format.

Tab-separated columns per line: token, main BIO tag, and an optional
subtype column holding ``;``-separated sub BIO tags (empty or absent means
no subtype). Blank lines separate sentences; ``#`` starts a comment line.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ExporterError
from .taxonomy import Taxonomy


@dataclass
class LabeledSentence:
    tokens: list[str]
    main_tags: list[str]
    sub_tags: list[list[str]]

    def __len__(self) -> int:
        return len(self.tokens)


def read_dataset(path, taxonomy: Taxonomy) -> list[LabeledSentence]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ExporterError(f"cannot read dataset {path}: {exc}") from exc

    sentences: list[LabeledSentence] = []
    current = LabeledSentence([], [], [])

    def flush():
        nonlocal current
        if current.tokens:
            sentences.append(current)
            current = LabeledSentence([], [], [])

    for lineno, raw in enumerate(lines, start=1):
        if raw.startswith("#"):
            continue
        if not raw.strip():
            flush()
            continue
        columns = raw.split("\t")
        if len(columns) not in (2, 3):
            raise ExporterError(
                f"dataset line {lineno}: expected 2 or 3 tab-separated columns, got {len(columns)}"
            )
        token = columns[0]
        if not token:
            raise ExporterError(f"dataset line {lineno}: empty token")
        main_tag = columns[1].strip()
        if not taxonomy.is_main_tag(main_tag):
            raise ExporterError(f"dataset line {lineno}: unknown main tag {main_tag!r}")
        subs: list[str] = []
        if len(columns) == 3 and columns[2].strip():
            for tag in columns[2].strip().split(";"):
                tag = tag.strip()
                if not taxonomy.is_sub_tag(tag):
                    raise ExporterError(f"dataset line {lineno}: unknown sub tag {tag!r}")
                if tag in subs:
                    raise ExporterError(f"dataset line {lineno}: duplicate sub tag {tag!r}")
                subs.append(tag)
        current.tokens.append(token)
        current.main_tags.append(main_tag)
        current.sub_tags.append(subs)
    flush()
    if not sentences:
        raise ExporterError("dataset contains no sentences")
    return sentences
