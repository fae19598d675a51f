"""BIO decoding: per-token labels to flat entity tuples.

Decoding is total. A B-X starts an entity of type X and following I-X
tokens extend it; anything else closes it. Stray I-X tags (no open entity,
or an open entity of a different type) start a new entity of type X, the
relaxed repair conventional for argmax decoders, which can emit label
sequences no gold annotation would contain. Each entity's subtype set is
the union, over its span, of the subtype types active on those tokens,
with the B-/I- prefixes stripped: the subtypes' own segmentation does not
split the main span.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .errors import ValidationError
from .tagset import OUTSIDE_INDEX, Tagset

if TYPE_CHECKING:
    from .corpus_io import SentenceRecord


@dataclass(frozen=True)
class EntityTuple:
    """One decoded entity: inclusive token span, main type, subtype set."""

    s: int
    e: int
    main: str
    subs: frozenset[str] = frozenset()


def _strip_prefix(tag: str) -> str:
    if tag.startswith("B-") or tag.startswith("I-"):
        return tag[2:]
    return tag


def decode_entities(
    main_labels: Sequence[int] | np.ndarray,
    sub_tags: Sequence[set[str]] | None,
    ts: Tagset,
) -> list[EntityTuple]:
    """Maximal BIO runs over the main labels, in start order, never overlapping."""
    m = len(main_labels)
    if sub_tags is not None and len(sub_tags) != m:
        raise ValidationError(
            f"decode_entities: {m} labels but {len(sub_tags)} sub tag sets"
        )
    entities: list[EntityTuple] = []
    open_type: int | None = None  # index into ts.main_types
    start = 0

    def close(end: int) -> None:
        nonlocal open_type
        if open_type is None:
            return
        subs: set[str] = set()
        if sub_tags is not None:
            for pos in range(start, end + 1):
                subs.update(_strip_prefix(t) for t in sub_tags[pos])
        entities.append(
            EntityTuple(s=start, e=end, main=ts.main_types[open_type], subs=frozenset(subs))
        )
        open_type = None

    for i in range(m):
        idx = int(main_labels[i])
        if idx == OUTSIDE_INDEX:
            close(i - 1)
            continue
        if not 0 < idx < ts.main_label_count:
            raise ValidationError(f"main label index {idx} out of range at token {i}")
        type_i = (idx - 1) // 2
        begins = idx % 2 == 1
        if begins or open_type != type_i:
            # B- always starts fresh; a stray or type-switching I- does too.
            close(i - 1)
            open_type = type_i
            start = i
    close(m - 1)
    return entities


def encode_entities(
    entities: Sequence[EntityTuple], length: int, ts: Tagset
) -> tuple[list[int], list[set[str]]]:
    """Render entities back to per-token main labels and sub tag sets.

    Spans must be disjoint and inside [0, length). Subtypes get B- on the
    span's first token and I- on the rest, which decode_entities unions
    back to the same set.
    """
    main = [OUTSIDE_INDEX] * length
    subs: list[set[str]] = [set() for _ in range(length)]
    covered = [False] * length
    for ent in entities:
        if not 0 <= ent.s <= ent.e < length:
            raise ValidationError(f"entity span ({ent.s}, {ent.e}) outside [0, {length})")
        try:
            type_i = ts.main_types.index(ent.main)
        except ValueError:
            raise ValidationError(f"unknown main type {ent.main!r}") from None
        for pos in range(ent.s, ent.e + 1):
            if covered[pos]:
                raise ValidationError(f"overlapping entity spans at token {pos}")
            covered[pos] = True
        main[ent.s] = 2 * type_i + 1
        for pos in range(ent.s + 1, ent.e + 1):
            main[pos] = 2 * type_i + 2
        for name in ent.subs:
            ts.sub_index_of(f"B-{name}")  # validates the subtype exists
            subs[ent.s].add(f"B-{name}")
            for pos in range(ent.s + 1, ent.e + 1):
                subs[pos].add(f"I-{name}")
    return main, subs


def gold_entities(rec: "SentenceRecord", ts: Tagset) -> list[EntityTuple]:
    """Decode a record's gold annotation into entity tuples."""
    if rec.gold_main is None:
        raise ValidationError(f"record {rec.id}: missing gold_main")
    labels = [ts.main_index_of(tag) for tag in rec.gold_main]
    return decode_entities(labels, rec.gold_sub, ts)


def entity_to_obj(ent: EntityTuple) -> dict:
    return {"s": ent.s, "e": ent.e, "main": ent.main, "subs": sorted(ent.subs)}


def entity_from_obj(obj, ts: Tagset) -> EntityTuple:
    if not isinstance(obj, dict):
        raise ValidationError("entity is not an object")
    missing = {"s", "e", "main"} - set(obj)
    if missing:
        raise ValidationError(f"entity missing keys {sorted(missing)}")
    s, e, main = obj["s"], obj["e"], obj["main"]
    if not isinstance(s, int) or not isinstance(e, int) or not 0 <= s <= e:
        raise ValidationError(f"entity has invalid span ({s!r}, {e!r})")
    if main not in ts.main_types:
        raise ValidationError(f"unknown main type {main!r}")
    subs = obj.get("subs", [])
    if not isinstance(subs, list):
        raise ValidationError("entity 'subs' must be a list")
    for name in subs:
        if name not in ts.sub_types:
            raise ValidationError(f"unknown subtype {name!r}")
    return EntityTuple(s=s, e=e, main=main, subs=frozenset(subs))
