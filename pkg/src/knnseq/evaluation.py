"""Entity-level micro precision/recall/F1 over main types and subtypes.

Every entity expands into scoring instances: one (s, e, main_type) plus
one (s, e, subtype) per attached subtype. An instance is a true positive
iff the identical instance exists on the other side; subtype instances are
scored independently of whether their main instance matched. Degenerate
conventions: no predictions against nonempty gold scores 0, and two empty
sides score 1 across the board.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .decode import EntityTuple
from .errors import ValidationError
from .tagset import Tagset

Instance = tuple[int, int, str]


def _prf(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    if tp == 0 and fp == 0 and fn == 0:
        return 1.0, 1.0, 1.0
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


@dataclass
class TypeCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    @property
    def precision(self) -> float:
        return _prf(self.tp, self.fp, self.fn)[0]

    @property
    def recall(self) -> float:
        return _prf(self.tp, self.fp, self.fn)[1]

    @property
    def f1(self) -> float:
        return _prf(self.tp, self.fp, self.fn)[2]

    def to_dict(self) -> dict:
        precision, recall, f1 = _prf(self.tp, self.fp, self.fn)
        return {
            "precision": precision, "recall": recall, "f1": f1,
            "tp": self.tp, "fp": self.fp, "fn": self.fn,
        }


@dataclass
class EvalReport:
    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    fn: int
    per_type: dict[str, TypeCounts] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "precision": self.precision, "recall": self.recall, "f1": self.f1,
            "tp": self.tp, "fp": self.fp, "fn": self.fn,
            "per_type": {name: c.to_dict() for name, c in sorted(self.per_type.items())},
        }


def expand_instances(entities: Sequence[EntityTuple]) -> Counter:
    """Scoring instances of an entity list, as a multiset keyed (s, e, tag)."""
    instances: Counter = Counter()
    for ent in entities:
        instances[(ent.s, ent.e, ent.main)] += 1
        for sub in ent.subs:
            instances[(ent.s, ent.e, sub)] += 1
    return instances


def micro_prf(
    gold: Mapping[str, Sequence[EntityTuple]],
    pred: Mapping[str, Sequence[EntityTuple]],
    ts: Tagset,
) -> EvalReport:
    """Micro-averaged entity-level scores; gold and pred aligned by sentence id."""
    gold_ids, pred_ids = set(gold), set(pred)
    if gold_ids != pred_ids:
        missing = sorted(gold_ids - pred_ids)[:3]
        extra = sorted(pred_ids - gold_ids)[:3]
        raise ValidationError(
            f"sentence id mismatch between gold and predictions "
            f"(missing from pred: {missing}, unknown in pred: {extra})"
        )
    per_type: dict[str, TypeCounts] = {}

    def counts_for(tag: str) -> TypeCounts:
        if tag not in per_type:
            per_type[tag] = TypeCounts()
        return per_type[tag]

    for sid in gold:
        g = expand_instances(gold[sid])
        p = expand_instances(pred[sid])
        matched = g & p
        for (_, _, tag), n in matched.items():
            counts_for(tag).tp += n
        for (_, _, tag), n in (p - g).items():
            counts_for(tag).fp += n
        for (_, _, tag), n in (g - p).items():
            counts_for(tag).fn += n

    known = set(ts.main_types) | set(ts.sub_types)
    for tag in per_type:
        if tag not in known:
            raise ValidationError(f"entity tag {tag!r} is not in the tagset")

    tp = sum(c.tp for c in per_type.values())
    fp = sum(c.fp for c in per_type.values())
    fn = sum(c.fn for c in per_type.values())
    precision, recall, f1 = _prf(tp, fp, fn)
    return EvalReport(
        precision=precision, recall=recall, f1=f1, tp=tp, fp=fp, fn=fn, per_type=per_type
    )
