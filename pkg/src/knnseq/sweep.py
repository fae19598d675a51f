"""Grid search over neighbor count and interpolation factor.

Neighbors are retrieved once per token at the largest k in the grid;
smaller k values are served from prefixes of that list, which is exact
because a retrieval at k is by construction the length-k prefix of a
retrieval at any k' >= k. The neighbor distribution for a given k is
likewise computed once and shared across every lambda.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .datastore import Datastore, knn_search
from .decode import decode_entities, gold_entities
from .errors import ValidationError
from .evaluation import micro_prf
from .inference import interpolate, knn_distribution, sub_tags_from_scores
from .tagset import Tagset

if TYPE_CHECKING:
    from .corpus_io import Corpus

DEFAULT_KS = (8, 16, 32, 64, 128, 256, 512)
DEFAULT_LAMBDAS = tuple(i / 10 for i in range(11))


@dataclass(frozen=True)
class SweepGrid:
    ks: tuple[int, ...] = DEFAULT_KS
    lambdas: tuple[float, ...] = DEFAULT_LAMBDAS
    tau: float = 1.0

    def __post_init__(self) -> None:
        if not self.ks or not self.lambdas:
            raise ValidationError("sweep grid must have at least one k and one lambda")
        if any(k < 1 for k in self.ks):
            raise ValidationError("sweep grid k values must be positive")
        if len(set(self.ks)) != len(self.ks) or len(set(self.lambdas)) != len(self.lambdas):
            raise ValidationError("sweep grid values must be unique")
        if any(not 0.0 <= lam <= 1.0 for lam in self.lambdas):
            raise ValidationError("sweep grid lambda values must lie in [0, 1]")
        if not self.tau > 0.0:
            raise ValidationError(f"tau must be positive, got {self.tau}")


@dataclass(frozen=True)
class SweepRow:
    k: int
    lam: float
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    best: SweepRow


def run_sweep(dev: "Corpus", ds: Datastore, grid: SweepGrid, ts: Tagset) -> SweepResult:
    """Full predict + decode + score for every (k, lambda) cell.

    Rows come back sorted by (k, lambda). The best row maximizes f1, with
    ties resolved to the smaller k and then the larger lambda.
    """
    label_count = ts.main_label_count
    gold = {}
    for rec in dev.records:
        if rec.emb is None or rec.p_main is None:
            raise ValidationError(f"record {rec.id}: sweep requires emb and p_main")
        gold[rec.id] = gold_entities(rec, ts)

    k_max = max(grid.ks)
    # Retrieve once per token at k_max; every smaller k reads a prefix.
    neighbor_lists = [
        [knn_search(ds, rec.emb[i], k_max) for i in range(rec.length)]
        for rec in dev.records
    ]
    sub_sets = [
        [set() for _ in range(rec.length)] if rec.p_sub is None
        else [sub_tags_from_scores(rec.p_sub[i], ts) for i in range(rec.length)]
        for rec in dev.records
    ]

    rows: list[SweepRow] = []
    for k in sorted(grid.ks):
        p_knn_per_rec = [
            np.stack([
                knn_distribution(nbrs.prefix(k), grid.tau, label_count)
                for nbrs in rec_nbrs
            ])
            for rec_nbrs in neighbor_lists
        ]
        for lam in sorted(grid.lambdas):
            pred = {}
            for rec, p_knn, subs in zip(dev.records, p_knn_per_rec, sub_sets):
                p_final = interpolate(rec.p_main, p_knn, lam)
                main = np.argmax(p_final, axis=1)
                pred[rec.id] = decode_entities(main, subs, ts)
            report = micro_prf(gold, pred, ts)
            rows.append(SweepRow(
                k=k, lam=lam,
                precision=report.precision, recall=report.recall, f1=report.f1,
            ))
    best = max(rows, key=lambda r: (r.f1, -r.k, r.lam))
    return SweepResult(rows=tuple(rows), best=best)


def format_sweep_csv(result: SweepResult) -> str:
    """Sensitivity table: header, one row per cell, best row as a trailing comment."""
    lines = ["k,lambda,precision,recall,f1"]
    for r in result.rows:
        lines.append(f"{r.k},{r.lam!r},{r.precision!r},{r.recall!r},{r.f1!r}")
    b = result.best
    lines.append(
        f"# best: k={b.k} lambda={b.lam!r} precision={b.precision!r} "
        f"recall={b.recall!r} f1={b.f1!r}"
    )
    return "\n".join(lines) + "\n"
