"""Neighbor-derived label distributions and interpolation with the base model.

Retrieved neighbors induce a distribution over the main BIO label space:
each label's mass is the sum of exp(similarity / tau) over neighbors
carrying it, normalized over the full space. Labels with no retrieved
neighbor get probability exactly 0, not merely something small. The final
per-token distribution is the convex combination

    p_final = lam * p_main + (1 - lam) * p_knn

so lam=1 reproduces the base model exactly and lam=0 uses neighbors only.
All functions are pure; tokens may be processed concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .datastore import Datastore, NeighborList, knn_search
from .errors import ValidationError
from .tagset import Tagset

if TYPE_CHECKING:
    from .corpus_io import SentenceRecord

SUB_THRESHOLD = 0.5


@dataclass(frozen=True)
class KnnConfig:
    """Retrieval hyperparameters: neighbor count, interpolation factor, temperature."""

    k: int = 512
    lam: float = 0.5
    tau: float = 1.0

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValidationError(f"k must be a positive integer, got {self.k}")
        if not 0.0 <= self.lam <= 1.0:
            raise ValidationError(f"lambda must lie in [0, 1], got {self.lam}")
        if not self.tau > 0.0:
            raise ValidationError(f"tau must be positive, got {self.tau}")


def knn_distribution(nbrs: NeighborList, tau: float, label_count: int) -> np.ndarray:
    """Distribution over ``label_count`` labels induced by retrieved neighbors.

    Exponentials are taken after subtracting the max similarity/tau term,
    which cancels in the normalization but keeps small tau safe.
    """
    if nbrs.effective_k == 0:
        raise ValidationError("knn_distribution: empty neighbor list")
    if not tau > 0.0:
        raise ValidationError(f"tau must be positive, got {tau}")
    if int(nbrs.labels.max()) >= label_count:
        raise ValidationError(
            f"neighbor label {int(nbrs.labels.max())} outside label space {label_count}"
        )
    scaled = nbrs.scores / tau
    weights = np.exp(scaled - scaled.max())
    probs = np.bincount(nbrs.labels, weights=weights, minlength=label_count)
    return probs / probs.sum()


def interpolate(p_main: np.ndarray, p_knn: np.ndarray, lam: float) -> np.ndarray:
    """lam * p_main + (1 - lam) * p_knn, elementwise."""
    p_main = np.asarray(p_main, dtype=np.float64)
    p_knn = np.asarray(p_knn, dtype=np.float64)
    if p_main.shape != p_knn.shape:
        raise ValidationError(
            f"interpolate: label spaces differ ({p_main.shape} vs {p_knn.shape})"
        )
    if not 0.0 <= lam <= 1.0:
        raise ValidationError(f"lambda must lie in [0, 1], got {lam}")
    return lam * p_main + (1.0 - lam) * p_knn


def sub_tags_from_scores(p_sub_row: np.ndarray, ts: Tagset) -> set[str]:
    """Sub tags whose independent score exceeds the 0.5 threshold."""
    active = np.flatnonzero(np.asarray(p_sub_row) > SUB_THRESHOLD)
    return {ts.sub_tag_of(int(j)) for j in active}


def predict_tokens(
    rec: "SentenceRecord", ds: Datastore, cfg: KnnConfig, ts: Tagset
) -> tuple[np.ndarray, list[set[str]]]:
    """Per-token decisions: interpolated argmax main label plus thresholded sub tags.

    Retrieval augments the main distribution only; sub scores pass through
    untouched, and a record without them decodes with empty sub sets. Argmax
    ties resolve to the lower label index, so "O" wins exact ties.
    """
    if rec.emb is None:
        raise ValidationError(f"record {rec.id}: missing emb, cannot run retrieval")
    if rec.p_main is None:
        raise ValidationError(f"record {rec.id}: missing p_main, cannot interpolate")
    if ds.tagset_hash != ts.hash_hex:
        raise ValidationError("datastore was built under a different tagset")
    if rec.emb.shape[1] != ds.dim:
        raise ValidationError(
            f"record {rec.id}: embedding dim {rec.emb.shape[1]} != datastore dim {ds.dim}"
        )
    label_count = ts.main_label_count
    if rec.p_main.shape[1] != label_count:
        raise ValidationError(
            f"record {rec.id}: p_main width {rec.p_main.shape[1]} != label space {label_count}"
        )
    main = np.empty(rec.length, dtype=np.int64)
    for i in range(rec.length):
        nbrs = knn_search(ds, rec.emb[i], cfg.k)
        p_knn = knn_distribution(nbrs, cfg.tau, label_count)
        p_final = interpolate(rec.p_main[i], p_knn, cfg.lam)
        main[i] = int(np.argmax(p_final))
    if rec.p_sub is None:
        subs: list[set[str]] = [set() for _ in range(rec.length)]
    else:
        subs = [sub_tags_from_scores(rec.p_sub[i], ts) for i in range(rec.length)]
    return main, subs
