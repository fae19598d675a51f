"""Token-embedding datastore with exact top-k cosine retrieval.

The store keeps one (unit vector, main label) pair per training token, in
corpus order. Vectors are L2-normalized once at build time, so the cosine
similarity of a query against every entry reduces to a single matrix-vector
product against the normalized query. Search is an exact brute-force scan;
ties are broken by ascending entry index so results are reproducible across
runs and platforms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterator

import numpy as np

from .errors import ValidationError
from .tagset import OUTSIDE_INDEX, Tagset

if TYPE_CHECKING:
    from .corpus_io import Corpus

UNIT_NORM_ATOL = 1e-6


@dataclass(frozen=True)
class NeighborList:
    """Retrieved neighbors, sorted by similarity descending, ties by ascending index."""

    indices: np.ndarray  # (k,) int64 entry indices into the datastore
    scores: np.ndarray   # (k,) float64 cosine similarities
    labels: np.ndarray   # (k,) int64 main label indices

    @property
    def effective_k(self) -> int:
        return len(self.indices)

    def __len__(self) -> int:
        return len(self.indices)

    def prefix(self, j: int) -> "NeighborList":
        """First min(j, effective_k) neighbors; equals a search at k=j."""
        if j < 1:
            raise ValidationError(f"neighbor prefix length must be positive, got {j}")
        return NeighborList(self.indices[:j], self.scores[:j], self.labels[:j])

    def items(self) -> Iterator[tuple[int, float, int]]:
        for i in range(len(self.indices)):
            yield int(self.indices[i]), float(self.scores[i]), int(self.labels[i])


@dataclass(frozen=True)
class Datastore:
    """Immutable (unit embedding, main label) store; safe for concurrent queries."""

    dim: int
    main_label_count: int
    vectors: np.ndarray  # (n, dim) float32, rows L2-normalized
    labels: np.ndarray   # (n,) int64 main label indices
    tagset_hash: str     # hex sha256 of the tagset the labels index into
    sources: tuple[tuple[str, int], ...] | None = None  # (record id, token pos); not persisted

    def __len__(self) -> int:
        return int(self.labels.shape[0])

    def label_histogram(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.main_label_count)


def build_datastore(train: "Corpus", ts: Tagset, include_outside: bool = True) -> Datastore:
    """One entry per training token: L2-normalized embedding plus gold main label.

    Every record must carry both embeddings and gold main tags. A zero-norm
    embedding is rejected (it has no direction to index). With
    ``include_outside=False``, tokens whose gold label is "O" are skipped.
    """
    chunks: list[np.ndarray] = []
    labels: list[int] = []
    sources: list[tuple[str, int]] = []
    for rec in train.records:
        if rec.emb is None:
            raise ValidationError(f"record {rec.id}: missing emb, cannot build datastore")
        if rec.gold_main is None:
            raise ValidationError(f"record {rec.id}: missing gold_main, cannot build datastore")
        emb = np.asarray(rec.emb, dtype=np.float64)
        norms = np.linalg.norm(emb, axis=1)
        bad = np.flatnonzero(norms == 0.0)
        if bad.size:
            raise ValidationError(
                f"record {rec.id}: zero-norm embedding at token {int(bad[0])}"
            )
        unit = (emb / norms[:, None]).astype(np.float32)
        for pos, tag in enumerate(rec.gold_main):
            label = ts.main_index_of(tag)
            if not include_outside and label == OUTSIDE_INDEX:
                continue
            chunks.append(unit[pos])
            labels.append(label)
            sources.append((rec.id, pos))
    if not labels:
        raise ValidationError("datastore would be empty")
    return Datastore(
        dim=train.dim,
        main_label_count=ts.main_label_count,
        vectors=np.vstack(chunks),
        labels=np.asarray(labels, dtype=np.int64),
        tagset_hash=ts.hash_hex,
        sources=tuple(sources),
    )


def cosine_sim(a, b) -> float:
    """a.b / (|a||b|); both vectors must be nonzero."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValidationError(f"cosine_sim: shape mismatch {a.shape} vs {b.shape}")
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise ValidationError("cosine_sim: zero vector")
    return float(np.dot(a, b) / (na * nb))


def knn_search(ds: Datastore, query, k: int) -> NeighborList:
    """Exact top-min(k, |ds|) entries by cosine similarity.

    Similarity is the dot product of each stored unit vector with the
    normalized query. ``k`` larger than the store is clipped rather than
    rejected; ``effective_k`` on the result records what was returned.
    """
    if k < 1:
        raise ValidationError(f"k must be positive, got {k}")
    if len(ds) == 0:
        raise ValidationError("knn_search: empty datastore")
    q = np.asarray(query, dtype=np.float64).reshape(-1)
    if q.shape[0] != ds.dim:
        raise ValidationError(f"query dim {q.shape[0]} != datastore dim {ds.dim}")
    norm = np.linalg.norm(q)
    if norm == 0.0:
        raise ValidationError("knn_search: zero query vector")
    q = q / norm  # new array: never normalize the caller's buffer in place
    sims = ds.vectors @ q
    # Stable sort on -sims: descending similarity, exact ties keep ascending index.
    order = np.argsort(-sims, kind="stable")[: min(k, len(ds))]
    return NeighborList(
        indices=order.astype(np.int64),
        scores=sims[order],
        labels=ds.labels[order],
    )
