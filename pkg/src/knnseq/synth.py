"""Synthetic corpora for tests and demos.

Embeddings are drawn from per-label Gaussian clusters around random unit
centers, so retrieval has real signal to find. Base-model rows put 0.55 on
one label and 0.45 on a second, confusable one; on an optional corrupted
minority of tokens the two masses are swapped, which makes the baseline
argmax err exactly there and leaves room for retrieval to correct it.
"""

from __future__ import annotations

import numpy as np

from .corpus_io import Corpus, SentenceRecord
from .tagset import OUTSIDE_INDEX, Tagset

MAIN_TYPE_POOL = (
    "PERS", "ORG", "GPE", "LOC", "FAC", "DATE", "TIME", "MONEY", "PERCENT",
    "QUANTITY", "ORDINAL", "CARDINAL", "EVENT", "LAW", "LANGUAGE", "PRODUCT",
    "NORP", "OCC", "WEBSITE", "UNIT", "CURR",
)
SUB_TYPE_POOL = (
    "GOV", "COM", "EDU", "MED", "REL", "SCI", "SPO", "NONGOV", "AIRPORT",
    "BUILDING", "BRIDGE", "CITY", "STATE", "COUNTRY", "TOWN", "NEIGHBORHOOD",
    "CONTINENT", "CELESTIAL", "WATERBODY", "LAND", "REGION", "ROAD", "PLANT",
    "PARK", "MUSEUM", "STATION", "PORT", "CAMP", "SUBAREA", "ATTRACTION",
    "BOUNDARY",
)


def make_tagset(n_main: int = 4, n_sub: int = 3) -> Tagset:
    """Tagset drawn from the fixed name pools (n_main <= 21, n_sub <= 31)."""
    return Tagset(main_types=MAIN_TYPE_POOL[:n_main], sub_types=SUB_TYPE_POOL[:n_sub])


def label_centers(rng: np.random.Generator, label_count: int, dim: int) -> np.ndarray:
    """One random unit vector per BIO label; nearly orthogonal for dim >> 1."""
    centers = rng.standard_normal((label_count, dim))
    return centers / np.linalg.norm(centers, axis=1, keepdims=True)


def random_sentence(
    rng: np.random.Generator,
    ts: Tagset,
    length: int,
    p_begin: float = 0.35,
    max_span: int = 4,
    with_sub: bool = False,
) -> tuple[list[str], list[set[str]]]:
    """A BIO-valid gold tag sequence plus per-token sub tag sets."""
    main: list[str] = []
    subs: list[set[str]] = []
    i = 0
    while i < length:
        if rng.random() < p_begin:
            name = ts.main_types[int(rng.integers(len(ts.main_types)))]
            span = int(min(1 + rng.integers(max_span), length - i))
            ent_subs: list[str] = []
            if with_sub and ts.sub_types and rng.random() < 0.6:
                n = int(rng.integers(1, min(3, len(ts.sub_types)) + 1))
                picks = rng.choice(len(ts.sub_types), size=n, replace=False)
                ent_subs = [ts.sub_types[int(j)] for j in picks]
            for offset in range(span):
                main.append(("B" if offset == 0 else "I") + f"-{name}")
                prefix = "B" if offset == 0 else "I"
                subs.append({f"{prefix}-{s}" for s in ent_subs})
            i += span
        else:
            main.append("O")
            subs.append(set())
            i += 1
    return main, subs


def _confusion_row(label_count: int, gold: int, wrong: int, corrupted: bool) -> np.ndarray:
    row = np.zeros(label_count)
    hi, lo = (wrong, gold) if corrupted else (gold, wrong)
    row[hi] = 0.55
    row[lo] = 0.45
    return row / row.sum()


def clustered_corpus(
    ts: Tagset,
    rng: np.random.Generator,
    *,
    centers: np.ndarray,
    n_sentences: int,
    sentence_len: int,
    sigma: float = 0.05,
    corrupt_fraction: float = 0.0,
    with_sub: bool = False,
    id_prefix: str = "s",
) -> Corpus:
    """Corpus with cluster embeddings, gold tags, and confusion-style p_main rows."""
    label_count = ts.main_label_count
    dim = centers.shape[1]
    records = []
    for si in range(n_sentences):
        gold_main, gold_sub = random_sentence(rng, ts, sentence_len, with_sub=with_sub)
        m = len(gold_main)
        labels = np.array([ts.main_index_of(t) for t in gold_main])
        emb = centers[labels] + sigma * rng.standard_normal((m, dim))
        p_main = np.empty((m, label_count))
        for i, gold_label in enumerate(labels):
            wrong = int((gold_label + 1) % label_count)
            corrupted = rng.random() < corrupt_fraction
            p_main[i] = _confusion_row(label_count, int(gold_label), wrong, corrupted)
        p_sub = None
        if with_sub and ts.sub_label_count:
            p_sub = np.full((m, ts.sub_label_count), 0.1)
            for i, tags in enumerate(gold_sub):
                for tag in tags:
                    p_sub[i, ts.sub_index_of(tag)] = 0.9
        records.append(SentenceRecord(
            id=f"{id_prefix}{si:04d}",
            tokens=[f"w{si:04d}_{i}" for i in range(m)],
            gold_main=gold_main,
            gold_sub=gold_sub if with_sub else None,
            emb=emb.astype(np.float32),
            p_main=p_main,
            p_sub=p_sub,
        ))
    return Corpus(dim=dim, tagset_hash=ts.hash_hex, records=records)


def imbalance_fixture(
    ts: Tagset,
    rng: np.random.Generator,
    *,
    dim: int = 16,
    entity_per_label: int = 6,
    outside_count: int = 600,
    dev_sentences: int = 24,
    sentence_len: int = 10,
    sigma: float = 0.03,
) -> tuple[Corpus, Corpus]:
    """Train/dev pair with tiny entity clusters drowned in "O" entries.

    Small k retrieves a token's own tight entity cluster; large k pulls in
    the outside mass, whose sheer count outweighs the similarity advantage
    of the few correct neighbors.
    """
    label_count = ts.main_label_count
    centers = label_centers(rng, label_count, dim)
    records = []
    for label in range(1, label_count):
        m = entity_per_label
        emb = centers[label] + sigma * rng.standard_normal((m, dim))
        records.append(SentenceRecord(
            id=f"train_l{label}",
            tokens=[f"e{label}_{i}" for i in range(m)],
            gold_main=[ts.main_tag_of(label)] * m,
            emb=emb.astype(np.float32),
        ))
    emb = centers[OUTSIDE_INDEX] + sigma * rng.standard_normal((outside_count, dim))
    records.append(SentenceRecord(
        id="train_outside",
        tokens=[f"o{i}" for i in range(outside_count)],
        gold_main=["O"] * outside_count,
        emb=emb.astype(np.float32),
    ))
    train = Corpus(dim=dim, tagset_hash=ts.hash_hex, records=records)
    dev = clustered_corpus(
        ts, rng, centers=centers, n_sentences=dev_sentences,
        sentence_len=sentence_len, sigma=sigma, id_prefix="d",
    )
    return train, dev
