"""Define a label taxonomy, then write and read an interchange corpus.

Run from the repository root:

    python demos/01_tagset_and_corpus.py
"""

import tempfile
from pathlib import Path

import numpy as np

from knnseq import (
    SentenceRecord,
    Corpus,
    ValidationError,
    format_tagset,
    parse_tagset,
    read_corpus,
    write_corpus,
)

# ── 1. A tagset: main entity types plus fine-grained subtypes ──────────────

TAGSET_TEXT = """\
tagset-v1
# toy taxonomy for the demos
main:
PERS
ORG
GPE
sub:
GOV
COM
"""

ts = parse_tagset(TAGSET_TEXT)
print(f"main types: {ts.main_types}")
print(f"sub types:  {ts.sub_types}")
print(f"main BIO label space: {ts.main_label_count} labels (O at index 0)")
print(f"sub BIO label space:  {ts.sub_label_count} labels (no O)")
print(f"content hash: {ts.hash_hex[:16]}…")

print("\nindex map, main space:")
for idx in range(ts.main_label_count):
    print(f"  {idx}: {ts.main_tag_of(idx)}")

# A full-size taxonomy with 21 main types and 31 subtypes lands on 43 and
# 62 output labels:
from knnseq.synth import make_tagset

full = make_tagset(21, 31)
print(f"\nfull-size spaces: {full.main_label_count} main labels, {full.sub_label_count} sub labels")

# ── 2. A corpus: tokens, gold tags, embeddings, base-model rows ────────────

rng = np.random.default_rng(0)
dim = 8


def dirichlet_rows(m):
    rows = rng.random((m, ts.main_label_count))
    return rows / rows.sum(axis=1, keepdims=True)


records = [
    SentenceRecord(
        id="s0",
        tokens=["maria", "joined", "acme", "labs"],
        gold_main=["B-PERS", "O", "B-ORG", "I-ORG"],
        gold_sub=[set(), set(), {"B-COM"}, {"I-COM"}],
        emb=rng.standard_normal((4, dim)).astype(np.float32),
        p_main=dirichlet_rows(4),
        p_sub=rng.random((4, ts.sub_label_count)),
    ),
    SentenceRecord(
        id="s1",
        tokens=["hello", "world"],
        gold_main=["O", "O"],
        emb=rng.standard_normal((2, dim)).astype(np.float32),
        p_main=dirichlet_rows(2),
    ),
]
corpus = Corpus(dim=dim, tagset_hash=ts.hash_hex, records=records)

workdir = Path(tempfile.mkdtemp(prefix="knnseq-demo-"))
corpus_path = workdir / "demo.jsonl"
tagset_path = workdir / "demo.tagset"
tagset_path.write_text(format_tagset(ts), encoding="utf-8")
write_corpus(corpus, corpus_path)
print(f"\nwrote {corpus_path} ({corpus_path.stat().st_size} bytes)")

loaded = read_corpus(corpus_path, ts)
print(f"read back {len(loaded.records)} records, dim={loaded.dim}")
print(f"embeddings round-trip bit-exactly: {np.array_equal(loaded.records[0].emb, records[0].emb)}")
print(f"p_main rows renormalized to unit mass: {loaded.records[0].p_main.sum(axis=1)}")

# ── 3. Validation is total: malformed input names the failing line ─────────

bad = corpus_path.read_text().replace('"B-PERS"', '"B-NOPE"')
bad_path = workdir / "bad.jsonl"
bad_path.write_text(bad, encoding="utf-8")
try:
    read_corpus(bad_path, ts)
except ValidationError as exc:
    print(f"\nrejected malformed corpus: {exc}")
