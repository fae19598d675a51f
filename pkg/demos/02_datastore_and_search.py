"""Build the (embedding, label) datastore and run exact top-k cosine search.

Run from the repository root:

    python demos/02_datastore_and_search.py
"""

import tempfile
from pathlib import Path

import numpy as np

from knnseq import (
    build_datastore,
    cosine_sim,
    knn_search,
    read_datastore,
    write_datastore,
)
from knnseq.synth import clustered_corpus, label_centers, make_tagset

rng = np.random.default_rng(7)
ts = make_tagset(4, 0)
dim = 12

# ── 1. One entry per training token, L2-normalized, gold main label ────────

centers = label_centers(rng, ts.main_label_count, dim)
train = clustered_corpus(ts, rng, centers=centers, n_sentences=40, sentence_len=8)
ds = build_datastore(train, ts)
print(f"datastore: {len(ds)} entries, dim={ds.dim}")
hist = ds.label_histogram()
for idx, count in enumerate(hist):
    if count:
        print(f"  {ts.main_tag_of(idx):<10} {int(count)}")
norms = np.linalg.norm(ds.vectors.astype(np.float64), axis=1)
print(f"all vectors unit-norm: {bool(np.all(np.abs(norms - 1) < 1e-6))}")

# ── 2. Cosine similarity reduces to a dot product against unit vectors ─────

print(f"\ncos([1,1], [1,0]) = {cosine_sim([1.0, 1.0], [1.0, 0.0]):.7f}")

query = centers[1] + 0.05 * rng.standard_normal(dim)  # near the B-cluster of type 1
nbrs = knn_search(ds, query, k=5)
print("\ntop-5 neighbors of a query near one cluster:")
for entry_index, score, label in nbrs.items():
    source = ds.sources[entry_index]
    print(f"  entry {entry_index:>4}  sim={score:+.4f}  label={ts.main_tag_of(label):<10} from {source}")

# ── 3. Determinism: ties break toward the lower entry index ────────────────

print(f"\nk larger than the store clips: effective_k={knn_search(ds, query, k=10_000).effective_k}")
big = knn_search(ds, query, k=len(ds))
assert np.all(np.diff(big.scores) <= 0)
print("scores sorted descending; equal scores keep insertion order")

# ── 4. The binary serialization round-trips bit-exactly ─────────────────────

workdir = Path(tempfile.mkdtemp(prefix="knnseq-demo-"))
path = workdir / "train.knnd"
write_datastore(ds, path)
again = read_datastore(path, ts)
print(f"\nwrote {path} ({path.stat().st_size} bytes)")
print(f"vectors identical after round trip: {np.array_equal(again.vectors, ds.vectors)}")
print(f"labels identical after round trip:  {np.array_equal(again.labels, ds.labels)}")

twice = workdir / "again.knnd"
write_datastore(again, twice)
print(f"serialization deterministic: {path.read_bytes() == twice.read_bytes()}")
