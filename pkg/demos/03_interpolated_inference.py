"""Interpolate base-model rows with neighbor-derived distributions, then decode.

Run from the repository root:

    python demos/03_interpolated_inference.py
"""

import numpy as np

from knnseq import (
    KnnConfig,
    build_datastore,
    decode_entities,
    interpolate,
    knn_distribution,
    knn_search,
    predict_tokens,
)
from knnseq.synth import clustered_corpus, label_centers, make_tagset

rng = np.random.default_rng(21)
ts = make_tagset(3, 2)
dim = 12

centers = label_centers(rng, ts.main_label_count, dim)
train = clustered_corpus(ts, rng, centers=centers, n_sentences=50, sentence_len=8)
ds = build_datastore(train, ts)

# A noisy evaluation corpus: 30% of tokens carry a wrong argmax in p_main.
dev = clustered_corpus(
    ts, rng, centers=centers, n_sentences=10, sentence_len=8,
    corrupt_fraction=0.3, with_sub=True, id_prefix="d",
)

# ── 1. The neighbor distribution: exp(sim/tau) mass per label ──────────────

rec = dev.records[0]
nbrs = knn_search(ds, rec.emb[0], k=8)
p_knn = knn_distribution(nbrs, tau=1.0, label_count=ts.main_label_count)
print("token 0, top-8 neighbor labels:", [ts.main_tag_of(v) for v in nbrs.labels])
print("p_knn mass:", {ts.main_tag_of(i): round(float(p), 4) for i, p in enumerate(p_knn) if p > 0})
print("labels with no retrieved neighbor hold exactly zero mass:",
      all(p == 0.0 for i, p in enumerate(p_knn) if i not in set(nbrs.labels.tolist())))

# ── 2. Interpolation and its boundary behavior ──────────────────────────────

p_main = rec.p_main[0]
for lam in (1.0, 0.5, 0.0):
    p_final = interpolate(p_main, p_knn, lam)
    top = int(np.argmax(p_final))
    print(f"lambda={lam:>3}: argmax -> {ts.main_tag_of(top):<10} (mass {p_final[top]:.4f})")
assert np.array_equal(interpolate(p_main, p_knn, 1.0), p_main)
assert np.array_equal(interpolate(p_main, p_knn, 0.0), p_knn)
print("lambda=1 returns the base row unchanged; lambda=0 returns the neighbor row")

# ── 3. Per-token prediction and entity decoding ─────────────────────────────

gold_tags = rec.gold_main
for lam in (1.0, 0.5):
    main, subs = predict_tokens(rec, ds, KnnConfig(k=8, lam=lam), ts)
    predicted = [ts.main_tag_of(int(v)) for v in main]
    wrong = sum(p != g for p, g in zip(predicted, gold_tags))
    print(f"\nlambda={lam}: {wrong}/{rec.length} token labels differ from gold")
    for ent in decode_entities(main, subs, ts):
        tokens = " ".join(rec.tokens[ent.s:ent.e + 1])
        print(f"  ({ent.s}, {ent.e}, {ent.main}, {sorted(ent.subs)})  <- {tokens!r}")

# ── 4. Decoding is total, even for sequences no annotator would write ───────

stray = [ts.main_index_of(f"I-{ts.main_types[0]}"), 0, ts.main_index_of(f"I-{ts.main_types[1]}")]
print("\nstray I- tags start entities instead of failing:")
print(" ", decode_entities(stray, None, ts))
