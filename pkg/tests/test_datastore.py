import numpy as np
import pytest

from knnseq import (
    Datastore,
    ValidationError,
    build_datastore,
    cosine_sim,
    knn_search,
)

from testutil import record_corpus, simple_record, tiny_datastore, unit_rows


def naive_topk(vectors, query, k):
    """Full-scan oracle: per-entry similarity, Python sort under (-sim, index)."""
    q = np.asarray(query, dtype=np.float64)
    q = q / np.linalg.norm(q)
    sims = (np.asarray(vectors, dtype=np.float64) * q).sum(axis=1)
    order = sorted(range(len(sims)), key=lambda i: (-sims[i], i))
    return order[: min(k, len(sims))], sims


def embedded_corpus(ts, rows_per_record, dim):
    rng = np.random.default_rng(3)
    recs = []
    for i, m in enumerate(rows_per_record):
        recs.append(simple_record(
            f"s{i}", [f"w{j}" for j in range(m)],
            gold_main=[ts.main_tag_of(int(rng.integers(ts.main_label_count))) for _ in range(m)],
            emb=rng.standard_normal((m, dim)).astype(np.float32),
        ))
    return record_corpus(ts, recs, dim)


class TestBuild:
    def test_entry_counting(self, ts4):
        corpus = embedded_corpus(ts4, [3, 2], dim=4)
        ds = build_datastore(corpus, ts4)
        assert len(ds) == 5
        assert ds.dim == 4
        assert ds.tagset_hash == ts4.hash_hex

    def test_vectors_l2_normalized(self, ts4):
        rec = simple_record("s0", ["a"], gold_main=["O"], emb=np.array([[3.0, 4.0]], dtype=np.float32))
        ds = build_datastore(record_corpus(ts4, [rec], 2), ts4)
        np.testing.assert_allclose(ds.vectors[0], [0.6, 0.8], atol=1e-7)
        norms = np.linalg.norm(ds.vectors.astype(np.float64), axis=1)
        np.testing.assert_allclose(norms, 1.0, atol=1e-6)

    def test_labels_are_gold_indices_in_corpus_order(self, ts4):
        first = ts4.main_types[0]
        rec = simple_record(
            "s0", ["a", "b", "c"],
            gold_main=[f"B-{first}", f"I-{first}", "O"],
            emb=np.eye(3, 4, dtype=np.float32) + 0.1,
        )
        ds = build_datastore(record_corpus(ts4, [rec], 4), ts4)
        assert ds.labels.tolist() == [1, 2, 0]
        assert ds.sources == (("s0", 0), ("s0", 1), ("s0", 2))

    def test_zero_norm_embedding_rejected(self, ts4):
        emb = np.ones((2, 3), dtype=np.float32)
        emb[1] = 0.0
        rec = simple_record("sz", ["a", "b"], gold_main=["O", "O"], emb=emb)
        with pytest.raises(ValidationError, match="sz.*zero-norm.*token 1"):
            build_datastore(record_corpus(ts4, [rec], 3), ts4)

    def test_missing_fields_rejected(self, ts4):
        no_emb = simple_record("s0", ["a"], gold_main=["O"])
        with pytest.raises(ValidationError, match="missing emb"):
            build_datastore(record_corpus(ts4, [no_emb], 3), ts4)
        no_gold = simple_record("s0", ["a"], emb=np.ones((1, 3), dtype=np.float32))
        with pytest.raises(ValidationError, match="missing gold_main"):
            build_datastore(record_corpus(ts4, [no_gold], 3), ts4)

    def test_exclude_outside_flag(self, ts4):
        first = ts4.main_types[0]
        rec = simple_record(
            "s0", ["a", "b", "c"],
            gold_main=["O", f"B-{first}", "O"],
            emb=np.ones((3, 2), dtype=np.float32),
        )
        corpus = record_corpus(ts4, [rec], 2)
        assert len(build_datastore(corpus, ts4)) == 3
        trimmed = build_datastore(corpus, ts4, include_outside=False)
        assert len(trimmed) == 1
        assert trimmed.labels.tolist() == [1]

    def test_all_outside_excluded_is_empty_error(self, ts4):
        rec = simple_record("s0", ["a"], gold_main=["O"], emb=np.ones((1, 2), dtype=np.float32))
        with pytest.raises(ValidationError, match="empty"):
            build_datastore(record_corpus(ts4, [rec], 2), ts4, include_outside=False)


class TestCosine:
    def test_identity(self):
        assert cosine_sim([1.0, 0.0, 0.0], [1.0, 0.0, 0.0]) == pytest.approx(1.0)

    def test_orthogonal(self):
        assert cosine_sim([1.0, 0.0], [0.0, 1.0]) == pytest.approx(0.0, abs=1e-12)

    def test_forty_five_degrees(self):
        assert cosine_sim([1.0, 1.0], [1.0, 0.0]) == pytest.approx(0.7071068, abs=1e-6)

    def test_zero_vector_rejected(self):
        with pytest.raises(ValidationError, match="zero vector"):
            cosine_sim([0.0, 0.0], [1.0, 0.0])

    def test_scale_invariance(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            a = rng.standard_normal(6)
            b = rng.standard_normal(6)
            assert cosine_sim(3.7 * a, 0.01 * b) == pytest.approx(cosine_sim(a, b), abs=1e-12)
            assert -1.0 - 1e-9 <= cosine_sim(a, b) <= 1.0 + 1e-9


class TestSearch:
    def test_spec_store_query(self, ts4):
        ds = tiny_datastore(ts4, [[1.0, 0.0], [0.0, 1.0], [0.9, 0.1]], [0, 1, 2])
        np.testing.assert_allclose(ds.vectors[2], [0.9939, 0.1104], atol=1e-4)
        nbrs = knn_search(ds, [1.0, 0.0], k=2)
        assert nbrs.indices.tolist() == [0, 2]
        assert nbrs.effective_k == 2

    def test_exact_match_scores_one(self, ts4):
        ds = tiny_datastore(ts4, [[1.0, 0.0], [0.0, 1.0]], [0, 1])
        nbrs = knn_search(ds, [1.0, 0.0], k=1)
        assert nbrs.indices.tolist() == [0]
        assert nbrs.scores[0] == pytest.approx(1.0, abs=1e-6)
        assert nbrs.labels.tolist() == [0]

    def test_tie_breaks_to_lower_index(self, ts4):
        ds = tiny_datastore(ts4, [[0.0, 1.0], [0.6, 0.8], [0.6, 0.8]], [0, 1, 2])
        nbrs = knn_search(ds, [0.6, 0.8], k=1)
        assert nbrs.indices.tolist() == [1]
        full = knn_search(ds, [0.6, 0.8], k=3)
        assert full.indices.tolist() == [1, 2, 0]

    def test_query_buffer_not_mutated(self, ts4):
        ds = tiny_datastore(ts4, [[1.0, 0.0], [0.0, 1.0]], [0, 1])
        query = np.array([3.0, 4.0])
        knn_search(ds, query, 1)
        assert query.tolist() == [3.0, 4.0]

    def test_k_clipped_to_store_size(self, ts4):
        ds = tiny_datastore(ts4, [[1.0, 0.0], [0.0, 1.0]], [0, 1])
        nbrs = knn_search(ds, [1.0, 1.0], k=512)
        assert nbrs.effective_k == 2

    def test_errors(self, ts4):
        ds = tiny_datastore(ts4, [[1.0, 0.0]], [0])
        with pytest.raises(ValidationError, match="zero query"):
            knn_search(ds, [0.0, 0.0], k=1)
        with pytest.raises(ValidationError, match="k must be positive"):
            knn_search(ds, [1.0, 0.0], k=0)
        with pytest.raises(ValidationError, match="query dim"):
            knn_search(ds, [1.0, 0.0, 0.0], k=1)
        empty = Datastore(
            dim=2, main_label_count=ts4.main_label_count,
            vectors=np.empty((0, 2), dtype=np.float32),
            labels=np.empty((0,), dtype=np.int64), tagset_hash=ts4.hash_hex,
        )
        with pytest.raises(ValidationError, match="empty datastore"):
            knn_search(empty, [1.0, 0.0], k=1)

    def test_oracle_equivalence_sampled(self, ts4):
        rng = np.random.default_rng(20)
        for _ in range(20):
            n = int(rng.integers(1, 600))
            dim = int(rng.choice([4, 16]))
            vectors = unit_rows(rng.standard_normal((n, dim)))
            ds = Datastore(
                dim=dim, main_label_count=ts4.main_label_count, vectors=vectors,
                labels=rng.integers(0, ts4.main_label_count, n).astype(np.int64),
                tagset_hash=ts4.hash_hex,
            )
            for _ in range(3):
                query = rng.standard_normal(dim)
                expected_order, sims = naive_topk(vectors, query, 10 ** 9)
                for k in (1, 8, 512):
                    nbrs = knn_search(ds, query, k)
                    assert nbrs.indices.tolist() == expected_order[: min(k, n)]
                    np.testing.assert_allclose(nbrs.scores, sims[nbrs.indices], atol=1e-12)

    def test_prefix_property(self, ts4):
        rng = np.random.default_rng(21)
        vectors = unit_rows(rng.standard_normal((300, 8)))
        ds = Datastore(
            dim=8, main_label_count=ts4.main_label_count, vectors=vectors,
            labels=rng.integers(0, ts4.main_label_count, 300).astype(np.int64),
            tagset_hash=ts4.hash_hex,
        )
        query = rng.standard_normal(8)
        big = knn_search(ds, query, 128)
        for j in (1, 2, 7, 64, 128):
            small = knn_search(ds, query, j)
            assert np.array_equal(small.indices, big.indices[:j])
            assert np.array_equal(small.scores, big.scores[:j])
            pref = big.prefix(j)
            assert np.array_equal(pref.indices, small.indices)
            assert np.array_equal(pref.labels, small.labels)

    def test_similarity_bounds(self, ts4):
        rng = np.random.default_rng(22)
        vectors = unit_rows(rng.standard_normal((500, 16)))
        ds = Datastore(
            dim=16, main_label_count=ts4.main_label_count, vectors=vectors,
            labels=np.zeros(500, dtype=np.int64), tagset_hash=ts4.hash_hex,
        )
        for _ in range(10):
            nbrs = knn_search(ds, rng.standard_normal(16), 500)
            assert (nbrs.scores >= -1.0 - 1e-6).all()
            assert (nbrs.scores <= 1.0 + 1e-6).all()
            # sorted under the stated total order
            assert (np.diff(nbrs.scores) <= 0).all()
