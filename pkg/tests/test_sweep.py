import numpy as np
import pytest

from knnseq import (
    KnnConfig,
    SweepGrid,
    ValidationError,
    build_datastore,
    decode_entities,
    format_sweep_csv,
    gold_entities,
    micro_prf,
    predict_tokens,
    run_sweep,
)
from knnseq.synth import clustered_corpus, label_centers, make_tagset


@pytest.fixture(scope="module")
def fixture_pair():
    ts = make_tagset(3, 2)
    rng = np.random.default_rng(70)
    centers = label_centers(rng, ts.main_label_count, 12)
    train = clustered_corpus(
        ts, rng, centers=centers, n_sentences=30, sentence_len=8,
        sigma=0.08, id_prefix="t",
    )
    dev = clustered_corpus(
        ts, rng, centers=centers, n_sentences=12, sentence_len=8,
        sigma=0.08, corrupt_fraction=0.3, with_sub=True, id_prefix="d",
    )
    ds = build_datastore(train, ts)
    return ts, ds, dev


def baseline_report(ts, dev):
    gold, pred = {}, {}
    for rec in dev.records:
        gold[rec.id] = gold_entities(rec, ts)
        main = np.argmax(rec.p_main, axis=1)
        subs = [
            {ts.sub_tag_of(int(j)) for j in np.flatnonzero(rec.p_sub[i] > 0.5)}
            if rec.p_sub is not None else set()
            for i in range(rec.length)
        ]
        pred[rec.id] = decode_entities(main, subs, ts)
    return micro_prf(gold, pred, ts)


class TestGrid:
    def test_defaults(self):
        grid = SweepGrid()
        assert grid.ks == (8, 16, 32, 64, 128, 256, 512)
        assert grid.lambdas == tuple(i / 10 for i in range(11))
        assert grid.tau == 1.0

    @pytest.mark.parametrize("kwargs", [
        {"ks": ()}, {"lambdas": ()}, {"ks": (0,)}, {"ks": (8, 8)},
        {"lambdas": (0.5, 0.5)}, {"lambdas": (1.5,)}, {"tau": 0.0},
    ])
    def test_validation(self, kwargs):
        with pytest.raises(ValidationError):
            SweepGrid(**kwargs)


class TestRunSweep:
    def test_default_grid_row_count(self, fixture_pair):
        ts, ds, dev = fixture_pair
        result = run_sweep(dev, ds, SweepGrid(), ts)
        assert len(result.rows) == 77
        assert result.best in result.rows

    def test_rows_sorted_lexicographically(self, fixture_pair):
        ts, ds, dev = fixture_pair
        result = run_sweep(dev, ds, SweepGrid(ks=(32, 8, 16), lambdas=(1.0, 0.0)), ts)
        keys = [(r.k, r.lam) for r in result.rows]
        assert keys == sorted(keys)

    def test_lambda_one_column_constant_across_k(self, fixture_pair):
        ts, ds, dev = fixture_pair
        result = run_sweep(dev, ds, SweepGrid(), ts)
        column = [r for r in result.rows if r.lam == 1.0]
        assert len(column) == 7
        first = column[0]
        for row in column[1:]:
            assert (row.precision, row.recall, row.f1) == (first.precision, first.recall, first.f1)

    def test_single_cell_lambda_one_equals_baseline(self, fixture_pair):
        ts, ds, dev = fixture_pair
        result = run_sweep(dev, ds, SweepGrid(ks=(8,), lambdas=(1.0,)), ts)
        (row,) = result.rows
        expected = baseline_report(ts, dev)
        assert (row.precision, row.recall, row.f1) == (
            expected.precision, expected.recall, expected.f1,
        )

    def test_retrieve_once_matches_independent_per_k(self, fixture_pair):
        ts, ds, dev = fixture_pair
        grid = SweepGrid(ks=(4, 16, 64), lambdas=(0.0, 0.3, 1.0))
        result = run_sweep(dev, ds, grid, ts)
        gold = {rec.id: gold_entities(rec, ts) for rec in dev.records}
        for row in result.rows:
            pred = {}
            for rec in dev.records:
                main, subs = predict_tokens(rec, ds, KnnConfig(k=row.k, lam=row.lam), ts)
                pred[rec.id] = decode_entities(main, subs, ts)
            report = micro_prf(gold, pred, ts)
            # bit-for-bit: the prefix optimization must not change a single float
            assert (row.precision, row.recall, row.f1) == (
                report.precision, report.recall, report.f1,
            )

    def test_deterministic_output(self, fixture_pair):
        ts, ds, dev = fixture_pair
        grid = SweepGrid(ks=(8, 32), lambdas=(0.0, 0.5, 1.0))
        a = format_sweep_csv(run_sweep(dev, ds, grid, ts))
        b = format_sweep_csv(run_sweep(dev, ds, grid, ts))
        assert a == b

    def test_best_tie_breaking(self, fixture_pair):
        ts, ds, dev = fixture_pair
        # lambda=1 rows are identical across k: ties must resolve to the
        # smallest k, then the largest lambda.
        result = run_sweep(dev, ds, SweepGrid(ks=(8, 64), lambdas=(1.0, 0.99)), ts)
        by_cell = {(r.k, r.lam): r for r in result.rows}
        top = max(r.f1 for r in result.rows)
        tied = [r for r in result.rows if r.f1 == top]
        if len(tied) > 1:
            ks = {r.k for r in tied}
            assert result.best.k == min(ks)
            lams = {r.lam for r in tied if r.k == result.best.k}
            assert result.best.lam == max(lams)
        assert by_cell[(result.best.k, result.best.lam)] == result.best

    def test_missing_fields_rejected(self, fixture_pair, ts4):
        ts, ds, dev = fixture_pair
        import copy

        broken = copy.deepcopy(dev)
        broken.records[0].emb = None
        with pytest.raises(ValidationError, match="requires emb and p_main"):
            run_sweep(broken, ds, SweepGrid(ks=(4,), lambdas=(0.5,)), ts)


class TestCsv:
    def test_shape(self, fixture_pair):
        ts, ds, dev = fixture_pair
        result = run_sweep(dev, ds, SweepGrid(ks=(4, 8), lambdas=(0.0, 1.0)), ts)
        text = format_sweep_csv(result)
        lines = text.strip().split("\n")
        assert lines[0] == "k,lambda,precision,recall,f1"
        assert len(lines) == 1 + 4 + 1
        assert lines[-1].startswith("# best: ")
        for line in lines[1:-1]:
            k, lam, p, r, f1 = line.split(",")
            assert int(k) in (4, 8)
            assert 0.0 <= float(lam) <= 1.0
            for v in (p, r, f1):
                assert 0.0 <= float(v) <= 1.0
