import math

import pytest

from conftest import make_passages
from passagesearch.analysis import tokenize
from passagesearch.errors import (
    MalformedWeightFile,
    MissingWeights,
    UnknownPassageId,
)
from passagesearch.index import build_index
from passagesearch.rerank import (
    RerankPipelineConfig,
    TermWeightTable,
    build_weight_table,
    load_weight_table,
    pipeline_search,
    rerank,
    save_weight_table,
)
from passagesearch.retrieval import bm25_score, search_bm25


def idf(n, df):
    return math.log(1.0 + (n - df + 0.5) / (df + 0.5))


class TestBuildWeightTable:
    def test_hand_derived_weights(self):
        idx = build_index(make_passages(["x x y", "y z"]))
        table = build_weight_table(idx)
        w = table.get("d1-1")
        assert w["x"] == pytest.approx(math.log(3) * idf(2, 1), abs=1e-12)
        assert w["y"] == pytest.approx(math.log(2) * idf(2, 2), abs=1e-12)

    def test_title_expansion_adds_min_weight(self):
        idx = build_index(make_passages(["x x y", "y z"]))
        table = build_weight_table(idx, doc_titles={"d1": "Pest snail study"})
        w = table.get("d1-1")
        floor = min(v for k, v in w.items() if k in ("x", "y"))
        for t in ("pest", "snail", "study"):
            assert w[t] == floor

    def test_no_expansion_when_title_tokens_present(self):
        idx = build_index(make_passages(["pest snail"]))
        table = build_weight_table(idx, doc_titles={"d1": "pest snail"})
        assert set(table.get("d1-1")) == {"pest", "snail"}

    def test_empty_title_pure_lexical(self):
        idx = build_index(make_passages(["x y"]))
        a = build_weight_table(idx)
        b = build_weight_table(idx, doc_titles={"d1": ""})
        assert a.weights == b.weights


class TestWeightFileIO:
    def test_round_trip_bit_exact(self, tmp_path, small_index):
        table = build_weight_table(small_index)
        path = tmp_path / "w.tsv"
        save_weight_table(table, path)
        loaded = load_weight_table(path, small_index)
        assert loaded.weights == table.weights

    def test_unknown_passage_id(self, tmp_path, small_index):
        path = tmp_path / "w.tsv"
        path.write_text("zzz-1\twheat\t1.0\n")
        with pytest.raises(UnknownPassageId):
            load_weight_table(path, small_index)

    def test_non_numeric_weight(self, tmp_path):
        path = tmp_path / "w.tsv"
        path.write_text("d1-1\twheat\tabc\n")
        with pytest.raises(MalformedWeightFile):
            load_weight_table(path)

    def test_wrong_field_count(self, tmp_path):
        path = tmp_path / "w.tsv"
        path.write_text("d1-1\twheat\n")
        with pytest.raises(MalformedWeightFile):
            load_weight_table(path)


class TestRerank:
    def test_no_matching_terms_falls_back_to_id_order(self):
        idx = build_index(make_passages(["x y", "y z", "x z"]))
        candidates = search_bm25("x", 10, idx)
        table = TermWeightTable(weights={p: {} for p in ["d1-1", "d1-2", "d1-3"]})
        out = rerank("qqq", candidates, table)
        assert out.passage_ids() == sorted(candidates.passage_ids())

    def test_single_candidate(self):
        idx = build_index(make_passages(["x y"]))
        candidates = search_bm25("x", 10, idx)
        table = TermWeightTable(weights={"d1-1": {"x": 2.0}})
        out = rerank("x", candidates, table)
        assert out.entries == [("d1-1", 1, 2.0)]

    def test_missing_weights_error(self):
        idx = build_index(make_passages(["x y"]))
        candidates = search_bm25("x", 10, idx)
        with pytest.raises(MissingWeights):
            rerank("x", candidates, TermWeightTable(weights={}))

    def test_bm25_contribution_table_reproduces_bm25_order(self, small_collection, small_index):
        # a table whose weights are the per-term BM25 contributions for
        # this query must reorder candidates exactly as BM25 did
        query = small_collection.topics[0].question
        candidates = search_bm25(query, 100, small_index)
        terms = set(tokenize(query))
        weights = {}
        for pid in candidates.passage_ids():
            ref = small_index.ref_of(pid)
            weights[pid] = {t: bm25_score([t], ref, small_index) for t in terms}
        table = TermWeightTable(weights=weights, model_tag="bm25copy")
        out = rerank(query, candidates, table)
        assert out.passage_ids() == candidates.passage_ids()

    def test_permutation_of_candidate_set(self, small_index):
        candidates = search_bm25("wheat soil", 50, small_index)
        table = build_weight_table(small_index)
        out = rerank("wheat soil", candidates, table)
        assert set(out.passage_ids()) == set(candidates.passage_ids())
        assert [r for _, r, _ in out.entries] == list(range(1, len(out.entries) + 1))

    def test_lookup_counter_bound(self, small_index):
        candidates = search_bm25("wheat soil yield", 50, small_index)
        table = build_weight_table(small_index)
        table.lookups = 0
        rerank("wheat soil yield", candidates, table)
        assert table.lookups <= 3 * len(candidates.entries)

    def test_run_tag_suffixed(self, small_index):
        candidates = search_bm25("wheat", 10, small_index)
        out = rerank("wheat", candidates, build_weight_table(small_index))
        assert out.run_tag.endswith("+rerank:builtin_lexical")

    def test_boost_monotonicity(self):
        idx = build_index(make_passages(["x y", "x z"]))
        candidates = search_bm25("x", 10, idx)
        low = TermWeightTable(weights={"d1-1": {"x": 1.0}, "d1-2": {"x": 2.0}})
        high = TermWeightTable(weights={"d1-1": {"x": 3.0}, "d1-2": {"x": 2.0}})
        assert rerank("x", candidates, low).passage_ids() == ["d1-2", "d1-1"]
        assert rerank("x", candidates, high).passage_ids() == ["d1-1", "d1-2"]


class TestPipelineSearch:
    def test_depth_one_is_noop_on_ordering(self, small_index):
        table = build_weight_table(small_index)
        cfg = RerankPipelineConfig(first_stage_depth=1, final_k=1)
        first = search_bm25("wheat", 1, small_index)
        out = pipeline_search("wheat", small_index, table, cfg)
        assert out.passage_ids() == first.passage_ids()

    def test_boosted_passage_reaches_rank_one(self, small_index):
        query = "wheat soil yield"
        first = search_bm25(query, 100, small_index)
        target = first.passage_ids()[-1]
        table = build_weight_table(small_index)
        table.weights[target] = {t: 1000.0 for t in tokenize(query)}
        out = pipeline_search(query, small_index, table, RerankPipelineConfig(first_stage_depth=100))
        assert out.passage_ids()[0] == target

    def test_final_k_truncation(self, small_index):
        table = build_weight_table(small_index)
        out = pipeline_search(
            "wheat soil", small_index, table,
            RerankPipelineConfig(first_stage_depth=1000, final_k=5),
        )
        assert len(out.entries) <= 5

    def test_invalid_config(self):
        with pytest.raises(ValueError):
            RerankPipelineConfig(first_stage_depth=3, final_k=5)
