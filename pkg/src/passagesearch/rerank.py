"""Second-stage reranking via precomputed per-passage term weights.

All heavy work happens at index time (build_weight_table); query-time
scoring is a sparse lookup-and-sum over the query's analyzed terms, so
reranking stays cheap enough for an interactive service.
"""

import math
import time
from dataclasses import dataclass, field

from .analysis import tokenize
from .errors import (
    EmptyQueryAfterAnalysis,
    MalformedWeightFile,
    MissingWeights,
    UnknownPassageId,
)
from .index import Index
from .retrieval import BM25Params, RankedList, search_bm25


@dataclass
class TermWeightTable:
    """Sparse term -> weight map per passage. May contain expansion
    terms that never occur in the passage text."""

    weights: dict[str, dict[str, float]] = field(default_factory=dict)
    model_tag: str = "builtin_lexical"
    built_at: float = field(default_factory=time.time)
    lookups: int = 0  # instrumentation: sparse map probes during rerank

    def get(self, passage_id: str) -> dict[str, float] | None:
        return self.weights.get(passage_id)


@dataclass(frozen=True)
class RerankPipelineConfig:
    first_stage_depth: int = 1000
    final_k: int = 5
    weight_model: str = "builtin_lexical"  # or "external_file"

    def __post_init__(self):
        if self.final_k > self.first_stage_depth:
            raise ValueError("final_k must be <= first_stage_depth")


def build_weight_table(
    index: Index,
    doc_titles: dict[str, str] | None = None,
    model_tag: str = "builtin_lexical",
) -> TermWeightTable:
    """Built-in lexical weight model.

    weight(t) = ln(1 + tf) * ln(1 + (N - df + 0.5) / (df + 0.5)), plus
    title-token expansion: non-stopword tokens of the parent document's
    title absent from the passage get the passage's minimum positive
    weight.
    """
    doc_titles = doc_titles or {}
    n = index.n_passages
    table = TermWeightTable(model_tag=model_tag)
    title_tokens_cache: dict[str, list[str]] = {}
    for ref, pid in enumerate(index.passage_ids):
        counts: dict[str, int] = {}
        for t in tokenize(index.texts[ref]):
            counts[t] = counts.get(t, 0) + 1
        weights = {}
        for term, tf in counts.items():
            df = index.df(term)
            weights[term] = math.log(1 + tf) * math.log(
                1.0 + (n - df + 0.5) / (df + 0.5)
            )
        doc_id = index.doc_ids[ref]
        title = doc_titles.get(doc_id, "")
        if title:
            if doc_id not in title_tokens_cache:
                title_tokens_cache[doc_id] = tokenize(title)
            positive = [w for w in weights.values() if w > 0]
            if positive:
                floor = min(positive)
                for t in title_tokens_cache[doc_id]:
                    if t not in weights:
                        weights[t] = floor
        table.weights[pid] = weights
    return table


def save_weight_table(table: TermWeightTable, path) -> None:
    """Line format: passage_id TAB term TAB weight (decimal text)."""
    with open(path, "w", encoding="utf-8") as f:
        for pid in table.weights:
            for term, w in table.weights[pid].items():
                f.write(f"{pid}\t{term}\t{w!r}\n")


def load_weight_table(path, index: Index | None = None, model_tag: str = "external_file") -> TermWeightTable:
    """Load a TSV weight file, validating ids against the index when
    one is given."""
    table = TermWeightTable(model_tag=model_tag)
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise MalformedWeightFile(f"line {line_no}: expected 3 fields")
            pid, term, w_s = parts
            try:
                w = float(w_s)
            except ValueError:
                raise MalformedWeightFile(
                    f"line {line_no}: non-numeric weight {w_s!r}"
                ) from None
            if not math.isfinite(w):
                raise MalformedWeightFile(f"line {line_no}: non-finite weight")
            if index is not None and pid not in index._ref_by_id:
                raise UnknownPassageId(pid)
            table.weights.setdefault(pid, {})[term] = w
    return table


def rerank(query: str, candidates: RankedList, table: TermWeightTable) -> RankedList:
    """Re-sort candidates by the sparse weight sum of the query terms.

    score(q, p) = sum over analyzed query terms t of table[p].get(t, 0).
    Descending score, ties by ascending passage_id.
    """
    terms = tokenize(query)
    if not terms:
        raise EmptyQueryAfterAnalysis(query)
    scored = []
    for pid, _, _ in candidates.entries:
        weights = table.get(pid)
        if weights is None:
            raise MissingWeights(pid)
        score = 0.0
        for t in terms:
            score += weights.get(t, 0.0)
            table.lookups += 1
        scored.append((pid, score))
    scored.sort(key=lambda item: (-item[1], item[0]))
    entries = [(pid, rank, score) for rank, (pid, score) in enumerate(scored, start=1)]
    return RankedList(
        topic_id=candidates.topic_id,
        entries=entries,
        run_tag=f"{candidates.run_tag}+rerank:{table.model_tag}",
    )


def pipeline_search(
    query: str,
    index: Index,
    table: TermWeightTable,
    cfg: RerankPipelineConfig = RerankPipelineConfig(),
    bm25: BM25Params = BM25Params(),
    topic_id: str = "q",
) -> RankedList:
    """BM25 at first_stage_depth, rerank, truncate to final_k."""
    first = search_bm25(
        query, cfg.first_stage_depth, index, bm25, topic_id=topic_id
    )
    if not first.entries:
        return RankedList(topic_id=topic_id, entries=[], run_tag="bm25+rerank")
    reranked = rerank(query, first, table)
    reranked.entries = reranked.entries[: cfg.final_k]
    return reranked
