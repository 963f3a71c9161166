"""First-stage ranking: BM25 and BM25+RM3 pseudo-relevance feedback.

BM25 variant: Lucene-style IDF ln(1 + (N - df + 0.5) / (df + 0.5)) with
defaults k1=0.9, b=0.4. Ties are always broken by ascending passage_id
so runs are byte-reproducible.
"""

import math
from dataclasses import dataclass, field

from .analysis import tokenize
from .errors import EmptyFeedbackSet, EmptyQueryAfterAnalysis
from .index import Index


@dataclass(frozen=True)
class BM25Params:
    k1: float = 0.9
    b: float = 0.4

    def __post_init__(self):
        if self.k1 <= 0:
            raise ValueError("k1 must be > 0")
        if not 0.0 <= self.b <= 1.0:
            raise ValueError("b must be in [0, 1]")


@dataclass(frozen=True)
class RM3Params:
    fb_docs: int = 10
    fb_terms: int = 10
    orig_weight: float = 0.5  # lambda: weight of the original query model

    def __post_init__(self):
        if self.fb_docs < 1 or self.fb_terms < 1:
            raise ValueError("fb_docs and fb_terms must be >= 1")
        if not 0.0 <= self.orig_weight <= 1.0:
            raise ValueError("orig_weight must be in [0, 1]")


@dataclass(frozen=True)
class WeightedQuery:
    terms: dict[str, float]


@dataclass
class RankedList:
    topic_id: str
    entries: list[tuple[str, int, float]] = field(default_factory=list)  # (passage_id, rank, score)
    run_tag: str = "run"

    def passage_ids(self) -> list[str]:
        return [pid for pid, _, _ in self.entries]


def idf(index: Index, term: str) -> float:
    df = index.df(term)
    return math.log(1.0 + (index.n_passages - df + 0.5) / (df + 0.5))


def bm25_term_score(index: Index, tf: int, length: int, df: int, params: BM25Params) -> float:
    n = index.n_passages
    term_idf = math.log(1.0 + (n - df + 0.5) / (df + 0.5))
    denom = tf + params.k1 * (1.0 - params.b + params.b * length / index.avg_length)
    return term_idf * tf * (params.k1 + 1.0) / denom


def bm25_score(
    query_terms: list[str],
    passage_ref: int,
    index: Index,
    params: BM25Params = BM25Params(),
) -> float:
    """Score one passage against analyzed query terms. Duplicate query
    terms contribute once per occurrence."""
    length = index.length_of(passage_ref)
    score = 0.0
    for term in query_terms:
        entries = index.postings.get(term)
        if not entries:
            continue
        tf = 0
        for ref, f in entries:
            if ref == passage_ref:
                tf = f
                break
        if tf == 0:
            continue
        score += bm25_term_score(index, tf, length, len(entries), params)
    return score


def _rank_and_trim(scores: dict[int, float], k: int, index: Index, topic_id: str, run_tag: str) -> RankedList:
    ordered = sorted(
        scores.items(), key=lambda item: (-item[1], index.passage_id_of(item[0]))
    )[:k]
    entries = [
        (index.passage_id_of(ref), rank, score)
        for rank, (ref, score) in enumerate(ordered, start=1)
    ]
    return RankedList(topic_id=topic_id, entries=entries, run_tag=run_tag)


def search_bm25(
    query: str,
    k: int,
    index: Index,
    params: BM25Params = BM25Params(),
    topic_id: str = "q",
    run_tag: str = "bm25",
) -> RankedList:
    """Top-k passages by BM25, accumulated over postings lists."""
    if k < 1:
        raise ValueError("k must be >= 1")
    terms = tokenize(query)
    if not terms:
        raise EmptyQueryAfterAnalysis(query)
    scores: dict[int, float] = {}
    for term in terms:
        entries = index.postings.get(term)
        if not entries:
            continue
        df = len(entries)
        for ref, tf in entries:
            scores[ref] = scores.get(ref, 0.0) + bm25_term_score(
                index, tf, index.doc_lengths[ref], df, params
            )
    return _rank_and_trim(scores, k, index, topic_id, run_tag)


def _softmax(xs: list[float]) -> list[float]:
    m = max(xs)
    exps = [math.exp(x - m) for x in xs]
    z = sum(exps)
    return [e / z for e in exps]


def _mle(tokens: list[str]) -> dict[str, float]:
    counts: dict[str, float] = {}
    for t in tokens:
        counts[t] = counts.get(t, 0.0) + 1.0
    n = len(tokens)
    return {t: c / n for t, c in counts.items()}


def rm3_expand(
    query: str,
    first_pass: RankedList,
    index: Index,
    rm3: RM3Params = RM3Params(),
) -> WeightedQuery:
    """Build the interpolated RM3 query model.

    The relevance model mixes the feedback passages' maximum-likelihood
    term distributions, weighted by a softmax over their first-pass
    scores, truncated to fb_terms terms and renormalized; the final
    model interpolates it with the original query's MLE distribution.
    """
    if not first_pass.entries:
        raise EmptyFeedbackSet(first_pass.topic_id)
    query_tokens = tokenize(query)
    if not query_tokens:
        raise EmptyQueryAfterAnalysis(query)
    feedback = first_pass.entries[: rm3.fb_docs]
    doc_weights = _softmax([score for _, _, score in feedback])
    relevance: dict[str, float] = {}
    for (pid, _, _), w in zip(feedback, doc_weights):
        tokens = tokenize(index.texts[index.ref_of(pid)])
        if not tokens:
            continue
        for term, p in _mle(tokens).items():
            relevance[term] = relevance.get(term, 0.0) + w * p
    # keep the fb_terms most probable terms; term-ascending tie-break
    top = sorted(relevance.items(), key=lambda kv: (-kv[1], kv[0]))[: rm3.fb_terms]
    z = sum(p for _, p in top)
    relevance = {t: p / z for t, p in top} if z > 0 else {}

    lam = rm3.orig_weight
    final: dict[str, float] = {}
    for term, p in _mle(query_tokens).items():
        final[term] = lam * p
    for term, p in relevance.items():
        final[term] = final.get(term, 0.0) + (1.0 - lam) * p
    z = sum(final.values())
    return WeightedQuery({t: w / z for t, w in final.items()})


def search_weighted(
    wq: WeightedQuery,
    k: int,
    index: Index,
    params: BM25Params = BM25Params(),
    topic_id: str = "q",
    run_tag: str = "weighted",
) -> RankedList:
    """Score all passages by the weight-mixed sum of single-term BM25
    scores."""
    scores: dict[int, float] = {}
    for term, weight in wq.terms.items():
        entries = index.postings.get(term)
        if not entries or weight == 0.0:
            continue
        df = len(entries)
        for ref, tf in entries:
            scores[ref] = scores.get(ref, 0.0) + weight * bm25_term_score(
                index, tf, index.doc_lengths[ref], df, params
            )
    return _rank_and_trim(scores, k, index, topic_id, run_tag)


def search_bm25_rm3(
    query: str,
    k: int,
    index: Index,
    bm25: BM25Params = BM25Params(),
    rm3: RM3Params = RM3Params(),
    topic_id: str = "q",
    run_tag: str = "bm25rm3",
) -> RankedList:
    """BM25 first pass, RM3 expansion, weighted rescoring, top-k."""
    first = search_bm25(
        query, max(k, rm3.fb_docs), index, bm25, topic_id=topic_id, run_tag=run_tag
    )
    if not first.entries:
        return RankedList(topic_id=topic_id, entries=[], run_tag=run_tag)
    wq = rm3_expand(query, first, index, rm3)
    return search_weighted(wq, k, index, bm25, topic_id=topic_id, run_tag=run_tag)
