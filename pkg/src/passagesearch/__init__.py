"""Passage search toolkit: ingest, index, retrieve, rerank, pool,
evaluate and serve three-sentence passages from scientific documents."""

__version__ = "0.1.0"

from .analysis import tokenize
from .index import Index, build_index, load_index, save_index
from .ingest import Document, Passage, ingest_corpus, make_passages, split_sentences
from .retrieval import BM25Params, RM3Params, RankedList, search_bm25, search_bm25_rm3
from .rerank import RerankPipelineConfig, TermWeightTable, pipeline_search, rerank

__all__ = [
    "BM25Params",
    "Document",
    "Index",
    "Passage",
    "RM3Params",
    "RankedList",
    "RerankPipelineConfig",
    "TermWeightTable",
    "build_index",
    "ingest_corpus",
    "load_index",
    "make_passages",
    "pipeline_search",
    "rerank",
    "save_index",
    "search_bm25",
    "search_bm25_rm3",
    "split_sentences",
    "tokenize",
]
