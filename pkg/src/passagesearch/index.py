"""Immutable inverted index over passages with the statistics BM25 needs."""

import json
import os
from dataclasses import dataclass, field
from typing import Iterable

from .analysis import tokenize
from .errors import DuplicatePassageId, FormatVersionMismatch, UnknownPassageRef
from .ingest import Passage

FORMAT_MAGIC = "psidx"
FORMAT_VERSION = 1


@dataclass
class Index:
    """Inverted index; treat as immutable once built.

    postings maps term -> list of (passage_ref, tf), sorted by ref.
    passage_ref is a dense integer assigned in ingest order; id_map
    translates back to external passage_ids.
    """

    postings: dict[str, list[tuple[int, int]]] = field(default_factory=dict)
    doc_lengths: list[int] = field(default_factory=list)
    passage_ids: list[str] = field(default_factory=list)
    texts: list[str] = field(default_factory=list)
    doc_ids: list[str] = field(default_factory=list)
    _ref_by_id: dict[str, int] = field(default_factory=dict, repr=False)

    @property
    def n_passages(self) -> int:
        return len(self.passage_ids)

    @property
    def avg_length(self) -> float:
        return sum(self.doc_lengths) / len(self.doc_lengths) if self.doc_lengths else 0.0

    def df(self, term: str) -> int:
        return len(self.postings.get(term, ()))

    def ref_of(self, passage_id: str) -> int:
        try:
            return self._ref_by_id[passage_id]
        except KeyError:
            raise UnknownPassageRef(passage_id) from None

    def passage_id_of(self, ref: int) -> str:
        if not 0 <= ref < len(self.passage_ids):
            raise UnknownPassageRef(ref)
        return self.passage_ids[ref]

    def length_of(self, ref: int) -> int:
        if not 0 <= ref < len(self.doc_lengths):
            raise UnknownPassageRef(ref)
        return self.doc_lengths[ref]


def build_index(passages: Iterable[Passage]) -> Index:
    """Tokenize every passage and build complete postings with exact
    tf/df. Raises DuplicatePassageId on id collisions."""
    idx = Index()
    for p in passages:
        if p.passage_id in idx._ref_by_id:
            raise DuplicatePassageId(p.passage_id)
        ref = len(idx.passage_ids)
        idx._ref_by_id[p.passage_id] = ref
        idx.passage_ids.append(p.passage_id)
        idx.doc_ids.append(p.doc_id)
        idx.texts.append(p.text)
        tokens = tokenize(p.text)
        idx.doc_lengths.append(len(tokens))
        counts: dict[str, int] = {}
        for t in tokens:
            counts[t] = counts.get(t, 0) + 1
        for term, tf in counts.items():
            idx.postings.setdefault(term, []).append((ref, tf))
    return idx


def save_index(index: Index, out_dir) -> None:
    """Write the index as a single versioned JSON file under out_dir."""
    os.makedirs(out_dir, exist_ok=True)
    payload = {
        "magic": FORMAT_MAGIC,
        "version": FORMAT_VERSION,
        "passage_ids": index.passage_ids,
        "doc_ids": index.doc_ids,
        "texts": index.texts,
        "doc_lengths": index.doc_lengths,
        "postings": {t: [list(e) for e in es] for t, es in index.postings.items()},
    }
    with open(os.path.join(out_dir, "index.json"), "w", encoding="utf-8") as f:
        json.dump(payload, f, ensure_ascii=False)


def load_index(path) -> Index:
    """Load an index directory written by save_index."""
    file_path = os.path.join(path, "index.json") if os.path.isdir(path) else path
    with open(file_path, encoding="utf-8") as f:
        try:
            payload = json.load(f)
        except json.JSONDecodeError as exc:
            raise FormatVersionMismatch(f"not an index file: {exc}") from exc
    if payload.get("magic") != FORMAT_MAGIC or payload.get("version") != FORMAT_VERSION:
        raise FormatVersionMismatch(
            f"expected {FORMAT_MAGIC} v{FORMAT_VERSION}, "
            f"got {payload.get('magic')!r} v{payload.get('version')!r}"
        )
    idx = Index(
        postings={t: [tuple(e) for e in es] for t, es in payload["postings"].items()},
        doc_lengths=list(payload["doc_lengths"]),
        passage_ids=list(payload["passage_ids"]),
        texts=list(payload["texts"]),
        doc_ids=list(payload["doc_ids"]),
    )
    idx._ref_by_id = {pid: i for i, pid in enumerate(idx.passage_ids)}
    return idx
