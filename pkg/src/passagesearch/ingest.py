"""Corpus ingest: parse documents, split sentences, build 3-sentence passages.

Documents arrive as JSON lines with doc_id/title/source_kind/body fields.
Passages are consecutive non-overlapping windows of up to `window`
sentences; only the last passage of a document may be shorter.
"""

import json
import re
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator

from .errors import (
    DuplicateDocId,
    EmptyBody,
    EmptyDocument,
    IngestError,
    MissingField,
)

SOURCE_KINDS = ("report", "journal")

# Abbreviations that suppress a sentence split after their trailing dot.
# Versioned: extend only by appending and bumping the version.
ABBREVIATIONS_VERSION = 1
ABBREVIATIONS = frozenset(
    [
        "dr.", "mr.", "mrs.", "ms.", "prof.", "fig.", "eq.", "e.g.", "i.e.",
        "et al.", "vs.", "cv.", "spp.", "no.", "pp.",
    ]
)

_CONTROL_RE = re.compile(r"[\x00-\x1f\x7f]")
_WS_RE = re.compile(r"\s+")

# Terminator followed by whitespace and an uppercase letter, digit or
# opening quote/bracket starts a new sentence.
_BOUNDARY_RE = re.compile(r"[.?!](?=\s+[\"'(\[‘“A-Z0-9])")


@dataclass(frozen=True)
class Document:
    doc_id: str
    title: str
    source_kind: str
    body: str
    source_url: str | None = None


@dataclass(frozen=True)
class SentenceSpan:
    start: int  # inclusive char offset
    end: int  # exclusive char offset


@dataclass(frozen=True)
class Passage:
    passage_id: str
    doc_id: str
    ordinal: int  # 1-based
    text: str
    sentence_spans: tuple[SentenceSpan, ...] = field(default=())


@dataclass
class CorpusStats:
    n_documents: int = 0
    n_passages: int = 0
    n_sentences: int = 0

    @property
    def mean_passages_per_doc(self) -> float:
        return self.n_passages / self.n_documents if self.n_documents else 0.0


def normalize_text(text: str) -> str:
    """Strip control chars and collapse whitespace runs (incl. newlines)
    to single spaces."""
    text = _CONTROL_RE.sub(" ", text)
    return _WS_RE.sub(" ", text).strip()


def parse_document(record: dict) -> Document:
    """Validate a raw corpus record and normalize its body."""
    doc_id = str(record.get("doc_id") or "").strip()
    if not doc_id:
        raise MissingField("doc_id")
    if any(c.isspace() for c in doc_id):
        raise MissingField(f"doc_id contains whitespace: {doc_id!r}")
    if "body" not in record or record["body"] is None:
        raise MissingField("body")
    body = normalize_text(str(record["body"]))
    if not body:
        raise EmptyBody(doc_id)
    kind = record.get("source_kind", "report")
    if kind not in SOURCE_KINDS:
        raise MissingField(f"source_kind must be one of {SOURCE_KINDS}, got {kind!r}")
    return Document(
        doc_id=doc_id,
        title=normalize_text(str(record.get("title", ""))),
        source_kind=kind,
        body=body,
        source_url=record.get("source_url") or None,
    )


def _is_abbreviation(text: str, dot_pos: int) -> bool:
    """True when the token ending at text[dot_pos] == '.' is a known
    abbreviation (checked against one- and two-word forms)."""
    if text[dot_pos] != ".":
        return False
    i = dot_pos
    while i > 0 and not text[i - 1].isspace():
        i -= 1
    word = text[i : dot_pos + 1].lstrip("\"'([")
    if word.lower() in ABBREVIATIONS:
        return True
    # two-word abbreviations like "et al."
    j = i
    while j > 0 and text[j - 1].isspace():
        j -= 1
    k = j
    while k > 0 and not text[k - 1].isspace():
        k -= 1
    two = (text[k:j] + " " + word).lower()
    return two in ABBREVIATIONS


def split_sentences(text: str) -> list[SentenceSpan]:
    """Deterministic rule-based sentence splitter over normalized text.

    Splits after '.', '?' or '!' followed by whitespace and an
    uppercase letter, digit or opening quote; the abbreviation list
    suppresses false splits; trailing text forms a final sentence.
    """
    spans: list[SentenceSpan] = []
    start = 0
    n = len(text)
    for m in _BOUNDARY_RE.finditer(text):
        pos = m.start()
        if _is_abbreviation(text, pos):
            continue
        end = pos + 1
        while start < end and text[start].isspace():
            start += 1
        if start < end:
            spans.append(SentenceSpan(start, end))
        start = end
    # trailing sentence
    while start < n and text[start].isspace():
        start += 1
    end = n
    while end > start and text[end - 1].isspace():
        end -= 1
    if end > start:
        spans.append(SentenceSpan(start, end))
    return spans


def make_passages(doc: Document, window: int = 3) -> list[Passage]:
    """Group the document's sentences into consecutive windows of size
    `window`; the final window keeps the remainder."""
    if window < 1:
        raise ValueError("window must be >= 1")
    spans = split_sentences(doc.body)
    if not spans:
        raise EmptyDocument(doc.doc_id)
    passages = []
    for i in range(0, len(spans), window):
        group = tuple(spans[i : i + window])
        ordinal = i // window + 1
        text = " ".join(doc.body[s.start : s.end] for s in group)
        passages.append(
            Passage(
                passage_id=f"{doc.doc_id}-{ordinal}",
                doc_id=doc.doc_id,
                ordinal=ordinal,
                text=text,
                sentence_spans=group,
            )
        )
    return passages


def iter_records(stream: IO[str]) -> Iterator[tuple[int, dict]]:
    """Yield (line_no, record) for each non-blank JSONL line."""
    for line_no, line in enumerate(stream, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            yield line_no, json.loads(line)
        except json.JSONDecodeError as exc:
            raise IngestError(line_no, exc) from exc


def ingest_corpus(
    records: Iterable[tuple[int, dict]],
    window: int = 3,
    strict: bool = True,
) -> tuple[list[Passage], CorpusStats]:
    """Parse, split and window every document of a corpus stream.

    With strict=True the first bad record aborts the ingest; otherwise
    bad records are skipped. Duplicate doc_ids are always an error.
    """
    passages: list[Passage] = []
    stats = CorpusStats()
    seen: set[str] = set()
    for line_no, record in records:
        try:
            doc = parse_document(record)
            if doc.doc_id in seen:
                raise DuplicateDocId(doc.doc_id)
            doc_passages = make_passages(doc, window=window)
        except Exception as exc:
            if strict:
                raise IngestError(line_no, exc) from exc
            continue
        seen.add(doc.doc_id)
        passages.extend(doc_passages)
        stats.n_documents += 1
        stats.n_passages += len(doc_passages)
        stats.n_sentences += sum(len(p.sentence_spans) for p in doc_passages)
    return passages, stats


def load_documents(path) -> list[Document]:
    """Read a JSONL corpus file into validated Documents."""
    docs = []
    seen = set()
    with open(path, encoding="utf-8") as f:
        for line_no, record in iter_records(f):
            try:
                doc = parse_document(record)
                if doc.doc_id in seen:
                    raise DuplicateDocId(doc.doc_id)
            except IngestError:
                raise
            except Exception as exc:
                raise IngestError(line_no, exc) from exc
            seen.add(doc.doc_id)
            docs.append(doc)
    return docs


def write_passages(passages: Iterable[Passage], path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for p in passages:
            f.write(
                json.dumps(
                    {
                        "passage_id": p.passage_id,
                        "doc_id": p.doc_id,
                        "ordinal": p.ordinal,
                        "text": p.text,
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )


def load_passages(path) -> list[Passage]:
    passages = []
    with open(path, encoding="utf-8") as f:
        for _line_no, rec in iter_records(f):
            passages.append(
                Passage(
                    passage_id=rec["passage_id"],
                    doc_id=rec["doc_id"],
                    ordinal=int(rec["ordinal"]),
                    text=rec["text"],
                )
            )
    return passages
