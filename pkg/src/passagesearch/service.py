"""Conversational search service: chat answers, interaction logging,
assessment workflow and known-item topic authoring.

All durable state lives in append-only JSONL stores that are replayed
at startup, so restarting the service reproduces identical responses
for every read endpoint.
"""

import json
import os
import random
import threading
import time
from dataclasses import asdict, dataclass, field

from .analysis import token_spans, tokenize
from .errors import (
    Exhausted,
    InvalidGrade,
    MissingQuestion,
    NoRelevantPassage,
    OutOfOrderJudgment,
    ServiceUnavailable,
    UnknownTopic,
    UnknownTurn,
)
from .fusion import DONE, Judgment, Pool, next_for_judgment
from .index import Index
from .ingest import Document
from .rerank import RerankPipelineConfig, TermWeightTable, pipeline_search
from .topics import Topic

CANNED_REPHRASE = "Sorry, I could not find an answer. Please rephrase your question."

EVENT_KINDS = ("click", "like", "emoji", "more_answer_selected")


@dataclass(frozen=True)
class HighlightSpan:
    start: int
    end: int
    term: str


def highlight_terms(question: str, passage_text: str) -> list[HighlightSpan]:
    """Spans over every passage token whose analyzed form appears among
    the question's analyzed tokens."""
    wanted = set(tokenize(question))
    return [
        HighlightSpan(start, end, term)
        for start, end, term in token_spans(passage_text)
        if term in wanted
    ]


@dataclass
class ConversationTurn:
    session_id: str
    turn_id: str
    user_text: str
    answer: dict
    more_answers: list[dict]
    timestamp: float
    clarifying_question: str | None = None  # reserved, never populated


@dataclass
class InteractionEvent:
    session_id: str
    turn_id: str
    kind: str
    target_passage_id: str | None = None
    payload: str = ""
    timestamp: float = field(default_factory=time.time)


class JsonlStore:
    """Append-only JSONL log, replayed into memory at startup."""

    def __init__(self, path):
        self.path = path
        self._lock = threading.Lock()
        self.records: list[dict] = []
        if os.path.exists(path):
            with open(path, encoding="utf-8") as f:
                for line in f:
                    line = line.strip()
                    if line:
                        self.records.append(json.loads(line))

    def append(self, record: dict) -> None:
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as f:
                f.write(json.dumps(record, ensure_ascii=False) + "\n")
            self.records.append(record)


class SearchService:
    """In-process core behind the HTTP endpoints."""

    def __init__(
        self,
        index: Index,
        table: TermWeightTable,
        documents: list[Document],
        store_dir,
        pools: dict[str, Pool] | None = None,
        topics: list[Topic] | None = None,
        cfg: RerankPipelineConfig = RerankPipelineConfig(),
        rng_seed: int | None = None,
    ):
        if index is None or table is None:
            raise ServiceUnavailable("index and weight table required")
        self.index = index
        self.table = table
        self.cfg = cfg
        self.documents = {d.doc_id: d for d in documents}
        self.pools = dict(pools or {})
        self.topics = {t.topic_id: t for t in (topics or [])}
        self.rng = random.Random(rng_seed)
        os.makedirs(store_dir, exist_ok=True)
        self.turns = JsonlStore(os.path.join(store_dir, "turns.jsonl"))
        self.events = JsonlStore(os.path.join(store_dir, "events.jsonl"))
        self.judgments = JsonlStore(os.path.join(store_dir, "judgments.jsonl"))
        self.authored = JsonlStore(os.path.join(store_dir, "topics.jsonl"))
        for rec in self.authored.records:
            t = Topic(
                topic_id=rec["topic_id"],
                question=rec["question"],
                keyword_queries=tuple(rec["keyword_queries"]),
                answer=rec.get("answer", ""),
                split=rec.get("split", "train"),
                source_doc_id=rec.get("source_doc_id"),
            )
            self.topics[t.topic_id] = t
        self._turn_ids = {rec["turn_id"] for rec in self.turns.records}
        self._judge_lock = threading.Lock()

    # --- chat ---

    def _payload(self, passage_id: str) -> dict:
        ref = self.index.ref_of(passage_id)
        doc_id = self.index.doc_ids[ref]
        doc = self.documents.get(doc_id)
        source = doc.source_url if doc and doc.source_url else f"/doc/{doc_id}"
        return {
            "passage_id": passage_id,
            "text": self.index.texts[ref],
            "doc_id": doc_id,
            "source_url": source,
        }

    def handle_message(self, session_id: str, text: str) -> ConversationTurn:
        if not text.strip():
            raise ValueError("empty message")
        turn_id = f"{session_id}:{sum(1 for r in self.turns.records if r['session_id'] == session_id) + 1}"
        if tokenize(text):
            result = pipeline_search(text, self.index, self.table, self.cfg)
            pids = result.passage_ids()
        else:
            pids = []
        if pids:
            answer = self._payload(pids[0])
            more = [self._payload(p) for p in pids[1:5]]
        else:
            answer = {"passage_id": None, "text": CANNED_REPHRASE, "doc_id": None, "source_url": None}
            more = []
        turn = ConversationTurn(
            session_id=session_id,
            turn_id=turn_id,
            user_text=text,
            answer=answer,
            more_answers=more,
            timestamp=time.time(),
        )
        self.turns.append(asdict(turn))
        self._turn_ids.add(turn_id)
        return turn

    def session_turns(self, session_id: str) -> list[dict]:
        return [r for r in self.turns.records if r["session_id"] == session_id]

    # --- interaction log ---

    def record_interaction(self, event: InteractionEvent) -> None:
        if event.kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind {event.kind!r}")
        if event.turn_id not in self._turn_ids:
            raise UnknownTurn(event.turn_id)
        self.events.append(asdict(event))

    # --- assessment ---

    def _assessor_judgments(self, topic_id: str, assessor: str) -> list[Judgment]:
        out = []
        for rec in self.judgments.records:
            if rec["topic_id"] == topic_id and rec["assessor"] == assessor:
                out.append(
                    Judgment(
                        topic_id=rec["topic_id"],
                        passage_id=rec["passage_id"],
                        grade=rec["grade"],
                        assessor=rec["assessor"],
                        timestamp=rec["timestamp"],
                    )
                )
        return out

    def next_assessment_item(self, topic_id: str, assessor: str):
        pool = self.pools.get(topic_id)
        topic = self.topics.get(topic_id)
        if pool is None or topic is None:
            raise UnknownTopic(topic_id)
        nxt = next_for_judgment(pool, self._assessor_judgments(topic_id, assessor))
        if nxt is DONE:
            return DONE
        payload = self._payload(nxt)
        payload["highlights"] = [
            asdict(s) for s in highlight_terms(topic.question, payload["text"])
        ]
        payload["question"] = topic.question
        return payload

    def submit_judgment(self, topic_id: str, passage_id: str, grade, assessor: str) -> dict:
        if not isinstance(grade, int) or grade not in (0, 1, 2):
            raise InvalidGrade(repr(grade))
        with self._judge_lock:
            head = self.next_assessment_item(topic_id, assessor)
            if head is DONE or head["passage_id"] != passage_id:
                raise OutOfOrderJudgment(passage_id)
            j = Judgment(topic_id=topic_id, passage_id=passage_id, grade=grade, assessor=assessor)
            self.judgments.append(asdict(j))
        return {"topic_id": topic_id, "passage_id": passage_id, "grade": grade}

    # --- topic authoring ---

    def random_document(self, exclude: set[str] = frozenset()) -> Document:
        candidates = [d for d in self.documents.values() if d.doc_id not in exclude]
        if not candidates:
            raise Exhausted("all documents excluded")
        return self.rng.choice(candidates)

    def submit_known_item_topic(self, draft: dict) -> Topic:
        question = str(draft.get("question") or "").strip()
        if not question:
            raise MissingQuestion()
        queries = [q for q in (draft.get("keyword_queries") or []) if str(q).strip()]
        if not queries:
            raise MissingQuestion("at least one keyword query required")
        graded = draft.get("passages") or []  # [{passage_id, grade}]
        if not any(int(p["grade"]) >= 1 for p in graded):
            raise NoRelevantPassage()
        topic_id = f"kt{len(self.authored.records) + 1:03d}"
        topic = Topic(
            topic_id=topic_id,
            question=question,
            keyword_queries=tuple(str(q) for q in queries),
            answer=str(draft.get("answer") or ""),
            split="train",
            source_doc_id=draft.get("source_doc_id"),
        )
        self.authored.append(
            {
                "topic_id": topic.topic_id,
                "question": topic.question,
                "keyword_queries": list(topic.keyword_queries),
                "answer": topic.answer,
                "split": topic.split,
                "source_doc_id": topic.source_doc_id,
            }
        )
        self.topics[topic_id] = topic
        for p in graded:
            j = Judgment(
                topic_id=topic_id,
                passage_id=p["passage_id"],
                grade=int(p["grade"]),
                assessor=str(draft.get("assessor") or "author"),
            )
            self.judgments.append(asdict(j))
        return topic


def create_app(service: SearchService):
    """FastAPI wrapper over a SearchService."""
    from fastapi import FastAPI, HTTPException

    app = FastAPI(title="passagesearch")
    app.state.service = service

    def _guard(fn, *args, not_found=(), **kwargs):
        try:
            return fn(*args, **kwargs)
        except not_found as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        except (InvalidGrade, OutOfOrderJudgment, MissingQuestion, NoRelevantPassage, ValueError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))

    @app.get("/health")
    def health():
        return {"status": "ok", "passages": service.index.n_passages}

    @app.post("/chat/{session_id}/message")
    def chat_message(session_id: str, body: dict):
        text = body.get("text", "")
        turn = _guard(service.handle_message, session_id, text)
        return asdict(turn)

    @app.get("/chat/{session_id}/turns")
    def chat_turns(session_id: str):
        return {"turns": service.session_turns(session_id)}

    @app.post("/chat/{session_id}/event")
    def chat_event(session_id: str, body: dict):
        event = InteractionEvent(
            session_id=session_id,
            turn_id=body.get("turn_id", ""),
            kind=body.get("kind", ""),
            target_passage_id=body.get("target_passage_id"),
            payload=body.get("payload", ""),
        )
        _guard(service.record_interaction, event, not_found=(UnknownTurn,))
        return {"status": "recorded"}

    @app.get("/assess/{topic_id}/next")
    def assess_next(topic_id: str, assessor: str):
        item = _guard(
            service.next_assessment_item, topic_id, assessor, not_found=(UnknownTopic,)
        )
        if item is DONE:
            return {"done": True}
        return {"done": False, "item": item}

    @app.post("/assess/{topic_id}/judgment")
    def assess_judgment(topic_id: str, body: dict):
        return _guard(
            service.submit_judgment,
            topic_id,
            body.get("passage_id", ""),
            body.get("grade"),
            body.get("assessor", ""),
            not_found=(UnknownTopic,),
        )

    @app.get("/author/random-document")
    def author_random(exclude: str = ""):
        excluded = {x for x in exclude.split(",") if x}
        doc = _guard(service.random_document, excluded, not_found=(Exhausted,))
        return asdict(doc)

    @app.post("/author/topic")
    def author_topic(body: dict):
        topic = _guard(service.submit_known_item_topic, body)
        return {
            "topic_id": topic.topic_id,
            "question": topic.question,
            "keyword_queries": list(topic.keyword_queries),
        }

    @app.get("/doc/{doc_id}")
    def get_doc(doc_id: str):
        doc = service.documents.get(doc_id)
        if doc is None:
            raise HTTPException(status_code=404, detail=f"unknown document {doc_id}")
        return asdict(doc)

    return app
