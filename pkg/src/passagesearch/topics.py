"""Multi-faceted topics: question, keyword queries, authored answer,
train/test split, and collection-level statistics."""

import json
import math
from dataclasses import dataclass, field, replace

from .analysis import tokenize
from .errors import (
    DuplicateTopicId,
    EmptyTopicSet,
    InsufficientTopics,
    MalformedTopic,
)


@dataclass(frozen=True)
class Topic:
    topic_id: str
    question: str
    keyword_queries: tuple[str, ...]
    answer: str = ""
    split: str = "train"  # "train" | "test"
    source_doc_id: str | None = None


@dataclass(frozen=True)
class TopicStats:
    n_topics: int
    mean_queries_per_topic: float
    sd_queries_per_topic: float
    mean_question_len_words: float
    mean_query_len_words: float


def _validate(record: dict) -> Topic:
    topic_id = str(record.get("topic_id") or "").strip()
    if not topic_id:
        raise MalformedTopic("missing topic_id")
    question = str(record.get("question") or "").strip()
    if not question:
        raise MalformedTopic(f"{topic_id}: missing question")
    queries = tuple(str(q).strip() for q in record.get("keyword_queries") or [])
    if not queries or any(not q for q in queries):
        raise MalformedTopic(f"{topic_id}: needs at least one non-empty keyword query")
    for q in queries:
        if not tokenize(q):
            raise MalformedTopic(f"{topic_id}: query {q!r} is empty after analysis")
    split = record.get("split", "train")
    if split not in ("train", "test"):
        raise MalformedTopic(f"{topic_id}: bad split {split!r}")
    return Topic(
        topic_id=topic_id,
        question=question,
        keyword_queries=queries,
        answer=str(record.get("answer") or ""),
        split=split,
        source_doc_id=record.get("source_doc_id") or None,
    )


def load_topics(path) -> list[Topic]:
    """Read a JSONL topic file; rejects duplicate topic_ids."""
    topics = []
    seen = set()
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            topic = _validate(json.loads(line))
            if topic.topic_id in seen:
                raise DuplicateTopicId(topic.topic_id)
            seen.add(topic.topic_id)
            topics.append(topic)
    return topics


def topic_to_record(topic: Topic) -> dict:
    return {
        "topic_id": topic.topic_id,
        "question": topic.question,
        "keyword_queries": list(topic.keyword_queries),
        "answer": topic.answer,
        "split": topic.split,
        "source_doc_id": topic.source_doc_id,
    }


def save_topics(topics: list[Topic], path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for t in topics:
            f.write(json.dumps(topic_to_record(t), ensure_ascii=False) + "\n")


def topic_stats(topics: list[Topic]) -> TopicStats:
    """Descriptive stats; word counts split on whitespace over the raw
    text, SD uses the population formula."""
    if not topics:
        raise EmptyTopicSet()
    n_queries = [len(t.keyword_queries) for t in topics]
    mean_q = sum(n_queries) / len(n_queries)
    sd_q = math.sqrt(sum((x - mean_q) ** 2 for x in n_queries) / len(n_queries))
    question_lens = [len(t.question.split()) for t in topics]
    query_lens = [len(q.split()) for t in topics for q in t.keyword_queries]
    return TopicStats(
        n_topics=len(topics),
        mean_queries_per_topic=mean_q,
        sd_queries_per_topic=sd_q,
        mean_question_len_words=sum(question_lens) / len(question_lens),
        mean_query_len_words=sum(query_lens) / len(query_lens),
    )


def split_topics(
    topics: list[Topic],
    qrels: dict[tuple[str, str], int],
    n_test: int = 50,
) -> tuple[list[Topic], list[Topic]]:
    """Assign the n_test most-judged topics to the test split and the
    rest to train; boundary ties resolved by ascending topic_id."""
    if len(topics) < n_test:
        raise InsufficientTopics(f"{len(topics)} topics < n_test={n_test}")
    counts: dict[str, int] = {t.topic_id: 0 for t in topics}
    for (topic_id, _pid) in qrels:
        if topic_id in counts:
            counts[topic_id] += 1
    order = sorted(topics, key=lambda t: (-counts[t.topic_id], t.topic_id))
    test_ids = {t.topic_id for t in order[:n_test]}
    train = [replace(t, split="train") for t in topics if t.topic_id not in test_ids]
    test = [replace(t, split="test") for t in topics if t.topic_id in test_ids]
    return train, test
