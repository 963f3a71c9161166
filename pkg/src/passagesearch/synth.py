"""Deterministic synthetic desk-scale collection generator.

Produces a corpus of short agronomy-flavoured documents plus known-item
topics: each topic targets one planted passage carrying rare terms that
occur nowhere else in the corpus, so first-stage retrieval is expected
to find it and graded qrels are known by construction.
"""

import random
from dataclasses import dataclass

from .ingest import Document, Passage, ingest_corpus
from .topics import Topic

COMMON_WORDS = """
wheat barley sorghum canola chickpea soybean mungbean oat lupin maize
yield soil nitrogen phosphorus potassium fertiliser sowing planting row
spacing rainfall drought irrigation stubble fallow rotation tillage
fungicide herbicide pesticide weed pest disease rust blight aphid snail
mildew nematode control treatment trial plot season harvest grain crop
variety cultivar resistance tolerance growth density emergence maturity
moisture temperature climate region paddock farm agronomy management
application rate dose timing spray residue leaf root stem head flowering
protein screening quality profit cost market price recommendation
practice evidence study result analysis measurement improvement response
""".split()

SYLLABLES = ["zor", "vex", "qua", "blin", "trop", "gly", "fex", "nuv", "krel", "plim"]


def _rare_term(rng: random.Random, taken: set[str]) -> str:
    while True:
        term = rng.choice(SYLLABLES) + rng.choice(SYLLABLES) + str(rng.randint(10, 99))
        if term not in taken:
            taken.add(term)
            return term


def _sentence(rng: random.Random, extra: list[str] | None = None) -> str:
    words = [rng.choice(COMMON_WORDS) for _ in range(rng.randint(6, 11))]
    if extra:
        for w in extra:
            words.insert(rng.randrange(len(words) + 1), w)
    words[0] = words[0].capitalize()
    return " ".join(words) + "."


@dataclass
class SynthCollection:
    documents: list[Document]
    passages: list[Passage]
    topics: list[Topic]
    qrels: dict[tuple[str, str], int]  # known-item ground truth
    target_passage: dict[str, str]  # topic_id -> planted passage_id


def generate_collection(
    seed: int = 42,
    n_docs: int = 500,
    n_topics: int = 50,
    window: int = 3,
) -> SynthCollection:
    rng = random.Random(seed)
    taken: set[str] = set()
    documents: list[Document] = []
    topics: list[Topic] = []
    qrels: dict[tuple[str, str], int] = {}
    target_passage: dict[str, str] = {}

    target_docs = set(range(n_topics))  # first n_topics docs carry a planted passage
    for i in range(n_docs):
        doc_id = f"sd{i:04d}"
        sentences = [_sentence(rng) for _ in range(rng.randrange(window, 5 * window, window))]
        if i in target_docs:
            topic_id = f"qt{i + 1:03d}"
            r1 = _rare_term(rng, taken)
            r2 = _rare_term(rng, taken)
            crop = rng.choice(COMMON_WORDS[:10])
            planted_ordinal = len(sentences) // window + 1
            sentences += [
                _sentence(rng, extra=[r1, r2]),
                _sentence(rng, extra=[r1, crop]),
                _sentence(rng, extra=[r2]),
            ]
            # a padding window after the planted one, when the dice allow
            if rng.random() < 0.5:
                sentences += [_sentence(rng) for _ in range(window)]
            pid = f"{doc_id}-{planted_ordinal}"
            target_passage[topic_id] = pid
            qrels[(topic_id, pid)] = 2
            if planted_ordinal > 1:
                qrels[(topic_id, f"{doc_id}-{planted_ordinal - 1}")] = 1
            topics.append(
                Topic(
                    topic_id=topic_id,
                    question=f"What treatment using {r1} together with {r2} gives good {crop} control?",
                    keyword_queries=(
                        f"{r1} {r2}",
                        f"{r1} {crop} treatment",
                        f"{r2} control trial",
                    ),
                    answer=f"Combining {r1} with {r2} gave good control of {crop} in the reported trials.",
                    split="test" if len(topics) < n_topics // 2 else "train",
                    source_doc_id=doc_id,
                )
            )
        title = " ".join(rng.choice(COMMON_WORDS) for _ in range(4)).capitalize()
        documents.append(
            Document(
                doc_id=doc_id,
                title=title,
                source_kind=rng.choice(("report", "journal")),
                body=" ".join(sentences),
                source_url=f"https://example.org/docs/{doc_id}.pdf",
            )
        )

    records = [
        (i + 1, {
            "doc_id": d.doc_id,
            "title": d.title,
            "source_kind": d.source_kind,
            "body": d.body,
            "source_url": d.source_url,
        })
        for i, d in enumerate(documents)
    ]
    passages, _stats = ingest_corpus(records, window=window)
    return SynthCollection(
        documents=documents,
        passages=passages,
        topics=topics,
        qrels=qrels,
        target_passage=target_passage,
    )


def random_queries(collection: SynthCollection, n: int, seed: int = 7) -> list[str]:
    """Random mixed-vocabulary queries for oracle comparisons."""
    rng = random.Random(seed)
    rare = sorted({t for q in collection.topics for t in q.keyword_queries[0].split()})
    queries = []
    for _ in range(n):
        words = [rng.choice(COMMON_WORDS) for _ in range(rng.randint(2, 6))]
        if rare and rng.random() < 0.3:
            words.append(rng.choice(rare))
        queries.append(" ".join(words))
    return queries
