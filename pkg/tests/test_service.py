import pytest
from fastapi.testclient import TestClient

from passagesearch.fusion import build_pool
from passagesearch.rerank import RerankPipelineConfig, build_weight_table, pipeline_search
from passagesearch.retrieval import search_bm25
from passagesearch.service import (
    SearchService,
    create_app,
    highlight_terms,
)


@pytest.fixture
def service(small_collection, small_index, tmp_path):
    table = build_weight_table(
        small_index, {d.doc_id: d.title for d in small_collection.documents}
    )
    pools = {}
    for topic in small_collection.topics:
        runs = [
            search_bm25(topic.question, 100, small_index, topic_id=topic.topic_id),
            search_bm25(
                topic.keyword_queries[0], 100, small_index,
                topic_id=topic.topic_id, run_tag="kw",
            ),
        ]
        pools[topic.topic_id] = build_pool(topic.topic_id, runs, topic.split)
    return SearchService(
        small_index,
        table,
        small_collection.documents,
        tmp_path / "store",
        pools=pools,
        topics=small_collection.topics,
        rng_seed=123,
    )


@pytest.fixture
def client(service):
    return TestClient(create_app(service))


class TestHighlight:
    def test_shared_terms(self):
        spans = highlight_terms("sowthistle herbicide", "Herbicide trials on sowthistle.")
        surfaces = ["Herbicide trials on sowthistle."[s.start : s.end] for s in spans]
        assert surfaces == ["Herbicide", "sowthistle"]

    def test_no_shared_terms(self):
        assert highlight_terms("wheat", "Barley only here.") == []

    def test_repeated_term_two_spans(self):
        spans = highlight_terms("rust", "Rust spreads; rust persists.")
        assert len(spans) == 2

    def test_spans_in_bounds_non_overlapping(self):
        text = "Wheat rust and wheat blight in wheat crops."
        spans = highlight_terms("wheat rust blight", text)
        last_end = 0
        for s in spans:
            assert 0 <= s.start < s.end <= len(text)
            assert s.start >= last_end
            last_end = s.end

    def test_stopwords_never_highlighted(self):
        assert highlight_terms("the wheat", "The field.") == []


class TestChat:
    def test_answer_is_pipeline_top_ranked(self, client, service, small_collection):
        topic = small_collection.topics[0]
        resp = client.post("/chat/s1/message", json={"text": topic.question})
        assert resp.status_code == 200
        body = resp.json()
        direct = pipeline_search(
            topic.question, service.index, service.table, RerankPipelineConfig()
        )
        pids = direct.passage_ids()
        assert body["answer"]["passage_id"] == pids[0]
        assert [m["passage_id"] for m in body["more_answers"]] == pids[1:5]

    def test_more_answers_exclude_top(self, client, small_collection):
        resp = client.post(
            "/chat/s1/message", json={"text": small_collection.topics[1].question}
        )
        body = resp.json()
        assert body["answer"]["passage_id"] not in [
            m["passage_id"] for m in body["more_answers"]
        ]

    def test_stopword_only_message_canned(self, client):
        resp = client.post("/chat/s1/message", json={"text": "the of and"})
        body = resp.json()
        assert "rephrase" in body["answer"]["text"].lower()
        assert body["more_answers"] == []

    def test_payload_carries_source_link(self, client, small_collection):
        resp = client.post(
            "/chat/s1/message", json={"text": small_collection.topics[0].question}
        )
        assert resp.json()["answer"]["source_url"]

    def test_empty_message_rejected(self, client):
        assert client.post("/chat/s1/message", json={"text": "  "}).status_code == 400

    def test_clarifying_question_reserved_empty(self, client, small_collection):
        resp = client.post(
            "/chat/s1/message", json={"text": small_collection.topics[0].question}
        )
        assert resp.json()["clarifying_question"] is None


class TestEvents:
    def test_like_appends(self, client, service, small_collection):
        turn = client.post(
            "/chat/s1/message", json={"text": small_collection.topics[0].question}
        ).json()
        n = len(service.events.records)
        resp = client.post(
            "/chat/s1/event",
            json={"turn_id": turn["turn_id"], "kind": "like"},
        )
        assert resp.status_code == 200
        assert len(service.events.records) == n + 1

    def test_unknown_turn_404(self, client):
        resp = client.post("/chat/s1/event", json={"turn_id": "nope:1", "kind": "click"})
        assert resp.status_code == 404

    def test_bad_kind_400(self, client, service, small_collection):
        turn = client.post(
            "/chat/s1/message", json={"text": small_collection.topics[0].question}
        ).json()
        resp = client.post(
            "/chat/s1/event", json={"turn_id": turn["turn_id"], "kind": "shrug"}
        )
        assert resp.status_code == 400


class TestAssessment:
    def test_fresh_topic_serves_fused_rank_one(self, client, service, small_collection):
        topic = small_collection.topics[0]
        resp = client.get(f"/assess/{topic.topic_id}/next", params={"assessor": "a1"})
        item = resp.json()["item"]
        assert item["passage_id"] == service.pools[topic.topic_id].queue[0]
        assert item["question"] == topic.question
        assert isinstance(item["highlights"], list)

    def test_judgment_walk_and_prefix_discipline(self, client, service, small_collection):
        topic = small_collection.topics[0]
        tid = topic.topic_id
        first = client.get(f"/assess/{tid}/next", params={"assessor": "a1"}).json()["item"]
        # judging out of order is rejected
        wrong = service.pools[tid].queue[2]
        resp = client.post(
            f"/assess/{tid}/judgment",
            json={"passage_id": wrong, "grade": 2, "assessor": "a1"},
        )
        assert resp.status_code == 400
        # judging the head is accepted
        resp = client.post(
            f"/assess/{tid}/judgment",
            json={"passage_id": first["passage_id"], "grade": 2, "assessor": "a1"},
        )
        assert resp.status_code == 200
        nxt = client.get(f"/assess/{tid}/next", params={"assessor": "a1"}).json()["item"]
        assert nxt["passage_id"] == service.pools[tid].queue[1]

    def test_invalid_grade(self, client, service, small_collection):
        tid = small_collection.topics[0].topic_id
        head = service.pools[tid].queue[0]
        resp = client.post(
            f"/assess/{tid}/judgment",
            json={"passage_id": head, "grade": 5, "assessor": "a1"},
        )
        assert resp.status_code == 400

    def test_train_topic_done_after_10(self, client, service, small_collection):
        topic = next(t for t in small_collection.topics if t.split == "train")
        tid = topic.topic_id
        for _ in range(10):
            item = client.get(f"/assess/{tid}/next", params={"assessor": "a2"}).json()["item"]
            client.post(
                f"/assess/{tid}/judgment",
                json={"passage_id": item["passage_id"], "grade": 0, "assessor": "a2"},
            )
        assert client.get(f"/assess/{tid}/next", params={"assessor": "a2"}).json()["done"]

    def test_unknown_topic_404(self, client):
        assert client.get("/assess/nope/next", params={"assessor": "a"}).status_code == 404


class TestAuthoring:
    def test_random_document_seeded(self, small_collection, small_index, tmp_path):
        table = build_weight_table(small_index)
        def fresh(sub):
            return SearchService(
                small_index, table, small_collection.documents,
                tmp_path / sub, rng_seed=7,
            )
        a, b = fresh("s1"), fresh("s2")
        seq_a = [a.random_document().doc_id for _ in range(5)]
        seq_b = [b.random_document().doc_id for _ in range(5)]
        assert seq_a == seq_b

    def test_random_document_excludes(self, client, small_collection):
        keep = small_collection.documents[0].doc_id
        exclude = ",".join(d.doc_id for d in small_collection.documents if d.doc_id != keep)
        resp = client.get("/author/random-document", params={"exclude": exclude})
        assert resp.json()["doc_id"] == keep

    def test_all_excluded(self, client, small_collection):
        exclude = ",".join(d.doc_id for d in small_collection.documents)
        assert client.get("/author/random-document", params={"exclude": exclude}).status_code == 404

    def test_known_item_topic_created(self, client, service, small_collection):
        pid = small_collection.passages[0].passage_id
        resp = client.post(
            "/author/topic",
            json={
                "question": "What rate of nitrogen suits wheat?",
                "keyword_queries": ["nitrogen wheat rate", "wheat fertiliser"],
                "answer": "A moderate rate.",
                "source_doc_id": small_collection.passages[0].doc_id,
                "passages": [{"passage_id": pid, "grade": 2}],
            },
        )
        assert resp.status_code == 200
        tid = resp.json()["topic_id"]
        assert tid in service.topics
        # known-item guarantee: at least one judgment with grade >= 1
        grades = [
            r["grade"] for r in service.judgments.records if r["topic_id"] == tid
        ]
        assert any(g >= 1 for g in grades)

    def test_all_non_relevant_rejected(self, client, small_collection):
        pid = small_collection.passages[0].passage_id
        resp = client.post(
            "/author/topic",
            json={
                "question": "Anything?",
                "keyword_queries": ["wheat"],
                "passages": [{"passage_id": pid, "grade": 0}],
            },
        )
        assert resp.status_code == 400

    def test_empty_question_rejected(self, client):
        resp = client.post(
            "/author/topic", json={"question": "", "keyword_queries": ["wheat"]}
        )
        assert resp.status_code == 400


class TestReplay:
    def test_restart_reproduces_read_endpoints(
        self, small_collection, small_index, tmp_path
    ):
        table = build_weight_table(small_index)
        store = tmp_path / "store"

        def boot():
            svc = SearchService(
                small_index, table, small_collection.documents, store,
                topics=small_collection.topics, rng_seed=1,
            )
            return svc, TestClient(create_app(svc))

        _, c1 = boot()
        for topic in small_collection.topics[:3]:
            c1.post("/chat/sess/message", json={"text": topic.question})
        turns_before = c1.get("/chat/sess/turns").json()
        doc_before = c1.get(f"/doc/{small_collection.documents[0].doc_id}").json()

        _, c2 = boot()
        assert c2.get("/chat/sess/turns").json() == turns_before
        assert c2.get(f"/doc/{small_collection.documents[0].doc_id}").json() == doc_before

    def test_health(self, client, small_index):
        body = client.get("/health").json()
        assert body["status"] == "ok"
        assert body["passages"] == small_index.n_passages
