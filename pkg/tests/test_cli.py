"""End-to-end pipeline exercise through the CLI entry point."""

import json

import pytest

from passagesearch.cli import main


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    main(["synth", "--out", str(d), "--seed", "3", "--n-docs", "40", "--n-topics", "6"])
    return d


def test_ingest_and_index(workdir, capsys):
    main([
        "ingest", "--input", str(workdir / "corpus.jsonl"),
        "--output", str(workdir / "p2.jsonl"), "--strict",
    ])
    assert "documents=40" in capsys.readouterr().out
    main(["index", "build", "--passages", str(workdir / "p2.jsonl"), "--out", str(workdir / "idx")])
    main(["index", "stats", "--index", str(workdir / "idx")])
    assert "passages=" in capsys.readouterr().out


def test_search_rerank_eval(workdir, capsys):
    idx = str(workdir / "idx")
    topics = str(workdir / "topics.jsonl")
    main([
        "search", "--index", idx, "--topics", topics, "--field", "question",
        "--model", "bm25", "--k", "100", "--run-tag", "bm25q",
        "--out", str(workdir / "bm25.run"),
    ])
    main([
        "search", "--index", idx, "--topics", topics, "--field", "query",
        "--model", "bm25rm3", "--k", "100", "--run-tag", "rm3kw",
        "--out", str(workdir / "rm3.run"),
    ])
    main(["weights", "build", "--index", idx, "--corpus", str(workdir / "corpus.jsonl"),
          "--out", str(workdir / "weights.tsv")])
    main([
        "rerank", "--index", idx, "--weights", str(workdir / "weights.tsv"),
        "--run", str(workdir / "bm25.run"), "--topics", topics,
        "--out", str(workdir / "rerank.run"),
    ])
    capsys.readouterr()
    main([
        "eval", "--run", str(workdir / "rerank.run"),
        "--qrels", str(workdir / "qrels.txt"),
        "--metrics", "ndcg@5,rr,success@3,success@100",
    ])
    out = capsys.readouterr().out
    assert "ndcg@5" in out and "success@100" in out
    main([
        "sigtest", "--run-a", str(workdir / "bm25.run"),
        "--run-b", str(workdir / "rerank.run"),
        "--qrels", str(workdir / "qrels.txt"), "--metric", "ndcg@5",
    ])
    assert "p=" in capsys.readouterr().out


def test_run_file_format(workdir):
    lines = (workdir / "bm25.run").read_text().strip().splitlines()
    parts = lines[0].split()
    assert len(parts) == 6
    assert parts[1] == "Q0"
    assert parts[5] == "bm25q"
    assert len(parts[4].split(".")[1]) == 6  # 6-decimal fixed scores


def test_pool_build_and_qrels_export(workdir, capsys, tmp_path):
    topics = str(workdir / "topics.jsonl")
    main([
        "pool", "build", "--runs", str(workdir / "bm25.run"), str(workdir / "rm3.run"),
        "--topics", topics, "--out", str(workdir / "pools"),
    ])
    assert (workdir / "pools" / "pools.jsonl").exists()
    judgments = tmp_path / "judgments.jsonl"
    with open(judgments, "w") as f:
        f.write(json.dumps({"topic_id": "qt001", "passage_id": "sd0000-1", "grade": 2}) + "\n")
    main(["pool", "export-qrels", "--judgments", str(judgments), "--out", str(tmp_path / "q.txt")])
    assert (tmp_path / "q.txt").read_text() == "qt001 0 sd0000-1 2\n"


def test_topics_commands(workdir, capsys):
    main(["topics", "validate", str(workdir / "topics.jsonl")])
    main(["topics", "stats", str(workdir / "topics.jsonl")])
    out = capsys.readouterr().out
    assert "mean_queries=3.00" in out


def test_bench_smoke(workdir, capsys):
    main([
        "bench", "--index", str(workdir / "idx"), "--topics", str(workdir / "topics.jsonl"),
        "--pipeline", "bm25,tilde", "--warmup", "1", "--repeats", "1",
        "--out", str(workdir / "bench.jsonl"),
    ])
    out = capsys.readouterr().out
    assert "bm25" in out and "tilde" in out
    assert (workdir / "bench.jsonl").exists()
