"""Command-line interface. One entry point with subcommands for every
stage of the pipeline: ingest, index, search, rerank, pooling,
evaluation, benchmarking and the HTTP service."""

import argparse
import json
import os
import sys

from . import evaluation, fusion, runio, synth, topics as topics_mod
from .index import build_index, load_index, save_index
from .ingest import ingest_corpus, iter_records, load_documents, load_passages, write_passages
from .rerank import (
    RerankPipelineConfig,
    build_weight_table,
    load_weight_table,
    rerank,
    save_weight_table,
)
from .retrieval import BM25Params, RM3Params, search_bm25, search_bm25_rm3


def _cmd_ingest(args):
    with open(args.input, encoding="utf-8") as f:
        passages, stats = ingest_corpus(
            iter_records(f), window=args.window, strict=args.strict
        )
    write_passages(passages, args.output)
    print(
        f"documents={stats.n_documents} passages={stats.n_passages} "
        f"sentences={stats.n_sentences} "
        f"mean_passages_per_doc={stats.mean_passages_per_doc:.2f}"
    )


def _cmd_index_build(args):
    passages = load_passages(args.passages)
    index = build_index(passages)
    save_index(index, args.out)
    print(f"indexed {index.n_passages} passages, avgdl={index.avg_length:.2f}")


def _cmd_index_stats(args):
    index = load_index(args.index)
    print(f"passages={index.n_passages}")
    print(f"terms={len(index.postings)}")
    print(f"avgdl={index.avg_length:.4f}")


def _topic_queries(topic, field):
    if field == "question":
        return [topic.question]
    return [topic.keyword_queries[0]]


def _cmd_search(args):
    index = load_index(args.index)
    topic_list = topics_mod.load_topics(args.topics)
    results = []
    for topic in topic_list:
        query = _topic_queries(topic, args.field)[0]
        if args.model == "bm25":
            rl = search_bm25(
                query, args.k, index, BM25Params(args.k1, args.b),
                topic_id=topic.topic_id, run_tag=args.run_tag,
            )
        else:
            rl = search_bm25_rm3(
                query, args.k, index, BM25Params(args.k1, args.b), RM3Params(),
                topic_id=topic.topic_id, run_tag=args.run_tag,
            )
        results.append(rl)
    runio.write_run(results, args.out)
    print(f"wrote {sum(len(r.entries) for r in results)} entries for {len(results)} topics")


def _cmd_weights_build(args):
    index = load_index(args.index)
    titles = {}
    if args.corpus:
        titles = {d.doc_id: d.title for d in load_documents(args.corpus)}
    table = build_weight_table(index, titles)
    save_weight_table(table, args.out)
    print(f"wrote weights for {len(table.weights)} passages")


def _cmd_rerank(args):
    index = load_index(args.index)
    if args.weights == "builtin":
        table = build_weight_table(index)
    else:
        table = load_weight_table(args.weights, index)
    runs = runio.parse_run(args.run)
    topic_list = {t.topic_id: t for t in topics_mod.load_topics(args.topics)}
    out = []
    for topic_id in sorted(runs):
        topic = topic_list.get(topic_id)
        if topic is None:
            print(f"skipping {topic_id}: not in topics file", file=sys.stderr)
            continue
        query = _topic_queries(topic, args.field)[0]
        out.append(rerank(query, runs[topic_id], table))
    runio.write_run(out, args.out)
    print(f"reranked {len(out)} topics")


def _cmd_pool_build(args):
    runs_by_file = [runio.parse_run(path) for path in args.runs]
    topic_list = {t.topic_id: t for t in topics_mod.load_topics(args.topics)}
    os.makedirs(args.out, exist_ok=True)
    n = 0
    with open(os.path.join(args.out, "pools.jsonl"), "w", encoding="utf-8") as f:
        for topic_id in sorted(topic_list):
            per_topic = [runs[topic_id] for runs in runs_by_file if topic_id in runs]
            if not per_topic:
                continue
            pool = fusion.build_pool(topic_id, per_topic, topic_list[topic_id].split)
            f.write(
                json.dumps(
                    {"topic_id": topic_id, "split": pool.split, "queue": list(pool.queue)}
                )
                + "\n"
            )
            n += 1
    print(f"built {n} pools")


def _cmd_pool_export_qrels(args):
    log = []
    with open(args.judgments, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            log.append(
                fusion.Judgment(
                    topic_id=rec["topic_id"],
                    passage_id=rec["passage_id"],
                    grade=int(rec["grade"]),
                    assessor=rec.get("assessor", ""),
                )
            )
    qrels = fusion.judgments_to_qrels(log)
    runio.write_qrels(qrels, args.out)
    print(f"wrote {len(qrels)} qrels lines")


def _cmd_topics_validate(args):
    ts = topics_mod.load_topics(args.file)
    print(f"ok: {len(ts)} topics")


def _cmd_topics_stats(args):
    stats = topics_mod.topic_stats(topics_mod.load_topics(args.file))
    print(f"topics={stats.n_topics}")
    print(f"mean_queries={stats.mean_queries_per_topic:.2f} sd={stats.sd_queries_per_topic:.2f}")
    print(f"mean_question_words={stats.mean_question_len_words:.2f}")
    print(f"mean_query_words={stats.mean_query_len_words:.2f}")


def _cmd_topics_split(args):
    ts = topics_mod.load_topics(args.file)
    qrels = runio.parse_qrels(args.qrels)
    train, test = topics_mod.split_topics(ts, qrels, n_test=args.n_test)
    topics_mod.save_topics(train + test, args.file)
    print(f"train={len(train)} test={len(test)}")


def _cmd_eval(args):
    runs = runio.parse_run(args.run)
    qrels = runio.parse_qrels(args.qrels)
    metrics = args.metrics.split(",")
    report = evaluation.evaluate_run(runs, qrels, metrics, threshold_grade=args.threshold)
    width = max(len(m) for m in metrics)
    if args.per_topic:
        for topic_id in sorted(report.per_topic):
            for m in metrics:
                v = report.per_topic[topic_id].get(m)
                shown = f"{v:.4f}" if v is not None else "skip"
                print(f"{topic_id}\t{m:<{width}}\t{shown}")
    for m in metrics:
        skipped = len(report.skipped.get(m, []))
        note = f"  (skipped {skipped} topics)" if skipped else ""
        print(f"{m:<{width}}  {report.means[m]:.4f}{note}")


def _cmd_sigtest(args):
    runs_a = runio.parse_run(args.run_a)
    runs_b = runio.parse_run(args.run_b)
    qrels = runio.parse_qrels(args.qrels)
    rep_a = evaluation.evaluate_run(runs_a, qrels, [args.metric])
    rep_b = evaluation.evaluate_run(runs_b, qrels, [args.metric])
    shared = sorted(
        t for t in rep_a.per_topic
        if args.metric in rep_a.per_topic[t]
        and t in rep_b.per_topic
        and args.metric in rep_b.per_topic[t]
    )
    a = [rep_a.per_topic[t][args.metric] for t in shared]
    b = [rep_b.per_topic[t][args.metric] for t in shared]
    result = evaluation.paired_t_test(a, b)
    flag = " (degenerate)" if result.degenerate else ""
    print(f"n={len(shared)} t={result.t:.4f} p={result.p:.6f}{flag}")


def _cmd_bench(args):
    import time

    index = load_index(args.index)
    topic_list = topics_mod.load_topics(args.topics)
    queries = [t.question for t in topic_list]
    table = build_weight_table(index)

    def bm25_system(q):
        return search_bm25(q, 1000, index)

    def rerank_system(q):
        from .rerank import pipeline_search

        return pipeline_search(q, index, table, RerankPipelineConfig())

    def cross_encoder_system(q):
        # simulated cross-encoder: fixed per-candidate inference cost
        rl = search_bm25(q, args.ce_depth, index)
        time.sleep(0.020 * len(rl.entries))
        return rl

    systems = {
        "bm25": bm25_system,
        "bm25rm3": lambda q: search_bm25_rm3(q, 1000, index),
        "tilde": rerank_system,
        "cross": cross_encoder_system,
    }
    reports = []
    for name in args.pipeline.split(","):
        rep = evaluation.benchmark_latency(
            systems[name], queries, warmup=args.warmup, repeats=args.repeats,
            system_name=name,
        )
        reports.append(rep)
    print(f"{'system':<10} {'mean ms':>10} {'median ms':>10} {'p95 ms':>10}")
    for rep in reports:
        print(f"{rep.system:<10} {rep.mean_ms:>10.2f} {rep.median_ms:>10.2f} {rep.p95_ms:>10.2f}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            for rep in reports:
                f.write(json.dumps(rep.__dict__) + "\n")


def _cmd_synth(args):
    coll = synth.generate_collection(seed=args.seed, n_docs=args.n_docs, n_topics=args.n_topics)
    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "corpus.jsonl"), "w", encoding="utf-8") as f:
        for d in coll.documents:
            f.write(
                json.dumps(
                    {
                        "doc_id": d.doc_id,
                        "title": d.title,
                        "source_kind": d.source_kind,
                        "body": d.body,
                        "source_url": d.source_url,
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )
    write_passages(coll.passages, os.path.join(args.out, "passages.jsonl"))
    topics_mod.save_topics(coll.topics, os.path.join(args.out, "topics.jsonl"))
    runio.write_qrels(coll.qrels, os.path.join(args.out, "qrels.txt"))
    print(
        f"wrote {len(coll.documents)} docs, {len(coll.passages)} passages, "
        f"{len(coll.topics)} topics to {args.out}"
    )


def _cmd_serve(args):
    import uvicorn

    from .service import SearchService, create_app

    index = load_index(args.index)
    documents = load_documents(args.corpus)
    if args.weights == "builtin":
        table = build_weight_table(index, {d.doc_id: d.title for d in documents})
    else:
        table = load_weight_table(args.weights, index)
    pools = {}
    topics_list = []
    if args.pools:
        with open(args.pools, encoding="utf-8") as f:
            for line in f:
                rec = json.loads(line)
                pools[rec["topic_id"]] = fusion.Pool(
                    topic_id=rec["topic_id"],
                    queue=tuple(rec["queue"]),
                    split=rec["split"],
                )
    if args.topics:
        topics_list = topics_mod.load_topics(args.topics)
    service = SearchService(
        index, table, documents, args.store, pools=pools, topics=topics_list
    )
    uvicorn.run(create_app(service), host=args.host, port=args.port)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="passagesearch")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("ingest", help="split a corpus into passages")
    sp.add_argument("--input", required=True)
    sp.add_argument("--output", required=True)
    sp.add_argument("--window", type=int, default=3)
    sp.add_argument("--strict", action="store_true")
    sp.set_defaults(func=_cmd_ingest)

    sp = sub.add_parser("index", help="build or inspect an index")
    isub = sp.add_subparsers(dest="index_command", required=True)
    b = isub.add_parser("build")
    b.add_argument("--passages", required=True)
    b.add_argument("--out", required=True)
    b.set_defaults(func=_cmd_index_build)
    s = isub.add_parser("stats")
    s.add_argument("--index", required=True)
    s.set_defaults(func=_cmd_index_stats)

    sp = sub.add_parser("search", help="run BM25 or BM25+RM3 over topics")
    sp.add_argument("--index", required=True)
    sp.add_argument("--topics", required=True)
    sp.add_argument("--field", choices=["question", "query"], default="question")
    sp.add_argument("--model", choices=["bm25", "bm25rm3"], default="bm25")
    sp.add_argument("--k", type=int, default=1000)
    sp.add_argument("--k1", type=float, default=0.9)
    sp.add_argument("--b", type=float, default=0.4)
    sp.add_argument("--run-tag", default="bm25")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=_cmd_search)

    sp = sub.add_parser("weights", help="term weight tables")
    wsub = sp.add_subparsers(dest="weights_command", required=True)
    b = wsub.add_parser("build")
    b.add_argument("--index", required=True)
    b.add_argument("--corpus", help="corpus JSONL, for title expansion")
    b.add_argument("--out", required=True)
    b.set_defaults(func=_cmd_weights_build)

    sp = sub.add_parser("rerank", help="rerank a run with a weight table")
    sp.add_argument("--index", required=True)
    sp.add_argument("--weights", required=True, help="weight file or 'builtin'")
    sp.add_argument("--run", required=True)
    sp.add_argument("--topics", required=True)
    sp.add_argument("--field", choices=["question", "query"], default="question")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=_cmd_rerank)

    sp = sub.add_parser("pool", help="fuse runs and export qrels")
    psub = sp.add_subparsers(dest="pool_command", required=True)
    b = psub.add_parser("build")
    b.add_argument("--runs", nargs="+", required=True)
    b.add_argument("--topics", required=True)
    b.add_argument("--out", required=True)
    b.set_defaults(func=_cmd_pool_build)
    e = psub.add_parser("export-qrels")
    e.add_argument("--judgments", required=True)
    e.add_argument("--out", required=True)
    e.set_defaults(func=_cmd_pool_export_qrels)

    sp = sub.add_parser("topics", help="validate, summarize or split topics")
    tsub = sp.add_subparsers(dest="topics_command", required=True)
    v = tsub.add_parser("validate")
    v.add_argument("file")
    v.set_defaults(func=_cmd_topics_validate)
    s = tsub.add_parser("stats")
    s.add_argument("file")
    s.set_defaults(func=_cmd_topics_stats)
    sp2 = tsub.add_parser("split")
    sp2.add_argument("file")
    sp2.add_argument("--qrels", required=True)
    sp2.add_argument("--n-test", type=int, default=50)
    sp2.set_defaults(func=_cmd_topics_split)

    sp = sub.add_parser("eval", help="score a run against qrels")
    sp.add_argument("--run", required=True)
    sp.add_argument("--qrels", required=True)
    sp.add_argument("--metrics", default="ndcg@5,rr,success@3,success@100")
    sp.add_argument("--threshold", type=int, default=1)
    sp.add_argument("--per-topic", action="store_true")
    sp.set_defaults(func=_cmd_eval)

    sp = sub.add_parser("sigtest", help="paired t-test between two runs")
    sp.add_argument("--run-a", required=True)
    sp.add_argument("--run-b", required=True)
    sp.add_argument("--qrels", required=True)
    sp.add_argument("--metric", default="ndcg@5")
    sp.set_defaults(func=_cmd_sigtest)

    sp = sub.add_parser("bench", help="latency benchmark over topic questions")
    sp.add_argument("--index", required=True)
    sp.add_argument("--topics", required=True)
    sp.add_argument("--pipeline", default="bm25,tilde")
    sp.add_argument("--warmup", type=int, default=5)
    sp.add_argument("--repeats", type=int, default=3)
    sp.add_argument("--ce-depth", type=int, default=10)
    sp.add_argument("--out")
    sp.set_defaults(func=_cmd_bench)

    sp = sub.add_parser("synth", help="generate the synthetic desk-scale collection")
    sp.add_argument("--out", required=True)
    sp.add_argument("--seed", type=int, default=42)
    sp.add_argument("--n-docs", type=int, default=500)
    sp.add_argument("--n-topics", type=int, default=50)
    sp.set_defaults(func=_cmd_synth)

    sp = sub.add_parser("serve", help="start the HTTP service")
    sp.add_argument("--index", required=True)
    sp.add_argument("--weights", default="builtin")
    sp.add_argument("--corpus", required=True)
    sp.add_argument("--topics")
    sp.add_argument("--pools")
    sp.add_argument("--store", required=True)
    sp.add_argument("--host", default="127.0.0.1")
    sp.add_argument("--port", type=int, default=8000)
    sp.set_defaults(func=_cmd_serve)

    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    args.func(args)


if __name__ == "__main__":
    main()
