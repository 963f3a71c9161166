"""Graded-relevance metrics, paired significance testing and a
query-latency benchmark harness.

Metric conventions: exponential-gain nDCG (2^g - 1, log2 discount),
unjudged passages count as grade 0, and topics with no positive grade
are skipped for nDCG (the skip count is disclosed in the report).
"""

import math
import statistics
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

from scipy import stats as scipy_stats

from .errors import DegenerateInput, NoRelevantInQrels
from .retrieval import RankedList

DEFAULT_METRICS = ("ndcg@5", "rr", "success@3", "success@100")
DEFAULT_THRESHOLD = 1  # marginal counts as relevant for rr/success


def _grades_for_topic(qrels: dict[tuple[str, str], int], topic_id: str) -> dict[str, int]:
    return {pid: g for (t, pid), g in qrels.items() if t == topic_id}


def ndcg_at_k(ranked: RankedList, qrels: dict[tuple[str, str], int], k: int = 5) -> float:
    """Exponential-gain nDCG@k; raises NoRelevantInQrels when the topic
    has no positive grade (undefined, excluded from means)."""
    grades = _grades_for_topic(qrels, ranked.topic_id)
    ideal = sorted((g for g in grades.values() if g > 0), reverse=True)[:k]
    if not ideal:
        raise NoRelevantInQrels(ranked.topic_id)
    dcg = 0.0
    for i, (pid, _, _) in enumerate(ranked.entries[:k], start=1):
        g = grades.get(pid, 0)
        dcg += (2**g - 1) / math.log2(i + 1)
    idcg = sum((2**g - 1) / math.log2(i + 1) for i, g in enumerate(ideal, start=1))
    return dcg / idcg


def reciprocal_rank(
    ranked: RankedList,
    qrels: dict[tuple[str, str], int],
    threshold_grade: int = DEFAULT_THRESHOLD,
) -> float:
    grades = _grades_for_topic(qrels, ranked.topic_id)
    for pid, rank, _ in ranked.entries:
        if grades.get(pid, 0) >= threshold_grade:
            return 1.0 / rank
    return 0.0


def success_at_k(
    ranked: RankedList,
    qrels: dict[tuple[str, str], int],
    k: int,
    threshold_grade: int = DEFAULT_THRESHOLD,
) -> int:
    grades = _grades_for_topic(qrels, ranked.topic_id)
    for pid, rank, _ in ranked.entries[:k]:
        if grades.get(pid, 0) >= threshold_grade:
            return 1
    return 0


@dataclass
class EvalReport:
    run_tag: str
    metrics: tuple[str, ...]
    per_topic: dict[str, dict[str, float]] = field(default_factory=dict)
    means: dict[str, float] = field(default_factory=dict)
    skipped: dict[str, list[str]] = field(default_factory=dict)  # metric -> topic_ids


def _parse_metric(name: str) -> tuple[str, int | None]:
    if "@" in name:
        base, k_s = name.split("@", 1)
        return base, int(k_s)
    return name, None


def compute_metric(
    name: str,
    ranked: RankedList,
    qrels: dict[tuple[str, str], int],
    threshold_grade: int = DEFAULT_THRESHOLD,
) -> float:
    base, k = _parse_metric(name)
    if base == "ndcg":
        return ndcg_at_k(ranked, qrels, k=k or 5)
    if base == "rr":
        return reciprocal_rank(ranked, qrels, threshold_grade)
    if base == "success":
        return float(success_at_k(ranked, qrels, k or 10, threshold_grade))
    raise ValueError(f"unknown metric {name!r}")


def evaluate_run(
    run: dict[str, RankedList],
    qrels: dict[tuple[str, str], int],
    metrics: Sequence[str] = DEFAULT_METRICS,
    threshold_grade: int = DEFAULT_THRESHOLD,
) -> EvalReport:
    """Per-topic metric values and arithmetic means; topics where a
    metric is undefined are skipped for that metric and counted."""
    topic_ids = sorted(run)
    run_tag = next(iter(run.values())).run_tag if run else "run"
    report = EvalReport(run_tag=run_tag, metrics=tuple(metrics))
    for topic_id in topic_ids:
        report.per_topic[topic_id] = {}
        for metric in metrics:
            try:
                value = compute_metric(metric, run[topic_id], qrels, threshold_grade)
            except NoRelevantInQrels:
                report.skipped.setdefault(metric, []).append(topic_id)
                continue
            report.per_topic[topic_id][metric] = value
    for metric in metrics:
        values = [
            vals[metric] for vals in report.per_topic.values() if metric in vals
        ]
        report.means[metric] = sum(values) / len(values) if values else 0.0
    return report


@dataclass(frozen=True)
class TTestResult:
    t: float
    p: float
    degenerate: bool = False


def paired_t_test(scores_a: Sequence[float], scores_b: Sequence[float]) -> TTestResult:
    """Two-sided paired t-test on per-topic score differences."""
    if len(scores_a) != len(scores_b):
        raise DegenerateInput("paired samples must have equal length")
    n = len(scores_a)
    if n < 2:
        return TTestResult(t=0.0, p=1.0, degenerate=True)
    diffs = [a - b for a, b in zip(scores_a, scores_b)]
    mean = sum(diffs) / n
    var = sum((d - mean) ** 2 for d in diffs) / (n - 1)
    if var == 0.0:
        return TTestResult(t=0.0, p=1.0, degenerate=True)
    t = mean / math.sqrt(var / n)
    p = 2.0 * scipy_stats.t.sf(abs(t), df=n - 1)
    return TTestResult(t=t, p=p)


@dataclass
class LatencyReport:
    system: str
    mean_ms: float
    median_ms: float
    p95_ms: float
    n_queries: int
    warmup_queries: int


def _percentile(sorted_values: list[float], q: float) -> float:
    # nearest-rank percentile; guarantees p95 >= median
    idx = max(0, math.ceil(q * len(sorted_values)) - 1)
    return sorted_values[idx]


def benchmark_latency(
    system: Callable[[str], RankedList],
    queries: Sequence[str],
    warmup: int = 5,
    repeats: int = 3,
    system_name: str = "system",
) -> LatencyReport:
    """Best-of-repeats wall time per query on a monotonic clock.

    Runs `warmup` unmeasured queries first, then each query `repeats`
    times, keeping the minimum to suppress scheduler jitter. Must run
    single-threaded relative to the system under test.
    """
    if not queries:
        raise ValueError("queries must be non-empty")
    for q in list(queries)[:warmup]:
        system(q)
    times_ms: list[float] = []
    for q in queries:
        best = math.inf
        for _ in range(repeats):
            t0 = time.perf_counter()
            system(q)
            best = min(best, (time.perf_counter() - t0) * 1000.0)
        times_ms.append(best)
    ordered = sorted(times_ms)
    return LatencyReport(
        system=system_name,
        mean_ms=sum(times_ms) / len(times_ms),
        median_ms=statistics.median(times_ms),
        p95_ms=_percentile(ordered, 0.95),
        n_queries=len(queries),
        warmup_queries=warmup,
    )
