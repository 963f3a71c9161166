"""Reciprocal rank fusion and pooled judging queues.

Pools are built by fusing system runs with RRF and truncating at depth
100, the judging ceiling. next_for_judgment implements the assessment
stopping rules: train topics take the top 10 regardless of relevance;
test topics run to rank 20, then continue until the first fully
relevant judgment or rank 100.
"""

import time
from dataclasses import dataclass, field

from .errors import NonPrefixJudgments, TopicMismatch
from .retrieval import RankedList

RRF_K = 60
POOL_DEPTH = 100
TRAIN_JUDGE_DEPTH = 10
TEST_MIN_DEPTH = 20
# "relevant" in the test stopping rule means the full grade, not marginal
DEFAULT_STOP_GRADE = 2

GRADE_NON_RELEVANT = 0
GRADE_MARGINAL = 1
GRADE_RELEVANT = 2

DONE = object()  # sentinel returned when a pool needs no more judgments


@dataclass(frozen=True)
class Judgment:
    topic_id: str
    passage_id: str
    grade: int
    assessor: str = ""
    timestamp: float = field(default_factory=time.time)

    def __post_init__(self):
        if self.grade not in (0, 1, 2):
            raise ValueError(f"grade must be 0, 1 or 2, got {self.grade}")


@dataclass(frozen=True)
class Pool:
    topic_id: str
    queue: tuple[str, ...]
    split: str  # "train" | "test"


def rrf_fuse(runs: list[RankedList], k_rrf: int = RRF_K) -> RankedList:
    """score(p) = sum over runs containing p of 1 / (k_rrf + rank)."""
    if not runs:
        raise ValueError("need at least one run")
    topic_id = runs[0].topic_id
    for run in runs:
        if run.topic_id != topic_id:
            raise TopicMismatch(f"{run.topic_id} != {topic_id}")
    ranks: dict[str, list[int]] = {}
    for run in runs:
        for pid, rank, _ in run.entries:
            ranks.setdefault(pid, []).append(rank)
    # summation in sorted rank order keeps fusion bit-exactly symmetric
    # under permutation of the run list
    scores = {
        pid: sum(1.0 / (k_rrf + r) for r in sorted(rs)) for pid, rs in ranks.items()
    }
    ordered = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
    entries = [(pid, rank, score) for rank, (pid, score) in enumerate(ordered, start=1)]
    return RankedList(topic_id=topic_id, entries=entries, run_tag="rrf")


def build_pool(topic_id: str, runs: list[RankedList], split: str) -> Pool:
    if split not in ("train", "test"):
        raise ValueError(f"split must be train or test, got {split!r}")
    fused = rrf_fuse(runs)
    if fused.topic_id != topic_id:
        raise TopicMismatch(f"{fused.topic_id} != {topic_id}")
    return Pool(topic_id=topic_id, queue=tuple(fused.passage_ids()[:POOL_DEPTH]), split=split)


def next_for_judgment(
    pool: Pool,
    judgments: list[Judgment],
    stop_grade: int = DEFAULT_STOP_GRADE,
):
    """Next passage to judge, or DONE.

    judgments must cover a prefix of the pool queue (in any order).
    """
    for j in judgments:
        if j.topic_id != pool.topic_id:
            raise NonPrefixJudgments(f"judgment for wrong topic {j.topic_id}")
    n = len(judgments)
    judged = {j.passage_id for j in judgments}
    if judged != set(pool.queue[:n]):
        raise NonPrefixJudgments("judgments are not a prefix of the pool queue")
    if n >= len(pool.queue):
        return DONE
    if pool.split == "train":
        return pool.queue[n] if n < TRAIN_JUDGE_DEPTH else DONE
    # test split
    if n < TEST_MIN_DEPTH:
        return pool.queue[n]
    if any(j.grade >= stop_grade for j in judgments):
        return DONE
    if n >= POOL_DEPTH:
        return DONE
    return pool.queue[n]


def latest_judgments(log: list[Judgment]) -> dict[tuple[str, str, str], Judgment]:
    """Replay an append-only judgment log; the latest entry per
    (topic, passage, assessor) wins."""
    out: dict[tuple[str, str, str], Judgment] = {}
    for j in log:
        out[(j.topic_id, j.passage_id, j.assessor)] = j
    return out


def judgments_to_qrels(log: list[Judgment]) -> dict[tuple[str, str], int]:
    """Collapse a judgment log into qrels (latest judgment wins)."""
    qrels: dict[tuple[str, str], int] = {}
    for j in latest_judgments(log).values():
        qrels[(j.topic_id, j.passage_id)] = j.grade
    return qrels
