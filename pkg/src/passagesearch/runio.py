"""Run and qrels file formats.

Run lines: `<topic_id> Q0 <passage_id> <rank> <score:6-decimal> <run_tag>`
Qrels lines: `<topic_id> 0 <passage_id> <grade>`
"""

from typing import Iterable

from .errors import DuplicateEntry, MalformedLine
from .retrieval import RankedList


def format_run(ranked: RankedList) -> str:
    lines = [
        f"{ranked.topic_id} Q0 {pid} {rank} {score:.6f} {ranked.run_tag}"
        for pid, rank, score in ranked.entries
    ]
    return "\n".join(lines) + ("\n" if lines else "")


def write_run(ranked_lists: Iterable[RankedList], path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for rl in ranked_lists:
            f.write(format_run(rl))


def parse_run_lines(lines: Iterable[str]) -> dict[str, RankedList]:
    """Parse run lines into per-topic RankedLists, validating dense
    ranks and rejecting duplicate (topic, passage) pairs."""
    runs: dict[str, RankedList] = {}
    seen: set[tuple[str, str]] = set()
    for line_no, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 6 or parts[1] != "Q0":
            raise MalformedLine(line_no, f"bad run line: {line!r}")
        topic_id, _, pid, rank_s, score_s, tag = parts
        try:
            rank = int(rank_s)
            score = float(score_s)
        except ValueError:
            raise MalformedLine(line_no, f"bad rank/score: {line!r}") from None
        if (topic_id, pid) in seen:
            raise DuplicateEntry(f"{topic_id}/{pid}")
        seen.add((topic_id, pid))
        rl = runs.setdefault(topic_id, RankedList(topic_id=topic_id, run_tag=tag))
        if rank != len(rl.entries) + 1:
            raise MalformedLine(
                line_no, f"rank {rank} not dense (expected {len(rl.entries) + 1})"
            )
        rl.entries.append((pid, rank, score))
    return runs


def parse_run(path) -> dict[str, RankedList]:
    with open(path, encoding="utf-8") as f:
        return parse_run_lines(f)


def format_qrels(qrels: dict[tuple[str, str], int]) -> str:
    lines = [
        f"{topic_id} 0 {pid} {grade}"
        for (topic_id, pid), grade in sorted(qrels.items())
    ]
    return "\n".join(lines) + ("\n" if lines else "")


def write_qrels(qrels: dict[tuple[str, str], int], path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(format_qrels(qrels))


def parse_qrels_lines(lines: Iterable[str]) -> dict[tuple[str, str], int]:
    qrels: dict[tuple[str, str], int] = {}
    for line_no, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 4:
            raise MalformedLine(line_no, f"bad qrels line: {line!r}")
        topic_id, _, pid, grade_s = parts
        try:
            grade = int(grade_s)
        except ValueError:
            raise MalformedLine(line_no, f"bad grade: {grade_s!r}") from None
        if grade not in (0, 1, 2):
            raise MalformedLine(line_no, f"grade out of range: {grade}")
        if (topic_id, pid) in qrels:
            raise DuplicateEntry(f"{topic_id}/{pid}")
        qrels[(topic_id, pid)] = grade
    return qrels


def parse_qrels(path) -> dict[tuple[str, str], int]:
    with open(path, encoding="utf-8") as f:
        return parse_qrels_lines(f)
