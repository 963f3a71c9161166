import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from passagesearch import build_index, synth
from passagesearch.ingest import Passage


@pytest.fixture(scope="session")
def small_collection():
    return synth.generate_collection(seed=11, n_docs=60, n_topics=8)


@pytest.fixture(scope="session")
def small_index(small_collection):
    return build_index(small_collection.passages)


def make_passages(texts, doc_id="d1"):
    """Bare passages from plain strings, for hand-built corpora."""
    return [
        Passage(
            passage_id=f"{doc_id}-{i}",
            doc_id=doc_id,
            ordinal=i,
            text=text,
        )
        for i, text in enumerate(texts, start=1)
    ]
