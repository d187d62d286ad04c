import json
import random
from pathlib import Path

import pytest

from dialectmbr.models.candidates import CandidateSet
from dialectmbr.models.clients import DEFAULT_LEXICON

#: Dialect-neutral vocabulary the synthetic candidates are built from.
NEUTRAL_WORDS = ["هذا", "كتاب", "في", "البيت", "ذهب", "إلى", "السوق", "مع", "صديقه", "اليوم", "جميل", "جدا"]


def synthetic_corpus(num_prompts: int, num_candidates: int, dialect: str = "syr", seed: int = 0) -> list[CandidateSet]:
    """Candidate sets where some candidates carry planted dialect markers.

    Every candidate is a shuffled neutral sentence; with probability 0.3 each
    candidate gets one to three markers of ``dialect`` inserted.
    """
    rng = random.Random(seed)
    markers = sorted(DEFAULT_LEXICON[dialect])
    sets = []
    for i in range(num_prompts):
        base = rng.sample(NEUTRAL_WORDS, 6)
        texts = []
        for _ in range(num_candidates):
            words = list(base)
            rng.shuffle(words)
            if rng.random() < 0.3:
                for _ in range(rng.randint(1, 3)):
                    words.insert(rng.randrange(len(words) + 1), rng.choice(markers))
            texts.append(" ".join(words))
        sets.append(CandidateSet.from_texts(f"p{i:03d}", " ".join(base), texts))
    return sets


@pytest.fixture
def make_corpus():
    """Factory of synthetic candidate sets."""
    return synthetic_corpus


@pytest.fixture
def corpus_file(tmp_path) -> Path:
    """A candidates file with 30 prompts and 8 candidates each."""
    path = tmp_path / "candidates.jsonl"
    with open(path, "w", encoding="utf-8") as outputf:
        for cset in synthetic_corpus(30, 8, seed=7):
            record = {"prompt_id": cset.prompt_id, "source": cset.source, "candidates": cset.texts}
            outputf.write(json.dumps(record, ensure_ascii=False) + "\n")
    return path
