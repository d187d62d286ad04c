"""Clients of the generation server and the dialect scorer."""

from dialectmbr.clients.generation import GenerationClient, generate_candidates
from dialectmbr.clients.scorer import RemoteScorer, StubScorer, build_scorer, load_lexicon, score_text

__all__ = [
    "GenerationClient",
    "RemoteScorer",
    "StubScorer",
    "build_scorer",
    "generate_candidates",
    "load_lexicon",
    "score_text",
]
