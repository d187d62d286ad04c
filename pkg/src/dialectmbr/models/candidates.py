"""Candidate sets sampled for one prompt and the result of selecting from them."""

from typing import Annotated, Any, Self

from pydantic import BaseModel, ConfigDict, Field, model_validator

from dialectmbr.models.common import ObjectiveKind


class Prompt(BaseModel):
    """An input prompt as read from a prompts JSONL file."""

    #: Identifier carried through to selections and reports.
    prompt_id: str
    #: The prompt or source sentence.
    source: str

    model_config = ConfigDict(frozen=True)


class Candidate(BaseModel):
    """A single sampled model output."""

    #: Position in sampling order.
    index: Annotated[int, Field(ge=0)]
    #: The generated text.
    text: str
    #: Optional sampling metadata (seed, logprobs).
    meta: dict[str, Any] | None = None

    model_config = ConfigDict(frozen=True)


class CandidateSet(BaseModel):
    """All candidates sampled for one prompt.

    Example:
        >>> cset = CandidateSet.from_texts("p1", "source", ["a", "b"])
        >>> [c.index for c in cset.candidates]
        [0, 1]
    """

    #: Identifier of the prompt.
    prompt_id: str
    #: The input prompt or source sentence.
    source: str
    #: Candidates in sampling order.
    candidates: list[Candidate]

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check_candidates(self) -> Self:
        if not self.candidates:
            raise ValueError(f"Candidate set {self.prompt_id!r} is empty")
        for position, candidate in enumerate(self.candidates):
            if candidate.index != position:
                raise ValueError(
                    f"Candidate set {self.prompt_id!r}: candidate at position {position} has index {candidate.index}"
                )
        return self

    @classmethod
    def from_texts(cls, prompt_id: str, source: str, texts: list[str]) -> "CandidateSet":
        """Build a set whose indices follow the order of ``texts``."""
        return cls(
            prompt_id=prompt_id,
            source=source,
            candidates=[Candidate(index=i, text=text) for i, text in enumerate(texts)],
        )

    @property
    def texts(self) -> list[str]:
        """Candidate texts in index order."""
        return [candidate.text for candidate in self.candidates]

    def __len__(self) -> int:
        return len(self.candidates)


class SelectionResult(BaseModel):
    """The candidate chosen for one prompt together with all candidate scores."""

    #: Identifier of the prompt.
    prompt_id: str
    #: Index of the chosen candidate.
    chosen_index: Annotated[int, Field(ge=0)]
    #: Text of the chosen candidate.
    chosen_text: str
    #: One score per candidate, in candidate order.
    scores: list[float]
    #: The objective the scores were computed with.
    objective: ObjectiveKind

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check_choice(self) -> Self:
        if self.chosen_index >= len(self.scores):
            raise ValueError(f"chosen_index {self.chosen_index} out of range for {len(self.scores)} scores")
        best = max(self.scores)
        if self.scores.index(best) != self.chosen_index:
            raise ValueError("chosen_index must be the smallest index attaining the maximal score")
        return self
