"""Configuration of the generation server and dialect scorer backends."""

from typing import Annotated, Literal, Self

from pydantic import BaseModel, ConfigDict, Field, model_validator

#: Marker tokens of the built-in stub lexicon.
DEFAULT_LEXICON: dict[str, frozenset[str]] = {
    "syr": frozenset({"شو", "هلق", "كتير", "هيك", "بدي", "منيح", "هون", "تبع"}),
    "mor": frozenset({"واش", "دابا", "بزاف", "ديال", "كيفاش", "مزيان", "شنو", "بغيت"}),
    "sau": frozenset({"وش", "الحين", "مره", "ابغى", "زين", "كذا", "يبي", "عشان"}),
}


class GenConfig(BaseModel):
    """Sampling configuration for an OpenAI-compatible chat-completions endpoint."""

    #: Base URL of the server; ``/chat/completions`` is appended.
    endpoint: str = "http://localhost:8000/v1"
    #: Model name sent with every request.
    model: str = "default"
    #: Number of candidates sampled per prompt.
    num_candidates: Annotated[int, Field(ge=1)] = 20
    #: Sampling temperature.
    temperature: Annotated[float, Field(gt=0.0)] = 0.9
    #: Nucleus sampling mass.
    top_p: Annotated[float, Field(gt=0.0, le=1.0)] = 0.95
    #: Maximal number of generated tokens per candidate.
    max_tokens: Annotated[int, Field(ge=1)] = 512
    #: Candidate ``i`` is requested with seed ``seed_base + i`` if set.
    seed_base: int | None = None
    #: Per-request timeout in seconds.
    timeout: Annotated[float, Field(gt=0.0)] = 60.0
    #: Number of retries after the first failed attempt of a request.
    max_retries: Annotated[int, Field(ge=0)] = 3
    #: Initial back-off in seconds, doubled with every retry.
    retry_backoff: Annotated[float, Field(ge=0.0)] = 1.0
    #: Maximal number of concurrent candidate requests; the pipeline sets it from its ``jobs``.
    max_in_flight: Annotated[int, Field(ge=1)] = 4
    #: Optional bearer token, never logged.
    api_key: str | None = None

    model_config = ConfigDict(frozen=True)


class StubBackend(BaseModel):
    """Deterministic lexicon-based scorer; a test double, not a model.

    Example:
        >>> sorted(StubBackend().lexicon)
        ['mor', 'sau', 'syr']
    """

    kind: Literal["stub"] = "stub"
    #: Marker tokens per dialect label.
    lexicon: dict[str, frozenset[str]] = Field(default_factory=lambda: dict(DEFAULT_LEXICON))

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check_lexicon(self) -> Self:
        if not self.lexicon:
            raise ValueError("stub lexicon must configure at least one dialect")
        empty = sorted(label for label, markers in self.lexicon.items() if not markers)
        if empty:
            raise ValueError(f"stub lexicon has no markers for dialects {empty}")
        return self

    @property
    def backend_id(self) -> str:
        """Identifier recorded in report fingerprints."""
        return "stub:" + ",".join(sorted(self.lexicon))


class RemoteBackend(BaseModel):
    """Scorer service answering ``POST /score``."""

    kind: Literal["remote"] = "remote"
    #: Base URL of the scorer service.
    endpoint: str = "http://localhost:8100"
    #: Per-request timeout in seconds.
    timeout: Annotated[float, Field(gt=0.0)] = 30.0
    #: Number of retries after the first failed attempt.
    max_retries: Annotated[int, Field(ge=0)] = 3
    #: Initial back-off in seconds, doubled with every retry.
    retry_backoff: Annotated[float, Field(ge=0.0)] = 1.0
    #: Optional bearer token, never logged.
    api_key: str | None = None

    model_config = ConfigDict(frozen=True)

    @property
    def backend_id(self) -> str:
        """Identifier recorded in report fingerprints."""
        return f"remote:{self.endpoint}"


#: Scorer backend configuration, discriminated on ``kind``.
ScorerBackend = Annotated[StubBackend | RemoteBackend, Field(discriminator="kind")]
