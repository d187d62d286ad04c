"""Dialect scorers: a remote ALDI/NADI service and a deterministic stub."""

import logging
from collections.abc import Mapping
from pathlib import Path
from typing import Self

import httpx
import yaml
from pydantic import BaseModel, ConfigDict, ValidationError
from tenacity import Retrying, before_sleep_log, retry_if_exception_type, stop_after_attempt, wait_exponential

from dialectmbr.exceptions import ConfigurationException, ScorerError, ScorerResponseError, UnknownDialectError
from dialectmbr.models.clients import RemoteBackend, ScorerBackend, StubBackend
from dialectmbr.models.metrics import DialectScore

#: The module logger.
LOGGER = logging.getLogger(__name__)

#: Characters stripped from words before lexicon lookup.
_PUNCTUATION = ".,;:!?\"'()[]{}«»،؛؟…"


class StubScorer:
    """Lexicon-based stand-in for the ALDI and NADI models.

    - ``aldi`` is the share of words that are markers of the target dialect.
    - ``nadi_probs`` are the add-one smoothed marker counts of all configured
      dialects.

    Example:
        >>> scorer = StubScorer(StubBackend(lexicon={"syr": frozenset({"شو"}), "mor": frozenset({"واش"})}))
        >>> score = scorer.score("شو هذا", "syr")
        >>> score.aldi, score.nadi_probs
        (0.5, {'mor': 0.3333333333333333, 'syr': 0.6666666666666666})
    """

    def __init__(self, backend: StubBackend | None = None) -> None:
        self.backend = backend or StubBackend()

    def close(self) -> None:
        """Nothing to release."""

    def __enter__(self) -> Self:
        return self

    def __exit__(self, *exc_info: object) -> None:
        self.close()

    @property
    def backend_id(self) -> str:
        return self.backend.backend_id

    def score(self, text: str, target_dialect: str) -> DialectScore:
        """Score ``text``.

        Raises:
            UnknownDialectError: If ``target_dialect`` is not in the lexicon.
        """
        lexicon = self.backend.lexicon
        if target_dialect not in lexicon:
            raise UnknownDialectError(f"Stub lexicon has no dialect {target_dialect!r}, known: {sorted(lexicon)}")
        words = [word.strip(_PUNCTUATION) for word in text.split()]
        counts = {label: sum(word in markers for word in words) for label, markers in sorted(lexicon.items())}
        aldi = min(1.0, counts[target_dialect] / len(words)) if words else 0.0
        denominator = sum(counts.values()) + len(counts)
        nadi_probs = {label: (count + 1) / denominator for label, count in counts.items()}
        return DialectScore(aldi=aldi, nadi_probs=nadi_probs, target_dialect=target_dialect)


class _ScoreResponse(BaseModel):
    aldi: float
    nadi_probs: dict[str, float]

    model_config = ConfigDict(extra="ignore")


class RemoteScorer:
    """Client of a scorer service answering ``POST /score``.

    Args:
        backend: Connection settings.
        client: HTTP client to use; one is created (and owned) if not given.
    """

    def __init__(self, backend: RemoteBackend, *, client: httpx.Client | None = None) -> None:
        self.backend = backend
        self._headers = {"Authorization": f"Bearer {backend.api_key}"} if backend.api_key else {}
        self.client = client or httpx.Client(timeout=backend.timeout)
        self._owns_client = client is None

    def close(self) -> None:
        """Close the HTTP client if it was created here."""
        if self._owns_client:
            self.client.close()

    def __enter__(self) -> Self:
        return self

    def __exit__(self, *exc_info: object) -> None:
        self.close()

    @property
    def backend_id(self) -> str:
        return self.backend.backend_id

    def _request(self, text: str, target_dialect: str) -> bytes:
        url = self.backend.endpoint.rstrip("/") + "/score"
        body = {"text": text, "target_dialect": target_dialect}
        try:
            response = self.client.post(url, json=body, headers=self._headers)
        except httpx.TransportError as e:
            raise ScorerError(f"Scorer service unreachable: {e}") from e
        if not response.is_success:
            raise ScorerError(f"Scorer service answered {response.status_code}")
        return response.content

    def score(self, text: str, target_dialect: str) -> DialectScore:
        """Score ``text`` with one request.

        Raises:
            ScorerError: If the service stays unreachable or fails after all retries.
            ScorerResponseError: If the response violates the contract.
            UnknownDialectError: If the response has no probability for ``target_dialect``.
        """
        retrying = Retrying(
            stop=stop_after_attempt(self.backend.max_retries + 1),
            wait=wait_exponential(multiplier=self.backend.retry_backoff, max=60),
            retry=retry_if_exception_type(ScorerError),
            before_sleep=before_sleep_log(LOGGER, logging.WARNING),
            reraise=True,
        )
        content = retrying(self._request, text, target_dialect)
        try:
            raw = _ScoreResponse.model_validate_json(content)
            score = DialectScore(aldi=raw.aldi, nadi_probs=raw.nadi_probs, target_dialect=target_dialect)
        except ValidationError as e:
            raise ScorerResponseError(f"Scorer response violates the contract: {e}") from e
        if score.target_probability is None:
            raise UnknownDialectError(f"Scorer reported no probability for dialect {target_dialect!r}")
        return score


def build_scorer(backend: ScorerBackend, *, client: httpx.Client | None = None) -> StubScorer | RemoteScorer:
    """Create the scorer for a backend configuration; use it as context manager to release connections."""
    match backend:
        case StubBackend():
            return StubScorer(backend)
        case RemoteBackend():
            return RemoteScorer(backend, client=client)
    raise ConfigurationException(f"Unknown scorer backend {backend!r}")  # pragma: no cover


def score_text(
    text: str, target_dialect: str, backend: ScorerBackend, *, client: httpx.Client | None = None
) -> DialectScore:
    """Score a single text with the given backend."""
    with build_scorer(backend, client=client) as scorer:
        return scorer.score(text, target_dialect)


def lexicon_from_mapping(data: object) -> dict[str, frozenset[str]]:
    """Validate a ``{dialect: [marker, ...]}`` mapping."""
    if not isinstance(data, Mapping) or not all(
        isinstance(markers, list) and all(isinstance(m, str) for m in markers) for markers in data.values()
    ):
        raise ConfigurationException("Lexicon must map dialect labels to lists of marker strings")
    return {str(label): frozenset(markers) for label, markers in data.items()}


def load_lexicon(path: str | Path) -> dict[str, frozenset[str]]:
    """Load a stub lexicon from a YAML or JSON file."""
    with open(path, encoding="utf-8") as inputf:
        try:
            data = yaml.safe_load(inputf)
        except yaml.YAMLError as e:
            raise ConfigurationException(f"Cannot parse lexicon file {path}: {e}") from e
    lexicon = lexicon_from_mapping(data)
    LOGGER.info("Loaded lexicon for dialects %s from %s", sorted(lexicon), path)
    return lexicon
