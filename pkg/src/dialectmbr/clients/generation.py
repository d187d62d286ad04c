"""Candidate sampling from an OpenAI-compatible chat-completions server.

Each of the ``N`` candidates of a prompt is an independent request; candidate
``i`` carries seed ``seed_base + i`` when a seed base is configured.  Failed
requests are retried individually.  A prompt yields either all ``N``
candidates, in request order, or an error.
"""

import logging
from typing import Any, Self

import httpx
from pydantic import BaseModel, ConfigDict, Field, ValidationError
from tenacity import Retrying, before_sleep_log, retry_if_exception_type, stop_after_attempt, wait_exponential

from dialectmbr.exceptions import (
    GenerationError,
    GenerationStatusError,
    GenerationTransportError,
    MalformedGenerationResponseError,
)
from dialectmbr.models.candidates import Candidate, CandidateSet
from dialectmbr.models.clients import GenConfig
from dialectmbr.utils import ordered_map

#: The module logger.
LOGGER = logging.getLogger(__name__)


class _Message(BaseModel):
    content: str

    model_config = ConfigDict(extra="ignore")


class _Choice(BaseModel):
    message: _Message

    model_config = ConfigDict(extra="ignore")


class _ChatCompletion(BaseModel):
    choices: list[_Choice] = Field(min_length=1)

    model_config = ConfigDict(extra="ignore")


class GenerationClient:
    """Samples candidate sets from a chat-completions endpoint.

    Args:
        config: Sampling and connection settings.
        client: HTTP client to use; one is created (and owned) if not given.
    """

    def __init__(self, config: GenConfig, *, client: httpx.Client | None = None) -> None:
        self.config = config
        self._headers = {"Authorization": f"Bearer {config.api_key}"} if config.api_key else {}
        self.client = client or httpx.Client(timeout=config.timeout)
        self._owns_client = client is None

    def close(self) -> None:
        """Close the HTTP client if it was created here."""
        if self._owns_client:
            self.client.close()

    def __enter__(self) -> Self:
        return self

    def __exit__(self, *exc_info: object) -> None:
        self.close()

    def _body(self, prompt: str, index: int) -> dict[str, Any]:
        body: dict[str, Any] = {
            "model": self.config.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.config.temperature,
            "top_p": self.config.top_p,
            "max_tokens": self.config.max_tokens,
        }
        if self.config.seed_base is not None:
            body["seed"] = self.config.seed_base + index
        return body

    def _request(self, prompt: str, prompt_id: str, index: int) -> str:
        url = self.config.endpoint.rstrip("/") + "/chat/completions"
        try:
            response = self.client.post(url, json=self._body(prompt, index), headers=self._headers)
        except httpx.TransportError as e:
            raise GenerationTransportError(str(e), prompt_id=prompt_id, candidate_index=index) from e
        if not response.is_success:
            raise GenerationStatusError(
                f"server answered {response.status_code}", prompt_id=prompt_id, candidate_index=index
            )
        try:
            completion = _ChatCompletion.model_validate_json(response.content)
        except ValidationError as e:
            raise MalformedGenerationResponseError(
                f"unexpected response body: {e}", prompt_id=prompt_id, candidate_index=index
            ) from e
        return completion.choices[0].message.content

    def sample(self, prompt: str, prompt_id: str, index: int) -> Candidate:
        """Request candidate ``index`` of a prompt, retrying failed attempts."""
        retrying = Retrying(
            stop=stop_after_attempt(self.config.max_retries + 1),
            wait=wait_exponential(multiplier=self.config.retry_backoff, max=60),
            retry=retry_if_exception_type(GenerationError),
            before_sleep=before_sleep_log(LOGGER, logging.WARNING),
            reraise=True,
        )
        text = retrying(self._request, prompt, prompt_id, index)
        LOGGER.debug("Prompt %s: received candidate %d", prompt_id, index)
        meta = {"seed": self.config.seed_base + index} if self.config.seed_base is not None else None
        return Candidate(index=index, text=text, meta=meta)

    def generate_candidates(self, prompt: str, prompt_id: str) -> CandidateSet:
        """Sample ``num_candidates`` candidates for one prompt.

        Raises:
            GenerationError: If any candidate request still fails after all retries.
        """
        try:
            candidates = list(
                ordered_map(
                    lambda index: self.sample(prompt, prompt_id, index),
                    range(self.config.num_candidates),
                    self.config.max_in_flight,
                )
            )
        except GenerationError as e:
            LOGGER.error("Sampling for prompt %s failed: %s", prompt_id, e)
            raise
        return CandidateSet(prompt_id=prompt_id, source=prompt, candidates=candidates)


def generate_candidates(
    prompt: str, prompt_id: str, config: GenConfig, client: httpx.Client | None = None
) -> CandidateSet:
    """Sample a candidate set for ``prompt``.

    Args:
        prompt: The prompt or source sentence.
        prompt_id: Identifier of the prompt.
        config: Sampling and connection settings.
        client: Optional HTTP client (e.g. with a mock transport).

    Returns:
        A set with exactly ``config.num_candidates`` candidates.
    """
    with GenerationClient(config, client=client) as generator:
        return generator.generate_candidates(prompt, prompt_id)
