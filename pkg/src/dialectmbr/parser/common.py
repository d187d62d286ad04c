"""Shared configuration for the archive parser."""

from pydantic import BaseModel, ConfigDict


class ArchiveParserConfiguration(BaseModel):
    """Configuration for reading safetensors archives."""

    #: Upper bound for the JSON header size in bytes.
    max_header_size: int = 100_000_000
    #: Whether a payload with bytes not covered by any tensor is accepted.
    allow_gaps: bool = True
    #: Whether widening F16/BF16 tensors to F32 issues a warning.
    warn_on_widening: bool = True

    model_config = ConfigDict(
        frozen=True,
    )
