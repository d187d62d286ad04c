"""Interpretation of tensor archives as LoRA adapters.

Adapter archives name their factors ``<target>.lora_A.weight`` and
``<target>.lora_B.weight``.  The LoRA ``alpha`` and rank ``r`` are taken
from, in this order: explicit overrides, the archive metadata keys
``lora_alpha`` / ``r``, the adapter configuration stored next to the
archive.  Without any source the rank falls back to the factor shapes while
a missing alpha is an error.
"""

import logging
from collections.abc import Mapping
from typing import Any

from pydantic import ValidationError

from dialectmbr.exceptions import AdapterFormatError
from dialectmbr.models.tensors import LoraAdapter, LoraPair, TensorArchive

#: The module logger.
LOGGER = logging.getLogger(__name__)

#: Suffix of the down projection factor.
LORA_A_SUFFIX = ".lora_A.weight"
#: Suffix of the up projection factor.
LORA_B_SUFFIX = ".lora_B.weight"
#: Metadata key of the LoRA alpha.
ALPHA_KEY = "lora_alpha"
#: Metadata key of the LoRA rank.
RANK_KEY = "r"


def _resolve(
    key: str, override: float | None, metadata: Mapping[str, str], adapter_config: Mapping[str, Any]
) -> float | None:
    if override is not None:
        return override
    for source in (metadata, adapter_config):
        if key in source:
            try:
                return float(source[key])
            except (TypeError, ValueError) as e:
                raise AdapterFormatError(f"LoRA parameter {key!r} is not a number: {source[key]!r}") from e
    return None


class Parser:
    """Groups the factors of an adapter archive into :class:`LoraPair` objects."""

    def __init__(
        self,
        *,
        alpha: float | None = None,
        rank: int | None = None,
        adapter_config: Mapping[str, Any] | None = None,
    ) -> None:
        self.alpha = alpha
        self.rank = rank
        self.adapter_config = adapter_config or {}

    def parse(self, *, archive: TensorArchive) -> LoraAdapter:
        """Convert the archive into a LoRA adapter.

        Raises:
            AdapterFormatError: On unpaired factors, a missing alpha or inconsistent shapes.
        """
        factors_a: dict[str, Any] = {}
        factors_b: dict[str, Any] = {}
        for name, entry in archive.tensors.items():
            if name.endswith(LORA_A_SUFFIX):
                factors_a[name.removesuffix(LORA_A_SUFFIX)] = entry.data
            elif name.endswith(LORA_B_SUFFIX):
                factors_b[name.removesuffix(LORA_B_SUFFIX)] = entry.data
            else:
                LOGGER.warning("Ignoring non-LoRA tensor %s", name)

        unpaired = sorted(factors_a.keys() ^ factors_b.keys())
        if unpaired:
            raise AdapterFormatError(f"LoRA factors without partner for targets: {unpaired}")
        if not factors_a:
            raise AdapterFormatError("Archive contains no LoRA factors")

        alpha = _resolve(ALPHA_KEY, self.alpha, archive.metadata, self.adapter_config)
        if alpha is None:
            raise AdapterFormatError(
                f"LoRA alpha not found in overrides, metadata key {ALPHA_KEY!r} or adapter configuration"
            )
        rank = _resolve(RANK_KEY, self.rank, archive.metadata, self.adapter_config)
        if rank is not None and not float(rank).is_integer():
            raise AdapterFormatError(f"LoRA rank must be a whole number, got {rank}")

        pairs = {}
        for target in sorted(factors_a):
            a, b = factors_a[target], factors_b[target]
            try:
                pairs[target] = LoraPair(
                    target_name=target,
                    a=a,
                    b=b,
                    alpha=alpha,
                    rank=int(rank) if rank is not None else (a.shape[0] if a.ndim else 0),
                )
            except ValidationError as e:
                raise AdapterFormatError(f"Invalid LoRA pair for {target!r}: {e}") from e

        LOGGER.debug("Found %d LoRA pairs (alpha=%s)", len(pairs), alpha)
        return LoraAdapter(pairs=pairs, metadata=dict(archive.metadata))


def from_archive(
    *,
    archive: TensorArchive,
    alpha: float | None = None,
    rank: int | None = None,
    adapter_config: Mapping[str, Any] | None = None,
) -> LoraAdapter:
    """Interpret ``archive`` as a LoRA adapter.

    Args:
        archive: The decoded archive.
        alpha: Override for the LoRA alpha.
        rank: Override for the LoRA rank.
        adapter_config: Contents of the adapter configuration file, if any.

    Returns:
        The adapter with one pair per target.
    """
    parser = Parser(alpha=alpha, rank=rank, adapter_config=adapter_config)
    return parser.parse(archive=archive)
