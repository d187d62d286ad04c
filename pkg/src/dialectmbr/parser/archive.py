"""Reader for safetensors tensor archives.

The file layout is an 8-byte unsigned little-endian header length, a JSON
header mapping tensor names to ``{dtype, shape, data_offsets}`` plus an
optional ``__metadata__`` string map, and the byte buffer the offsets point
into.  Parsing happens in two stages:

- The raw bytes are split into the decoded header and the payload buffer;
  header entries are validated as pydantic models.
- Tensor extents are checked against the buffer (in bounds, matching their
  shape, non-overlapping) and decoded into F32 arrays.
"""

import json
import logging
import math
import struct
import warnings
from typing import Annotated, Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from dialectmbr.exceptions import (
    DtypeWideningWarning,
    DuplicateTensorError,
    MalformedHeaderError,
    OverlappingTensorsError,
    TensorBoundsError,
    TensorShapeError,
    TruncatedArchiveError,
)
from dialectmbr.models.common import Dtype
from dialectmbr.models.tensors import TensorArchive, TensorEntry
from dialectmbr.parser.common import ArchiveParserConfiguration

#: The module logger.
LOGGER = logging.getLogger(__name__)

#: Header key holding the string metadata.
METADATA_KEY = "__metadata__"
#: Metadata key recording tensors widened to F32 on read.
WIDENED_KEY = "dialectmbr.widened_from"


class RawTensorHeader(BaseModel):
    """Header entry of one tensor as found in the JSON header."""

    dtype: Dtype
    shape: list[Annotated[int, Field(ge=1)]]
    data_offsets: Annotated[list[Annotated[int, Field(ge=0)]], Field(min_length=2, max_length=2)]

    model_config = ConfigDict(frozen=True, extra="forbid")

    @property
    def begin(self) -> int:
        return self.data_offsets[0]

    @property
    def end(self) -> int:
        return self.data_offsets[1]


def _load_header_json(text: str) -> tuple[Any, list[tuple[str, dict[str, Any]]]]:
    """Load ``text`` and report every repeated key with the object it was repeated in."""
    duplicates: list[tuple[str, dict[str, Any]]] = []

    def hook(pairs: list[tuple[str, Any]]) -> dict[str, Any]:
        result: dict[str, Any] = {}
        for key, value in pairs:
            if key in result:
                duplicates.append((key, result))
            result[key] = value
        return result

    return json.loads(text, object_pairs_hook=hook), duplicates


class Parser:
    """Parser for safetensors archives.

    - Split the length prefix, JSON header and payload buffer.
    - Validate header entries and tensor extents.
    - Decode tensors, widening half-precision types to F32.
    """

    def __init__(self, config: ArchiveParserConfiguration) -> None:
        """Initialize the parser with the given configuration."""
        self.config = config

    def parse(self, *, data: bytes) -> TensorArchive:
        """Parse the given archive bytes.

        Args:
            data: Complete contents of a safetensors file.

        Returns:
            The decoded archive.

        Raises:
            ArchiveException: One subclass per kind of corruption.
        """
        header, buffer = self._split(data)
        metadata, entries = self._decode_header(header)
        self._validate_extents(entries, len(buffer))

        tensors = {}
        widened = []
        for name, entry in entries.items():
            tensors[name] = self._decode_tensor(entry, buffer)
            if entry.dtype != Dtype.F32:
                widened.append(f"{name}:{entry.dtype.value}")

        if widened:
            metadata = {**metadata, WIDENED_KEY: ",".join(sorted(widened))}
            if self.config.warn_on_widening:
                warnings.warn(
                    f"Widened {len(widened)} half-precision tensor(s) to F32",
                    DtypeWideningWarning,
                    stacklevel=3,
                )

        LOGGER.debug("Parsed archive with %d tensors (%d payload bytes)", len(tensors), len(buffer))
        return TensorArchive(tensors=tensors, metadata=metadata)

    def _split(self, data: bytes) -> tuple[bytes, bytes]:
        """Split ``data`` into header bytes and payload buffer."""
        if len(data) < 8:
            raise TruncatedArchiveError(f"Archive has {len(data)} bytes, too short for the 8-byte header length")
        (header_len,) = struct.unpack("<Q", data[:8])
        if header_len > self.config.max_header_size:
            raise MalformedHeaderError(
                f"Header length {header_len} exceeds the limit of {self.config.max_header_size} bytes"
            )
        if 8 + header_len > len(data):
            raise TruncatedArchiveError(
                f"Header declares {header_len} bytes but only {len(data) - 8} bytes follow the length prefix"
            )
        return data[8 : 8 + header_len], data[8 + header_len :]

    def _decode_header(self, header: bytes) -> tuple[dict[str, str], dict[str, RawTensorHeader]]:
        """Decode the JSON header into metadata and validated tensor entries."""
        try:
            raw, duplicates = _load_header_json(header.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as e:
            raise MalformedHeaderError(f"Header is not valid UTF-8 JSON: {e}") from e
        if not isinstance(raw, dict):
            raise MalformedHeaderError(f"Header must be a JSON object, got {type(raw).__name__}")
        # only repeats at the top level name a tensor twice
        for key, obj in duplicates:
            if obj is raw:
                raise DuplicateTensorError(f"Header declares tensor {key!r} more than once")
        if duplicates:
            raise MalformedHeaderError(f"Header repeats field {duplicates[0][0]!r} inside an entry")

        metadata = raw.pop(METADATA_KEY, {})
        if not isinstance(metadata, dict) or not all(isinstance(v, str) for v in metadata.values()):
            raise MalformedHeaderError(f"{METADATA_KEY} must map strings to strings")

        entries = {}
        for name, value in raw.items():
            try:
                entries[name] = RawTensorHeader.model_validate(value)
            except ValidationError as e:
                raise MalformedHeaderError(f"Invalid header entry for tensor {name!r}: {e}") from e
        return metadata, entries

    def _validate_extents(self, entries: dict[str, RawTensorHeader], buffer_len: int) -> None:
        """Check that every extent is in bounds, fits its shape and does not overlap another."""
        for name, entry in entries.items():
            if entry.begin > entry.end or entry.end > buffer_len:
                raise TensorBoundsError(
                    f"Tensor {name!r} has offsets {entry.data_offsets} outside of the {buffer_len}-byte payload"
                )
            expected = math.prod(entry.shape) * entry.dtype.itemsize
            if entry.end - entry.begin != expected:
                raise TensorShapeError(
                    f"Tensor {name!r} spans {entry.end - entry.begin} bytes, "
                    f"expected {expected} for {entry.dtype.value}{entry.shape}"
                )

        # sorted by start, any overlap shows up between neighbours
        ordered = sorted(entries.items(), key=lambda item: (item[1].begin, item[1].end))
        for (prev_name, prev), (name, entry) in zip(ordered, ordered[1:], strict=False):
            if entry.begin < prev.end:
                raise OverlappingTensorsError(
                    f"Tensors {prev_name!r} {prev.data_offsets} and {name!r} {entry.data_offsets} overlap"
                )
        covered = sum(entry.end - entry.begin for entry in entries.values())
        if not self.config.allow_gaps and covered != buffer_len:
            raise TensorBoundsError(f"Tensors cover {covered} of {buffer_len} payload bytes")

    def _decode_tensor(self, entry: RawTensorHeader, buffer: bytes) -> TensorEntry:
        """Decode one tensor extent into an F32 entry."""
        chunk = buffer[entry.begin : entry.end]
        match entry.dtype:
            case Dtype.F32:
                values = np.frombuffer(chunk, dtype="<f4").astype(np.float32)
            case Dtype.F16:
                values = np.frombuffer(chunk, dtype="<f2").astype(np.float32)
            case Dtype.BF16:
                values = (np.frombuffer(chunk, dtype="<u2").astype(np.uint32) << 16).view(np.float32)
        return TensorEntry(dtype=entry.dtype, shape=tuple(entry.shape), data=values.reshape(entry.shape))


def from_bytes(*, data: bytes, config: ArchiveParserConfiguration) -> TensorArchive:
    """Parse the given safetensors bytes.

    Args:
        data: The archive contents.
        config: Parser configuration to use.

    Returns:
        The decoded archive.
    """
    parser = Parser(config)
    return parser.parse(data=data)
