"""safetensors writer for tensor archives."""

import json
import logging
import struct

import numpy as np

from dialectmbr.models.tensors import TensorArchive
from dialectmbr.parser.archive import METADATA_KEY
from dialectmbr.writer.base import Writer

#: The module logger.
LOGGER = logging.getLogger(__name__)


class ArchiveWriter(Writer[TensorArchive]):
    """Writer for safetensors archives.

    Tensors are laid out contiguously in name order and always stored as
    F32.  The JSON header is padded with spaces to a multiple of 8 bytes.
    """

    def write_to_bytes(self, obj: TensorArchive) -> bytes:
        """Serialize the archive.

        Args:
            obj: The archive to write.

        Returns:
            The complete safetensors file contents.
        """
        header: dict[str, object] = {}
        if obj.metadata:
            header[METADATA_KEY] = dict(sorted(obj.metadata.items()))

        chunks = []
        offset = 0
        for name in sorted(obj.tensors):
            entry = obj.tensors[name]
            payload = np.ascontiguousarray(entry.data, dtype="<f4").tobytes()
            header[name] = {"dtype": "F32", "shape": list(entry.shape), "data_offsets": [offset, offset + len(payload)]}
            chunks.append(payload)
            offset += len(payload)

        header_bytes = json.dumps(header, separators=(",", ":"), ensure_ascii=False).encode("utf-8")
        header_bytes += b" " * (-len(header_bytes) % 8)
        LOGGER.debug("Writing archive with %d tensors (%d payload bytes)", len(obj.tensors), offset)
        return struct.pack("<Q", len(header_bytes)) + header_bytes + b"".join(chunks)
