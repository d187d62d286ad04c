"""Tensor archives, LoRA adapters, task vectors and merge configuration.

Tensor payloads are numpy arrays.  Archive entries keep F32 values as read;
task vectors hold float64 values so that merging does not depend on
platform half-precision behavior.
"""

from typing import Annotated, Any, Self

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from dialectmbr.models.common import Dtype, KeyPolicy, MergeSpace


def _arrays_equal(lhs: dict[str, np.ndarray], rhs: dict[str, np.ndarray]) -> bool:
    return lhs.keys() == rhs.keys() and all(
        lhs[k].shape == rhs[k].shape and np.array_equal(lhs[k], rhs[k]) for k in lhs
    )


class TensorEntry(BaseModel):
    """One named tensor of an archive."""

    #: Element type the tensor had on disk.
    dtype: Dtype
    #: Tensor shape, every dimension positive.
    shape: tuple[int, ...]
    #: Row-major values as F32, shaped like ``shape``.
    data: np.ndarray

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @field_validator("shape")
    @classmethod
    def validate_shape(cls, v: tuple[int, ...]) -> tuple[int, ...]:
        if any(dim < 1 for dim in v):
            raise ValueError(f"Tensor dimensions must be positive, got {list(v)}")
        return v

    @model_validator(mode="after")
    def _check_data(self) -> Self:
        if self.data.dtype != np.float32:
            raise ValueError(f"Tensor data must be float32, got {self.data.dtype}")
        if self.data.shape != self.shape:
            raise ValueError(f"Tensor data has shape {self.data.shape}, expected {self.shape}")
        return self

    @classmethod
    def from_array(cls, data: Any, dtype: Dtype = Dtype.F32) -> "TensorEntry":
        """Build an entry from anything numpy can turn into an array."""
        array = np.ascontiguousarray(data, dtype=np.float32)
        return cls(dtype=dtype, shape=tuple(array.shape), data=array)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TensorEntry):
            return NotImplemented
        return self.dtype == other.dtype and _arrays_equal({"": self.data}, {"": other.data})


class TensorArchive(BaseModel):
    """In-memory representation of a safetensors file."""

    #: Tensors by unique name.
    tensors: Annotated[dict[str, TensorEntry], Field(default_factory=dict)]
    #: Free-form string metadata (``__metadata__``).
    metadata: Annotated[dict[str, str], Field(default_factory=dict)]

    model_config = ConfigDict(frozen=True)


class LoraPair(BaseModel):
    """The two low-rank factors adapting one base tensor.

    The effective delta is ``(alpha / rank) * B @ A``.
    """

    #: Name of the base tensor the adapter modifies.
    target_name: str
    #: Down projection, shape ``rank x d_in``.
    a: np.ndarray
    #: Up projection, shape ``d_out x rank``.
    b: np.ndarray
    #: LoRA scaling numerator.
    alpha: Annotated[float, Field(gt=0.0)]
    #: LoRA rank.
    rank: Annotated[int, Field(ge=1)]

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @model_validator(mode="after")
    def _check_factors(self) -> Self:
        if self.a.ndim != 2 or self.b.ndim != 2:
            raise ValueError(f"{self.target_name}: LoRA factors must be matrices")
        if self.a.shape[0] != self.rank or self.b.shape[1] != self.rank:
            raise ValueError(
                f"{self.target_name}: factor shapes A{self.a.shape} / B{self.b.shape} disagree with rank {self.rank}"
            )
        return self


class LoraAdapter(BaseModel):
    """All LoRA pairs of one adapter archive."""

    #: LoRA pairs by target name.
    pairs: dict[str, LoraPair]
    #: Metadata of the source archive.
    metadata: Annotated[dict[str, str], Field(default_factory=dict)]

    model_config = ConfigDict(frozen=True)


class TaskVector(BaseModel):
    """Named parameter deltas of one task relative to the base model."""

    #: Delta tensors by name (float64).
    deltas: dict[str, np.ndarray]
    #: Provenance metadata, written to the archive on export.
    metadata: Annotated[dict[str, str], Field(default_factory=dict)]

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @field_validator("deltas")
    @classmethod
    def validate_deltas(cls, v: dict[str, np.ndarray]) -> dict[str, np.ndarray]:
        result = {}
        for name, tensor in v.items():
            array = np.asarray(tensor, dtype=np.float64)
            if not np.all(np.isfinite(array)):
                raise ValueError(f"Task vector tensor {name!r} has non-finite values")
            result[name] = array
        return result

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TaskVector):
            return NotImplemented
        return self.metadata == other.metadata and _arrays_equal(self.deltas, other.deltas)


class MergeConfig(BaseModel):
    """Configuration of TIES-Merging.

    The defaults ``k = 0.2`` and ``lambda = 1.0`` follow the usual TIES setting.
    """

    #: Fraction of largest-magnitude entries kept per tensor.
    trim_fraction: Annotated[float, Field(gt=0.0, le=1.0)] = 0.20
    #: Scale applied to the merged deltas.
    scale: float = 1.0
    #: Whether deltas are materialized before merging.
    space: MergeSpace = MergeSpace.MATERIALIZED
    #: Treatment of tensor names not shared by all task vectors.
    key_policy: KeyPolicy = KeyPolicy.INTERSECT

    model_config = ConfigDict(frozen=True)
