"""TIES-Merging of task vectors derived from LoRA adapters.

For every tensor name shared by the task vectors:

- trim: keep the ``ceil(k * len)`` largest-magnitude entries of each task,
- elect sign: per coordinate, the sign of the summed trimmed values,
- disjoint merge: per coordinate, the mean of the surviving values that agree
  with the elected sign,

and finally scale the result by ``lambda``.  Trimming is per tensor.  All
arithmetic is in float64; archives are written as F32.
"""

import logging
import math
import warnings
from collections.abc import Mapping, Sequence
from typing import Any

import numpy as np

from dialectmbr.exceptions import AdapterFormatError, ApproximateMergeWarning, MergeKeyError, MergeShapeError
from dialectmbr.models.common import KeyPolicy, MergeSpace
from dialectmbr.models.tensors import LoraAdapter, LoraPair, MergeConfig, TaskVector, TensorArchive, TensorEntry
from dialectmbr.parser import lora

#: The module logger.
LOGGER = logging.getLogger(__name__)

#: Metadata key naming the archive flavor.
FORMAT_KEY = "format"
#: Value of :data:`FORMAT_KEY` for dense task vectors.
TASK_VECTOR_FORMAT = "task_vector"
#: Value of :data:`FORMAT_KEY` for factor-space merge output.
LORA_FORMAT = "lora"


def materialize(pair: LoraPair) -> np.ndarray:
    """Dense delta ``(alpha / r) * B @ A`` of shape ``d_out x d_in``.

    Example:
        >>> pair = LoraPair(target_name="w", a=np.ones((2, 3)), b=np.ones((4, 2)), alpha=2.0, rank=2)
        >>> materialize(pair).tolist()[0]
        [2.0, 2.0, 2.0]
    """
    b = np.asarray(pair.b, dtype=np.float64)
    a = np.asarray(pair.a, dtype=np.float64)
    return (pair.alpha / pair.rank) * (b @ a)


def keep_count(length: int, fraction: float) -> int:
    """Number of entries kept when trimming ``length`` entries to ``fraction``.

    The product is rounded to 9 decimals before taking the ceiling so that
    e.g. ``0.2 * 15`` keeps 3 entries, not 4.
    """
    if length == 0:
        return 0
    return min(length, max(1, math.ceil(round(fraction * length, 9))))


def trim(values: np.ndarray, fraction: float) -> np.ndarray:
    """Zero all but the largest-magnitude entries of a flat tensor.

    Among entries of equal magnitude, lower indices are kept first.

    Example:
        >>> trim(np.array([0.3, -1.0, 0.2, 2.0]), 0.5).tolist()
        [0.0, -1.0, 0.0, 2.0]
        >>> trim(np.array([5.0, -5.0]), 0.5).tolist()
        [5.0, 0.0]
    """
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"Trim fraction must be in (0, 1], got {fraction}")
    values = np.asarray(values, dtype=np.float64)
    keep = keep_count(values.size, fraction)
    if keep >= values.size:
        return values.copy()
    kept = np.argsort(-np.abs(values), kind="stable")[:keep]
    result = np.zeros_like(values)
    result[kept] = values[kept]
    return result


def elect_sign(trimmed: Sequence[np.ndarray]) -> np.ndarray:
    """Per-coordinate sign (+1 / -1) of the summed trimmed values; a zero sum elects +1.

    Example:
        >>> elect_sign([np.array([1.0, -1.0]), np.array([-1.0, 1.0])]).tolist()
        [1.0, 1.0]
    """
    total = np.sum(np.stack(trimmed), axis=0)
    return np.where(total >= 0, 1.0, -1.0)


def disjoint_merge(trimmed: Sequence[np.ndarray], signs: np.ndarray) -> np.ndarray:
    """Per-coordinate mean of the nonzero values agreeing with the elected sign, 0 if none survive."""
    stack = np.stack(trimmed)
    agree = (stack != 0) & (np.sign(stack) == signs)
    counts = agree.sum(axis=0)
    sums = np.where(agree, stack, 0.0).sum(axis=0)
    return np.divide(sums, counts, out=np.zeros_like(sums), where=counts > 0)


def _merge_names(task_vectors: Sequence[TaskVector], policy: KeyPolicy) -> list[str]:
    key_sets = [set(tv.deltas) for tv in task_vectors]
    shared = set.intersection(*key_sets)
    if policy == KeyPolicy.UNION_ERROR:
        differing = sorted(set.union(*key_sets) - shared)
        if differing:
            raise MergeKeyError(f"Task vectors disagree on tensor names: {differing}")
    if not shared:
        raise MergeKeyError("Task vectors share no tensor names")
    return sorted(shared)


def merge_tensor(tensors: Sequence[np.ndarray], config: MergeConfig) -> np.ndarray:
    """TIES-merge the same tensor of all tasks (trim, elect sign, disjoint merge, scale)."""
    trimmed = [trim(tensor.reshape(-1), config.trim_fraction) for tensor in tensors]
    signs = elect_sign(trimmed)
    return (disjoint_merge(trimmed, signs) * config.scale).reshape(tensors[0].shape)


def ties_merge(task_vectors: Sequence[TaskVector], config: MergeConfig | None = None) -> TaskVector:
    """Merge task vectors with TIES-Merging.

    Raises:
        MergeKeyError: If the tensor names violate the key policy or nothing is shared.
        MergeShapeError: If a tensor has different shapes across task vectors.
    """
    config = config or MergeConfig()
    if not task_vectors:
        raise MergeKeyError("Need at least one task vector to merge")
    if config.space == MergeSpace.FACTOR:
        warnings.warn(
            "Merging LoRA factors independently only approximates merging the deltas",
            ApproximateMergeWarning,
            stacklevel=2,
        )

    merged = {}
    for name in _merge_names(task_vectors, config.key_policy):
        tensors = [tv.deltas[name] for tv in task_vectors]
        shapes = {tensor.shape for tensor in tensors}
        if len(shapes) > 1:
            raise MergeShapeError(f"Tensor {name!r} has different shapes across tasks: {sorted(shapes)}")
        LOGGER.debug("Merging %s %s over %d tasks", name, tensors[0].shape, len(tensors))
        merged[name] = merge_tensor(tensors, config)

    metadata = {
        FORMAT_KEY: TASK_VECTOR_FORMAT if config.space == MergeSpace.MATERIALIZED else LORA_FORMAT,
        "merge_space": config.space.value,
        "approximate": str(config.space == MergeSpace.FACTOR).lower(),
        "trim_fraction": repr(config.trim_fraction),
        "lambda": repr(config.scale),
        "num_tasks": str(len(task_vectors)),
    }
    if config.space == MergeSpace.FACTOR:
        metadata.update({k: v for k, v in task_vectors[0].metadata.items() if k in (lora.ALPHA_KEY, lora.RANK_KEY)})
    LOGGER.info("Merged %d tensors from %d task vectors", len(merged), len(task_vectors))
    return TaskVector(deltas=merged, metadata=metadata)


def task_vector_from_adapter(adapter: LoraAdapter, space: MergeSpace = MergeSpace.MATERIALIZED) -> TaskVector:
    """Task vector of a LoRA adapter in the given merge space.

    In materialized space every target maps to its dense delta; in factor
    space the A and B factors are kept under their archive names.
    """
    if space == MergeSpace.MATERIALIZED:
        return TaskVector(
            deltas={target: materialize(pair) for target, pair in adapter.pairs.items()},
            metadata={FORMAT_KEY: TASK_VECTOR_FORMAT},
        )
    alphas = {pair.alpha for pair in adapter.pairs.values()}
    ranks = {pair.rank for pair in adapter.pairs.values()}
    if len(alphas) > 1 or len(ranks) > 1:
        raise AdapterFormatError("Factor-space merging needs a single alpha and rank per adapter")
    deltas = {}
    for target, pair in adapter.pairs.items():
        deltas[target + lora.LORA_A_SUFFIX] = pair.a
        deltas[target + lora.LORA_B_SUFFIX] = pair.b
    return TaskVector(
        deltas=deltas,
        metadata={FORMAT_KEY: LORA_FORMAT, lora.ALPHA_KEY: repr(alphas.pop()), lora.RANK_KEY: str(ranks.pop())},
    )


def task_vector_from_archive(
    archive: TensorArchive,
    space: MergeSpace = MergeSpace.MATERIALIZED,
    *,
    alpha: float | None = None,
    rank: int | None = None,
    adapter_config: Mapping[str, Any] | None = None,
) -> TaskVector:
    """Task vector of an adapter archive or of an archive already holding dense deltas."""
    if archive.metadata.get(FORMAT_KEY) == TASK_VECTOR_FORMAT:
        if space == MergeSpace.FACTOR:
            raise AdapterFormatError("A dense task vector archive cannot be merged in factor space")
        return TaskVector(
            deltas={name: entry.data for name, entry in archive.tensors.items()},
            metadata={FORMAT_KEY: TASK_VECTOR_FORMAT},
        )
    adapter = lora.from_archive(archive=archive, alpha=alpha, rank=rank, adapter_config=adapter_config)
    return task_vector_from_adapter(adapter, space)


def task_vector_to_archive(task_vector: TaskVector) -> TensorArchive:
    """Archive of a task vector, values narrowed to F32."""
    return TensorArchive(
        tensors={name: TensorEntry.from_array(delta) for name, delta in sorted(task_vector.deltas.items())},
        metadata=dict(task_vector.metadata),
    )
