"""Unit tests for reading LoRA adapters from archives."""

import json

import numpy as np
import pytest

from dialectmbr import facade
from dialectmbr.exceptions import AdapterFormatError
from dialectmbr.models.common import MergeSpace
from dialectmbr.models.tensors import TensorArchive, TensorEntry
from dialectmbr.parser import lora


def adapter_archive(metadata: dict[str, str] | None = None, rank: int = 2, targets=("q", "v")) -> TensorArchive:
    tensors = {}
    for target in targets:
        tensors[f"{target}.lora_A.weight"] = TensorEntry.from_array(np.ones((rank, 3)))
        tensors[f"{target}.lora_B.weight"] = TensorEntry.from_array(np.ones((4, rank)))
    return TensorArchive(tensors=tensors, metadata=metadata or {})


class TestParser:
    """Tests for lora.from_archive()."""

    def test_pairs(self):
        """Factors are grouped by target name."""
        adapter = lora.from_archive(archive=adapter_archive({"lora_alpha": "16", "r": "2"}))
        assert sorted(adapter.pairs) == ["q", "v"]
        assert adapter.pairs["q"].alpha == 16.0
        assert adapter.pairs["q"].rank == 2
        assert adapter.pairs["q"].a.shape == (2, 3)
        assert adapter.pairs["q"].b.shape == (4, 2)

    def test_override_wins(self):
        """Explicit alpha and rank beat the metadata."""
        adapter = lora.from_archive(archive=adapter_archive({"lora_alpha": "16", "r": "2"}), alpha=4.0)
        assert adapter.pairs["q"].alpha == 4.0

    def test_adapter_config(self):
        """The adapter configuration is used when the metadata lacks the parameters."""
        adapter = lora.from_archive(archive=adapter_archive(), adapter_config={"lora_alpha": 8, "r": 2})
        assert adapter.pairs["v"].alpha == 8.0

    def test_rank_from_shapes(self):
        """Without any source the rank comes from the factor shapes."""
        adapter = lora.from_archive(archive=adapter_archive({"lora_alpha": "1"}, rank=3))
        assert adapter.pairs["q"].rank == 3

    def test_missing_alpha(self):
        """A missing alpha is an error."""
        with pytest.raises(AdapterFormatError):
            lora.from_archive(archive=adapter_archive())

    def test_non_numeric_alpha(self):
        """Parameters must be numbers."""
        with pytest.raises(AdapterFormatError):
            lora.from_archive(archive=adapter_archive({"lora_alpha": "sixteen"}))

    def test_unpaired(self):
        """A factor without its partner is an error."""
        archive = TensorArchive(
            tensors={"q.lora_A.weight": TensorEntry.from_array(np.ones((2, 3)))}, metadata={"lora_alpha": "1"}
        )
        with pytest.raises(AdapterFormatError):
            lora.from_archive(archive=archive)

    def test_no_factors(self):
        """An archive without LoRA factors is not an adapter."""
        archive = TensorArchive(tensors={"w": TensorEntry.from_array([1.0])}, metadata={"lora_alpha": "1"})
        with pytest.raises(AdapterFormatError):
            lora.from_archive(archive=archive)

    def test_rank_mismatch(self):
        """A declared rank that disagrees with the shapes is an error."""
        with pytest.raises(AdapterFormatError):
            lora.from_archive(archive=adapter_archive({"lora_alpha": "1", "r": "4"}))

    @pytest.mark.parametrize("rank", ["8.5", "2.5", "nan", "inf"])
    def test_fractional_rank(self, rank: str):
        """A rank that is not a whole number is rejected rather than truncated."""
        with pytest.raises(AdapterFormatError):
            lora.from_archive(archive=adapter_archive({"lora_alpha": "1", "r": rank}))

    def test_ignores_other_tensors(self):
        """Non-LoRA tensors are skipped."""
        archive = adapter_archive({"lora_alpha": "1"})
        extended = TensorArchive(
            tensors={**archive.tensors, "bias": TensorEntry.from_array([0.0])}, metadata=archive.metadata
        )
        assert sorted(lora.from_archive(archive=extended).pairs) == ["q", "v"]


class TestFacade:
    """Tests for reading adapters from disk."""

    def test_adapter_config_file(self, tmp_path):
        """``adapter_config.json`` next to the weights supplies alpha."""
        path = tmp_path / "adapter_model.safetensors"
        facade.write_archive(adapter_archive(targets=("q",)), path)
        (tmp_path / facade.ADAPTER_CONFIG_NAME).write_text(json.dumps({"lora_alpha": 4, "r": 2}), encoding="utf-8")
        vector = facade.read_task_vector(path)
        assert np.all(vector.deltas["q"] == 4.0)

    def test_invalid_adapter_config(self, tmp_path):
        """A broken adapter configuration is an error."""
        path = tmp_path / "adapter_model.safetensors"
        facade.write_archive(adapter_archive(targets=("q",)), path)
        (tmp_path / facade.ADAPTER_CONFIG_NAME).write_text("{", encoding="utf-8")
        with pytest.raises(AdapterFormatError):
            facade.read_task_vector(path)

    def test_factor_space(self, tmp_path):
        """Factor-space reading keeps the factors."""
        path = tmp_path / "adapter.safetensors"
        facade.write_archive(adapter_archive({"lora_alpha": "2", "r": "2"}, targets=("q",)), path)
        vector = facade.read_task_vector(path, MergeSpace.FACTOR)
        assert sorted(vector.deltas) == ["q.lora_A.weight", "q.lora_B.weight"]
