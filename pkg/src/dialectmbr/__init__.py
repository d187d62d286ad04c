"""dialectmbr is a Python library for dialect-aware decoding of LLM outputs:
chrF++ and ADI2 scoring, MBR and reranking selection over sampled
candidates, TIES-Merging of LoRA adapters, and corpus evaluation reports.
"""

from dialectmbr.config import PipelineConfig, load_pipeline_config
from dialectmbr.evalharness import compare_objectives, emit_report, eval_monolingual, eval_translation
from dialectmbr.facade import (
    load_candidates,
    merge_adapter_files,
    read_archive,
    read_task_vector,
    save_candidates,
    save_selections,
    write_archive,
)
from dialectmbr.mbr import mbr_select, rerank_select, select_with_objective
from dialectmbr.metrics import adi2, chrfpp_corpus, chrfpp_sentence, combined_objective, extract_profile
from dialectmbr.models.common import ObjectiveKind
from dialectmbr.models.metrics import ChrfConfig
from dialectmbr.models.tensors import MergeConfig
from dialectmbr.parser.report import parse_report_json
from dialectmbr.ties import ties_merge
from dialectmbr.version import __version__

__all__ = [
    "__version__",
    "adi2",
    "chrfpp_corpus",
    "chrfpp_sentence",
    "combined_objective",
    "extract_profile",
    "mbr_select",
    "rerank_select",
    "select_with_objective",
    "ties_merge",
    "read_archive",
    "write_archive",
    "read_task_vector",
    "merge_adapter_files",
    "load_candidates",
    "save_candidates",
    "save_selections",
    "eval_monolingual",
    "eval_translation",
    "emit_report",
    "compare_objectives",
    "parse_report_json",
    "load_pipeline_config",
    "ChrfConfig",
    "MergeConfig",
    "ObjectiveKind",
    "PipelineConfig",
]
