"""Pipeline configuration.

Settings are merged from, lowest precedence first:

- the defaults of :class:`PipelineConfig`,
- a YAML or JSON configuration file,
- ``DIALECTMBR_*`` environment variables,
- explicit overrides (command line flags); ``None`` values are ignored.
"""

import logging
from collections.abc import Mapping
from pathlib import Path
from typing import Annotated, Any

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from dialectmbr.exceptions import ConfigurationException
from dialectmbr.models.clients import GenConfig, ScorerBackend, StubBackend
from dialectmbr.models.common import ChrfAggregate, DisplayScale, ObjectiveKind, ReportFormat
from dialectmbr.models.metrics import ChrfConfig
from dialectmbr.models.tensors import MergeConfig

#: The module logger.
LOGGER = logging.getLogger(__name__)

#: Environment variables and the configuration keys they set.
ENV_VARS: dict[str, tuple[str, ...]] = {
    "DIALECTMBR_GEN_ENDPOINT": ("gen", "endpoint"),
    "DIALECTMBR_GEN_MODEL": ("gen", "model"),
    "DIALECTMBR_GEN_API_KEY": ("gen", "api_key"),
    "DIALECTMBR_SCORER_ENDPOINT": ("scorer", "endpoint"),
    "DIALECTMBR_SCORER_API_KEY": ("scorer", "api_key"),
}


class PipelineConfig(BaseModel):
    """Configuration of all pipeline stages."""

    #: Target dialect label.
    dialect: str = "syr"
    #: Decoding objective.
    objective: ObjectiveKind = ObjectiveKind.ADI2
    #: Weight of ADI2 in the combined objective.
    combined_weight: Annotated[float, Field(ge=0.0, le=1.0)] = 0.5
    #: Candidate sampling.
    gen: GenConfig = Field(default_factory=GenConfig)
    #: Adapter merging.
    merge: MergeConfig = Field(default_factory=MergeConfig)
    #: chrF++ parameters.
    chrf: ChrfConfig = Field(default_factory=ChrfConfig)
    #: Corpus aggregation of chrF++.
    chrf_aggregate: ChrfAggregate = ChrfAggregate.MICRO
    #: Dialect scorer backend.
    scorer: ScorerBackend = Field(default_factory=StubBackend)
    #: Display scale of chrF++ in reports.
    scale: DisplayScale = DisplayScale.UNIT
    #: Report format.
    report_format: ReportFormat = ReportFormat.JSON
    #: Number of worker threads.
    jobs: Annotated[int, Field(ge=1)] = 1

    model_config = ConfigDict(frozen=True)


def deep_merge(base: Mapping[str, Any], update: Mapping[str, Any]) -> dict[str, Any]:
    """Recursively merge ``update`` into ``base``; ``None`` values in ``update`` are skipped.

    Example:
        >>> deep_merge({"gen": {"model": "a", "top_p": 0.9}}, {"gen": {"model": "b", "seed_base": None}})
        {'gen': {'model': 'b', 'top_p': 0.9}}
    """
    result = dict(base)
    for key, value in update.items():
        if value is None:
            continue
        if isinstance(value, Mapping) and isinstance(result.get(key), Mapping):
            result[key] = deep_merge(result[key], value)
        elif isinstance(value, Mapping):
            result[key] = deep_merge({}, value)
        else:
            result[key] = value
    return result


def _read_config_file(path: str | Path) -> dict[str, Any]:
    try:
        with open(path, encoding="utf-8") as inputf:
            data = yaml.safe_load(inputf)
    except OSError as e:
        raise ConfigurationException(f"Cannot read configuration file {path}: {e}") from e
    except yaml.YAMLError as e:
        raise ConfigurationException(f"Cannot parse configuration file {path}: {e}") from e
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigurationException(f"Configuration file {path} must contain a mapping")
    return data


def _from_environ(environ: Mapping[str, str]) -> dict[str, Any]:
    result: dict[str, Any] = {}
    for name, (section, key) in ENV_VARS.items():
        if environ.get(name):
            result.setdefault(section, {})[key] = environ[name]
    return result


def load_pipeline_config(
    config_path: str | Path | None = None,
    environ: Mapping[str, str] | None = None,
    overrides: Mapping[str, Any] | None = None,
) -> PipelineConfig:
    """Build the pipeline configuration.

    Args:
        config_path: Optional YAML or JSON configuration file.
        environ: Environment to read ``DIALECTMBR_*`` variables from, none if not given.
        overrides: Nested overrides, e.g. from command line flags.

    Raises:
        ConfigurationException: If the file cannot be read or the merged settings are invalid.
    """
    data: dict[str, Any] = {}
    if config_path is not None:
        data = deep_merge(data, _read_config_file(config_path))
        LOGGER.debug("Read configuration file %s", config_path)
    data = deep_merge(data, _from_environ(environ or {}))
    data = deep_merge(data, overrides or {})
    if isinstance(data.get("scorer"), dict):
        # an endpoint without explicit kind means the remote service
        data["scorer"].setdefault("kind", "remote" if "endpoint" in data["scorer"] else "stub")
    if isinstance(data.setdefault("gen", {}), dict):
        # jobs bounds all parallelism, including the requests of one prompt
        data["gen"]["max_in_flight"] = data.get("jobs", 1)
    try:
        return PipelineConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigurationException(f"Invalid configuration: {e}") from e
