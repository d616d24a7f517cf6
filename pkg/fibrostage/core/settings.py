import json
from pathlib import Path
from typing import Any, ClassVar, Self

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from fibrostage.common.utils import load_json
from fibrostage.core.errors import ConfigError
from fibrostage.core.logger import get_logger
from fibrostage.modules.clf.schemas import TrainingConfig
from fibrostage.modules.imgcore.schemas import ContrastMode
from fibrostage.modules.mi.schemas import HistogramConfig
from fibrostage.modules.patches.schemas import PatchExtractionConfig
from fibrostage.modules.reg.schemas import RegistrationConfig
from fibrostage.modules.staging.schemas import StagingConfig

# Initialize module logger
logger = get_logger("core.settings")

DEFAULT_CONFIG_FILE = Path("data/config.json")
LOG_LEVELS = {"debug", "info", "warning", "error", "critical"}


class LoggingConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    level: str = "info"
    format: str = "%(asctime)s - %(levelname)s - [%(subject)s] %(name)s - %(message)s"
    file: str | None = Field(default=None, description="Log file name inside the output directory")
    module_levels: dict[str, str] = Field(default_factory=dict)

    @field_validator("level")
    @classmethod
    def validate_level(cls, v: str) -> str:
        if v.lower() not in LOG_LEVELS:
            msg = f"unknown log level {v!r}; expected one of {sorted(LOG_LEVELS)}"
            raise ValueError(msg)
        return v.lower()


class Settings(BaseSettings):
    """Run configuration: defaults, overlaid by the config file, overlaid by CLI overrides."""

    logging: LoggingConfig = Field(default_factory=LoggingConfig)
    histogram: HistogramConfig = Field(default_factory=HistogramConfig)
    registration: RegistrationConfig = Field(default_factory=RegistrationConfig)
    patches: PatchExtractionConfig = Field(default_factory=PatchExtractionConfig)
    classifier: TrainingConfig = Field(default_factory=TrainingConfig)
    staging: StagingConfig = Field(default_factory=StagingConfig)

    mode: ContrastMode = ContrastMode.NONCONTRAST
    manifest: Path | None = None
    output_dir: Path = Path("output")
    seed: int = 0
    jobs: int = Field(default=1, ge=1)

    model_config: ClassVar[SettingsConfigDict] = SettingsConfigDict(
        env_prefix="FIBROSTAGE_",
        env_nested_delimiter="__",
        case_sensitive=False,
        extra="forbid",
    )

    @model_validator(mode="after")
    def validate_paths(self) -> Self:
        if self.manifest is not None and not self.manifest.is_file():
            msg = f"manifest {self.manifest} does not exist"
            raise ValueError(msg)
        return self

    def registration_config(self) -> RegistrationConfig:
        """Registration settings with the top-level histogram section applied."""
        return self.registration.model_copy(update={"hist": self.histogram})

    def training_config(self) -> TrainingConfig:
        """Classifier settings seeded by the run seed."""
        return self.classifier.model_copy(update={"seed": self.seed})


def _apply_override(data: dict[str, Any], key: str, value: Any) -> None:
    # "staging__tau1" addresses data["staging"]["tau1"]
    *parents, leaf = key.split("__")
    node = data
    for part in parents:
        child = node.get(part)
        if not isinstance(child, dict):
            child = {}
            node[part] = child
        node = child
    node[leaf] = value


def load_settings(config_file: str | Path | None = None, **overrides: Any) -> Settings:
    """Build the run settings.

    Args:
        config_file: JSON config; ``None`` uses ``data/config.json`` when it exists.
        **overrides: Values taking precedence over the file; ``None`` values are ignored
            and ``section__key`` addresses a nested field.

    Returns:
        Validated Settings.

    Raises:
        ConfigError: If the file is unreadable or the merged configuration is invalid.
    """
    data: dict[str, Any] = {}
    path = Path(config_file) if config_file is not None else DEFAULT_CONFIG_FILE
    if config_file is not None or path.is_file():
        try:
            raw = load_json(path)
        except (OSError, json.JSONDecodeError) as e:
            msg = f"Error loading config file {path}: {e}"
            raise ConfigError(msg) from e
        if not isinstance(raw, dict):
            msg = f"Config file {path} must contain a JSON object"
            raise ConfigError(msg)
        data = raw
        logger.debug("Configuration loaded from file: %s", path)

    for key, value in overrides.items():
        if value is not None:
            _apply_override(data, key, value)

    try:
        return Settings(**data)
    except ValidationError as e:
        msg = f"Invalid configuration: {e}"
        raise ConfigError(msg) from e
