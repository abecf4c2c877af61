"""
Configuration

Environment settings come from the process environment and an optional
.env file; run settings come from a flat key=value file whose keys are
CLI option names.
"""
from pathlib import Path
from typing import Any, Dict, Mapping

from environs import Env
from pydantic import BaseModel, Field

from sentopic.core.errors import DataError

env = Env()
env.read_env()


class Settings(BaseModel):
    """Process-level settings"""
    seed: int = Field(0, ge=0, description="Seed fallback when --seed is not given")
    log_level: str = Field("INFO", description="Logging level name")
    threads: int = Field(1, ge=1, description="Cap on evaluation fan-out")
    progress: bool = Field(False, description="Show progress bars")


def get_settings() -> Settings:
    """Read settings from the environment (SENTOPIC_* variables)."""
    return Settings(
        seed=env.int("SENTOPIC_SEED", 0),
        log_level=env.str("SENTOPIC_LOG_LEVEL", "INFO"),
        threads=env.int("SENTOPIC_THREADS", 1),
        progress=env.bool("SENTOPIC_PROGRESS", False),
    )


def _normalize_key(key: str) -> str:
    return key.strip().lstrip("-").replace("-", "_")


def _format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (list, tuple)):
        return ",".join(_format_value(v) for v in value)
    return str(value)


class RunConfig(BaseModel):
    """Flat run configuration, serializable to and from a key=value file"""
    values: Dict[str, str] = Field(default_factory=dict)

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        values = {}
        for line_number, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise DataError(f"config line {line_number}: expected key=value, got {raw!r}")
            key, value = line.split("=", 1)
            values[_normalize_key(key)] = value.strip()
        return cls(values=values)

    @classmethod
    def from_file(cls, path: Path) -> "RunConfig":
        return cls.from_text(Path(path).read_text(encoding="utf-8"))

    @classmethod
    def from_params(cls, params: Mapping[str, Any]) -> "RunConfig":
        return cls(values={_normalize_key(k): _format_value(v) for k, v in params.items()})

    def to_text(self) -> str:
        return "".join(f"{key}={self.values[key]}\n" for key in sorted(self.values))

    def header_lines(self) -> list:
        """Comment lines embedding the config in an artifact header."""
        return [f"# {key}={self.values[key]}" for key in sorted(self.values)]
