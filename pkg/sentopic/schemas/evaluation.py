"""
Likelihood evaluation schemas
"""
import math
from enum import Enum
from typing import List, Literal, Optional

from pydantic import BaseModel, Field, computed_field, field_validator


class PartitionMethod(str, Enum):
    EXACT = "exact"
    AIS = "ais"


class PartitionEstimate(BaseModel):
    """log Z for one document length (Z depends on D)"""
    log_z: float
    method: PartitionMethod
    base_doc_length: int = Field(..., ge=0, description="D the estimate was computed for")
    ais_runs: int = Field(0, ge=0)
    log_z_stderr: float = Field(0.0, ge=0.0)
    sentiment: Optional[int] = Field(None, description="Clamped sentiment, None for the full model")

    @field_validator("log_z")
    @classmethod
    def _finite(cls, value):
        if not math.isfinite(value):
            raise ValueError("log_z must be finite")
        return value


class AISConfig(BaseModel):
    """Annealed Importance Sampling settings"""
    n_runs: int = Field(100, ge=10, description="Independent annealing chains")
    n_temps: int = Field(1000, ge=100, description="Intermediate temperatures")
    schedule: Literal["geometric", "linear"] = Field("geometric", description="Spacing of beta in (0, 1]")
    min_beta: float = Field(1e-3, gt=0.0, lt=1.0, description="First nonzero beta of the geometric schedule")
    n_bootstrap: int = Field(200, ge=2, description="Bootstrap resamples for the stderr")


class PartitionTableConfig(BaseModel):
    """How z_by_length is built"""
    method: Literal["auto", "exact", "ais"] = Field("auto", description="auto = exact within the enumeration bound")
    bucketed: bool = Field(False, description="Share estimates across geometric length buckets")
    n_buckets: int = Field(32, ge=1)
    threads: int = Field(1, ge=1, description="Lengths estimated concurrently")
    ais: AISConfig = Field(default_factory=AISConfig)


class PerplexityReport(BaseModel):
    """Per-document log-likelihoods and the resulting perplexity"""
    doc_ids: List[int] = Field(default_factory=list)
    lengths: List[int] = Field(default_factory=list)
    per_doc_log_p: List[float] = Field(default_factory=list)

    @computed_field
    @property
    def total_words(self) -> int:
        return int(sum(self.lengths))

    @computed_field
    @property
    def perplexity(self) -> float:
        """exp(-sum log p / sum D)"""
        return math.exp(-math.fsum(self.per_doc_log_p) / self.total_words)
