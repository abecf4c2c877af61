"""
Downstream task schemas
"""
from typing import List, Optional, Tuple

from pydantic import BaseModel, Field, field_validator, model_validator

from sentopic.schemas.corpus import SENTIMENT_NEGATIVE


class BaselineConfig(BaseModel):
    """Lexicon word-count classifier settings"""
    tie_label: int = Field(SENTIMENT_NEGATIVE, ge=0, le=1, description="Label assigned when the counts tie")


class ClassificationRow(BaseModel):
    """One row of the classification CSV"""
    doc_id: int
    gold: Optional[int] = None
    predicted: int
    probs: List[float] = Field(default_factory=list, description="p(s | v) per label; empty for the baseline")


class ClassificationReport(BaseModel):
    """Predictions for a document set with their accuracy"""
    method: str
    rows: List[ClassificationRow] = Field(default_factory=list)

    @property
    def accuracy(self) -> float:
        scored = [row for row in self.rows if row.gold is not None]
        if not scored:
            return float("nan")
        return sum(row.gold == row.predicted for row in scored) / len(scored)


class PRCurve(BaseModel):
    """Precision and recall averaged over queries, one point per depth k"""
    k_grid: List[int]
    points: List[Tuple[float, float]] = Field(..., description="(recall, precision) per entry of k_grid")

    @field_validator("k_grid")
    @classmethod
    def _positive_depths(cls, k_grid):
        if any(k < 1 for k in k_grid):
            raise ValueError("retrieval depths must be at least 1")
        return k_grid

    @model_validator(mode="after")
    def _curve(self):
        if len(self.points) != len(self.k_grid):
            raise ValueError("one (recall, precision) point per depth")
        recalls = [recall for recall, _ in self.points]
        if any(later < earlier - 1e-12 for earlier, later in zip(recalls, recalls[1:])):
            raise ValueError("recall must be non-decreasing along the curve")
        if any(not 0.0 <= precision <= 1.0 for _, precision in self.points):
            raise ValueError("precision outside [0, 1]")
        return self

    @property
    def recall(self) -> List[float]:
        return [recall for recall, _ in self.points]

    @property
    def precision(self) -> List[float]:
        return [precision for _, precision in self.points]


class TopicTag(BaseModel):
    """Lexicon masses of one hidden unit and its assigned tag"""
    topic: int
    positive_mass: float
    negative_mass: float
    tag: Optional[str] = Field(None, description="positive, negative or None when untagged")
    agrees: Optional[bool] = Field(None, description="U row sign test; None when untagged")

    @property
    def difference(self) -> float:
        return self.positive_mass - self.negative_mass


class TopicSentimentReport(BaseModel):
    """Hidden units ranked by lexicon mass, tagged, and checked against U"""
    per_topic: List[TopicTag]
    precision: float = Field(..., ge=0.0, le=1.0)
    tags_per_polarity: int
    degenerate: bool = Field(False, description="All mass differences equal; ordering is index order only")
    notes: List[str] = Field(default_factory=list)

    def tagged(self, tag: str) -> List[int]:
        return [entry.topic for entry in self.per_topic if entry.tag == tag]


class MLPResult(BaseModel):
    """Test accuracy of the warm-started and randomly initialized networks"""
    warm_accuracy: float = Field(..., ge=0.0, le=1.0)
    random_accuracy: float = Field(..., ge=0.0, le=1.0)
    epochs: int
