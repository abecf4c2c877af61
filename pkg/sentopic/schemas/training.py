"""
Training schemas
"""
from pathlib import Path
from typing import Dict, List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from sentopic.schemas.model import ModelParams

# hidden layer sizes swept in the training protocol
HIDDEN_GRID = (5, 10, 15, 20, 25, 30, 35, 40, 45, 50, 60, 70, 80, 90)


class TrainConfig(BaseModel):
    """Contrastive Divergence training settings"""
    learning_rate: float = Field(0.001, gt=0.0, description="Step size alpha")
    iterations: int = Field(1000, ge=0, description="Epochs, or document updates (see iteration_unit)")
    iteration_unit: Literal["epoch", "update"] = Field("epoch", description="What one iteration counts")
    batch_size: int = Field(1, ge=1, description="Documents per parameter update")
    cd_steps: int = Field(1, ge=1, description="Gibbs sweeps k in CD-k")
    init_sigma: float = Field(1.0, ge=0.0, description="Gaussian std for W, U, a, c")
    seed: int = Field(0, ge=0, description="Root seed")
    hidden_units: int = Field(10, ge=1, description="H")
    momentum: float = Field(0.0, ge=0.0, lt=1.0, description="Momentum; 0 disables")
    weight_decay: float = Field(0.0, ge=0.0, description="L2 penalty on W and U; 0 disables")
    checkpoint_every: int = Field(0, ge=0, description="Epochs between checkpoints; 0 disables")
    checkpoint_dir: Optional[Path] = Field(None, description="Where checkpoints go")
    progress: bool = Field(False, description="Show a progress bar")


class GradientEstimate(BaseModel):
    """Per-block ascent direction for theta"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    dW: np.ndarray
    dU: Optional[np.ndarray] = None
    da: np.ndarray
    db: np.ndarray
    dc: Optional[np.ndarray] = None
    reconstruction_l1: float = Field(0.0, description="|v - v'|_1 of the negative phase")

    @classmethod
    def zeros_like(cls, params: ModelParams) -> "GradientEstimate":
        return cls(
            dW=np.zeros_like(params.W),
            dU=None if params.U is None else np.zeros_like(params.U),
            da=np.zeros_like(params.a),
            db=np.zeros_like(params.b),
            dc=None if params.c is None else np.zeros_like(params.c),
        )

    def blocks(self) -> Dict[str, np.ndarray]:
        """Blocks keyed by the parameter they update"""
        ordered = {"W": self.dW, "U": self.dU, "a": self.da, "b": self.db, "c": self.dc}
        return {name: block for name, block in ordered.items() if block is not None}

    def accumulate(self, other: "GradientEstimate", weight: float = 1.0) -> None:
        mine = self.blocks()
        for name, block in other.blocks().items():
            mine[name] += weight * block
        self.reconstruction_l1 += weight * other.reconstruction_l1

    def as_vector(self) -> np.ndarray:
        return np.concatenate([block.ravel() for block in self.blocks().values()])

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(block)) for block in self.blocks().values())


class TrainingLogEntry(BaseModel):
    """One row of the training log CSV"""
    epoch: int
    doc_index: int
    metric_name: str
    value: float


class TrainingResult(BaseModel):
    """Final parameters with the metric log"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    params: ModelParams
    log: List[TrainingLogEntry] = Field(default_factory=list)
    epochs: int = 0
    updates: int = 0
