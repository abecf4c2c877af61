"""
Model parameter and layer-state schemas
"""
from enum import Enum
from typing import Dict, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from sentopic.core.errors import NumericalInstabilityError


class ModelMode(str, Enum):
    """RS: Replicated Softmax baseline; JOINT: with the sentiment layer"""
    RS = "rs"
    JOINT = "joint"


def _as_float_array(value):
    if value is None:
        return None
    return np.array(value, dtype=np.float64)


class ModelParams(BaseModel):
    """
    theta = {W, U, a, b, c}

    W is K x H, U is S x H, a has K entries, b has H, c has S. In RS mode
    U and c are absent and S = 0.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    W: np.ndarray = Field(..., description="Visible-hidden weights, K x H")
    U: Optional[np.ndarray] = Field(None, description="Sentiment-hidden weights, S x H")
    a: np.ndarray = Field(..., description="Visible bias, K")
    b: np.ndarray = Field(..., description="Hidden bias, H (scaled by D in the energy)")
    c: Optional[np.ndarray] = Field(None, description="Sentiment bias, S")

    @field_validator("W", "U", "a", "b", "c", mode="before")
    @classmethod
    def _coerce(cls, value):
        return _as_float_array(value)

    @model_validator(mode="after")
    def _shapes(self):
        if self.W.ndim != 2:
            raise ValueError(f"W must be a matrix, got shape {self.W.shape}")
        K, H = self.W.shape
        if self.a.shape != (K,):
            raise ValueError(f"a has shape {self.a.shape}, expected ({K},)")
        if self.b.shape != (H,):
            raise ValueError(f"b has shape {self.b.shape}, expected ({H},)")
        if (self.U is None) != (self.c is None):
            raise ValueError("U and c must be both present (joint) or both absent (RS)")
        if self.U is not None:
            if self.U.ndim != 2 or self.U.shape[1] != H or self.U.shape[0] < 1:
                raise ValueError(f"U has shape {self.U.shape}, expected (S, {H})")
            if self.c.shape != (self.U.shape[0],):
                raise ValueError(f"c has shape {self.c.shape}, expected ({self.U.shape[0]},)")
        for name, block in self.blocks().items():
            if not np.all(np.isfinite(block)):
                raise ValueError(f"block {name} contains non-finite values")
        return self

    @classmethod
    def zeros(cls, K: int, H: int, S: int = 0) -> "ModelParams":
        """All-zero parameters; S = 0 gives RS mode."""
        joint = S > 0
        return cls(
            W=np.zeros((K, H)),
            U=np.zeros((S, H)) if joint else None,
            a=np.zeros(K),
            b=np.zeros(H),
            c=np.zeros(S) if joint else None,
        )

    @property
    def K(self) -> int:
        return int(self.W.shape[0])

    @property
    def H(self) -> int:
        return int(self.W.shape[1])

    @property
    def S(self) -> int:
        return 0 if self.U is None else int(self.U.shape[0])

    @property
    def is_joint(self) -> bool:
        return self.U is not None

    @property
    def mode(self) -> ModelMode:
        return ModelMode.JOINT if self.is_joint else ModelMode.RS

    def blocks(self) -> Dict[str, np.ndarray]:
        """Parameter blocks in persistence order (W, U, a, b, c), absent ones skipped."""
        ordered = {"W": self.W, "U": self.U, "a": self.a, "b": self.b, "c": self.c}
        return {name: block for name, block in ordered.items() if block is not None}

    def copy(self) -> "ModelParams":
        return ModelParams(**{name: block.copy() for name, block in self.blocks().items()})

    def check_finite(self, update: Optional[int] = None) -> None:
        for name, block in self.blocks().items():
            bad = ~np.isfinite(block)
            if bad.any():
                raise NumericalInstabilityError(
                    f"{int(bad.sum())} non-finite entries in {name} after update {update}",
                    block=name,
                    update=update,
                )

    def scaled(self, beta: float) -> "ModelParams":
        """Every block multiplied by beta (the tempered model used by AIS)."""
        return ModelParams(**{name: beta * block for name, block in self.blocks().items()})


class HiddenState(BaseModel):
    """Hidden layer probabilities and a binary sample"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    probs: np.ndarray
    sample: np.ndarray

    @model_validator(mode="after")
    def _ranges(self):
        if np.any((self.probs < 0) | (self.probs > 1)):
            raise ValueError("hidden probabilities outside [0, 1]")
        if not np.all((self.sample == 0) | (self.sample == 1)):
            raise ValueError("hidden sample must be binary")
        return self


class SentimentVector(BaseModel):
    """Sentiment layer distribution and a one-hot sample"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    probs: np.ndarray
    onehot: np.ndarray

    @model_validator(mode="after")
    def _simplex(self):
        if abs(float(self.probs.sum()) - 1.0) > 1e-9:
            raise ValueError("sentiment probabilities must sum to 1")
        if np.count_nonzero(self.onehot) != 1 or not np.all((self.onehot == 0) | (self.onehot == 1)):
            raise ValueError("sentiment sample must be one-hot")
        return self

    @property
    def label(self) -> int:
        return int(np.argmax(self.onehot))
