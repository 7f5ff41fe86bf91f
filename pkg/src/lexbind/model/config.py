"""Model and trainer hyperparameter containers.

Defaults are desk-scale; the full-size configuration (6 layers, dim 512,
ff 2048, 8 heads, 30k merges, batches of ~4000 tokens with 8-step update
delay) remains expressible through the same fields.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Optional

import numpy as np

DTYPES = {"f32": np.float32, "f64": np.float64}


@dataclass
class ModelConfig:
    layers: int = 2
    model_dim: int = 64
    ff_dim: int = 256
    heads: int = 4
    dropout: float = 0.1
    label_smoothing: float = 0.1
    max_len: int = 128
    seed: int = 1
    use_extra: bool = False
    tied_output: bool = True
    dtype: str = "f32"

    def __post_init__(self):
        if self.model_dim % self.heads != 0:
            raise ValueError(
                f"model_dim {self.model_dim} not divisible by heads {self.heads}"
            )
        for name in ("dropout", "label_smoothing"):
            rate = getattr(self, name)
            if not 0.0 <= rate < 1.0:
                raise ValueError(f"{name} must be in [0,1), got {rate}")
        if self.dtype not in DTYPES:
            raise ValueError(f"dtype must be one of {sorted(DTYPES)}, got {self.dtype}")
        for name in ("layers", "model_dim", "ff_dim", "heads", "max_len"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")

    @property
    def np_dtype(self):
        return DTYPES[self.dtype]


@dataclass
class TrainConfig:
    lr: float = 0.001
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    grad_clip_norm: float = 5.0
    tokens_per_batch: int = 2000
    accum_steps: int = 1
    epochs: int = 10
    max_steps: Optional[int] = None
    warmup_steps: int = 0  # off by default; the cited recipe uses a constant rate
    log_every: int = 50

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if value is None:
                continue
            if f.name == "warmup_steps":
                if value < 0:
                    raise ValueError("warmup_steps must be >= 0")
            elif not value > 0:
                raise ValueError(f"{f.name} must be positive, got {value}")

    def lr_at(self, step: int) -> float:
        if self.warmup_steps > 0 and step <= self.warmup_steps:
            return self.lr * step / self.warmup_steps
        return self.lr


def config_to_record(mcfg: ModelConfig, **extra: object) -> dict[str, str]:
    """Flatten a config (plus bookkeeping values) into a string map."""
    record = {f.name: str(getattr(mcfg, f.name)) for f in fields(ModelConfig)}
    for key, value in extra.items():
        record[key] = str(value)
    return record


def model_config_from_record(record: dict[str, str]) -> ModelConfig:
    kwargs = {}
    for f in fields(ModelConfig):
        raw = record[f.name]
        if f.type in ("int", int):
            kwargs[f.name] = int(raw)
        elif f.type in ("float", float):
            kwargs[f.name] = float(raw)
        elif f.type in ("bool", bool):
            kwargs[f.name] = raw == "True"
        else:
            kwargs[f.name] = raw
    return ModelConfig(**kwargs)
