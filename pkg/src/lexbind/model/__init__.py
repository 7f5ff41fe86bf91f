"""Encoder-decoder transformer with shared embeddings, an extra-embedding
input channel over token types, and a decoder output restricted to the
target slice of the joint vocabulary.

Everything is plain numpy with hand-written backward passes so training is
bit-reproducible and the gradients can be audited against finite differences.
"""

from .config import ModelConfig, TrainConfig
from .transformer import Transformer, TokenTypeIds
from .checkpoint import Checkpoint, save_checkpoint, load_checkpoint
from .trainer import TrainingDiverged, train, make_batches, Batch
from .beam import BeamResult, beam_search
from .gradcheck import grad_check

__all__ = [
    "ModelConfig",
    "TrainConfig",
    "Transformer",
    "TokenTypeIds",
    "Checkpoint",
    "save_checkpoint",
    "load_checkpoint",
    "TrainingDiverged",
    "train",
    "make_batches",
    "Batch",
    "BeamResult",
    "beam_search",
    "grad_check",
]
