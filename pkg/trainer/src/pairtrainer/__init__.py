"""Trainer and generation server for relation-augmentation pair files.

This package consumes the pair-file directory (two JSON Lines files plus
``manifest.json``) produced by the companion augmentation toolkit, fine-tunes
a shared-encoder/two-decoder sequence model on the manifest's alternating
schedule, and serves the resulting model over the toolkit's remote-generation
JSON protocol.
"""

from .data import (
    APPROXIMATE,
    RESTRUCTURE,
    TASKS,
    Batch,
    Manifest,
    Pair,
    batches,
    collate,
    encode_pair,
    load_training_data,
    read_pairs,
)
from .errors import CheckpointError, EmptyTaskError, SchemaError, TrainerError
from .model import ModelBundle, ModelConfig, SeqPairModel
from .serve import GenerationServer, serve
from .train import PhaseRecord, TrainConfig, TrainState, train, train_pairs
from .vocab import CONTROL_TOKENS, MARKER_TOKENS, RESERVED_TOKENS, Vocab

__version__ = "0.1.0"

__all__ = [
    "APPROXIMATE",
    "RESTRUCTURE",
    "TASKS",
    "Batch",
    "CheckpointError",
    "CONTROL_TOKENS",
    "EmptyTaskError",
    "GenerationServer",
    "Manifest",
    "MARKER_TOKENS",
    "ModelBundle",
    "ModelConfig",
    "Pair",
    "PhaseRecord",
    "RESERVED_TOKENS",
    "SchemaError",
    "SeqPairModel",
    "TrainConfig",
    "TrainState",
    "TrainerError",
    "Vocab",
    "batches",
    "collate",
    "encode_pair",
    "load_training_data",
    "read_pairs",
    "serve",
    "train",
    "train_pairs",
]
