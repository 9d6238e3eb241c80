"""Readers for the pair-file and manifest formats, and tensor batch assembly.

The upstream augmentation toolkit emits a directory containing one JSON Lines
file per task plus ``manifest.json`` describing the alternating training
schedule.  Those files are the only contract between the two packages; nothing
here imports the upstream code.
"""

from __future__ import annotations

import json
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

import torch

from .errors import EmptyTaskError, SchemaError
from .vocab import Vocab

RESTRUCTURE = "restructure"
APPROXIMATE = "approximate"
TASKS = (RESTRUCTURE, APPROXIMATE)

_PAIR_KEYS = frozenset(
    (
        "task",
        "source_text",
        "hint",
        "target_text",
        "relation",
        "source_id",
        "target_id",
        "pattern_distance",
    )
)


@dataclass(frozen=True)
class Pair:
    """One training example: a source sentence and its generation target."""

    task: str
    source_text: str
    hint: str | None
    target_text: str
    relation: str
    source_id: str
    target_id: str
    pattern_distance: int | None

    def __post_init__(self):
        if self.task not in TASKS:
            raise SchemaError(f"unknown task {self.task!r}")
        for name in ("source_text", "target_text", "relation", "source_id", "target_id"):
            value = getattr(self, name)
            if not isinstance(value, str) or not value:
                raise SchemaError(f"field {name!r} must be a non-empty string")
        if self.task == RESTRUCTURE:
            if self.hint is not None or self.pattern_distance is not None:
                raise SchemaError("restructure pairs carry no hint or distance")
        else:
            if not isinstance(self.hint, str) or not self.hint.strip():
                raise SchemaError("approximate pairs need a non-empty hint")
            if not isinstance(self.pattern_distance, int) or self.pattern_distance < 0:
                raise SchemaError("approximate pairs need a non-negative distance")

    @classmethod
    def from_json(cls, line: str) -> "Pair":
        try:
            payload = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}") from exc
        if not isinstance(payload, dict) or set(payload) != _PAIR_KEYS:
            raise SchemaError("pair record must carry exactly the documented fields")
        return cls(**payload)


@dataclass(frozen=True)
class Manifest:
    """The machine-readable alternating-task training schedule."""

    iterations: int
    epochs_per_task: int
    task_order: tuple[str, ...]
    pair_files: dict[str, str]
    threshold: int
    seed: int
    hint_injection: str

    def __post_init__(self):
        for name in ("iterations", "epochs_per_task", "threshold", "seed"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 0:
                raise SchemaError(f"manifest field {name!r} must be a non-negative int")
        if not self.task_order or any(task not in TASKS for task in self.task_order):
            raise SchemaError(f"task_order must name tasks from {TASKS}")
        missing = [task for task in self.task_order if task not in self.pair_files]
        if missing:
            raise SchemaError(f"manifest lists no pair file for {missing}")
        if self.hint_injection != "prepend":
            raise SchemaError(
                f"unsupported hint_injection {self.hint_injection!r}; only 'prepend'"
            )

    @classmethod
    def load(cls, path: Path | str) -> "Manifest":
        try:
            payload = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise SchemaError(f"cannot read manifest {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise SchemaError(f"manifest {path} is not valid JSON: {exc}") from exc
        if not isinstance(payload, dict):
            raise SchemaError("manifest must be a JSON object")
        try:
            return cls(
                iterations=payload["iterations"],
                epochs_per_task=payload["epochs_per_task"],
                task_order=tuple(payload["task_order"]),
                pair_files=dict(payload["pair_files"]),
                threshold=payload["lambda"],
                seed=payload["seed"],
                hint_injection=payload["hint_injection"],
            )
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"manifest is missing fields: {exc}") from exc


def read_pairs(path: Path | str) -> list[Pair]:
    """Read one JSON Lines pair file, reporting errors with line numbers."""
    pairs = []
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise SchemaError(f"cannot read pair file {path}: {exc}") from exc
    for number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            pairs.append(Pair.from_json(line))
        except SchemaError as exc:
            raise SchemaError(f"{path} line {number}: {exc}") from exc
    return pairs


def load_training_data(pairs_dir: Path | str) -> tuple[Manifest, dict[str, list[Pair]]]:
    """Load the manifest and every scheduled task's pairs from one directory."""
    pairs_dir = Path(pairs_dir)
    manifest = Manifest.load(pairs_dir / "manifest.json")
    by_task: dict[str, list[Pair]] = {}
    for task in manifest.task_order:
        pairs = read_pairs(pairs_dir / manifest.pair_files[task])
        wrong = [pair for pair in pairs if pair.task != task]
        if wrong:
            raise SchemaError(
                f"{manifest.pair_files[task]} holds {wrong[0].task!r} records"
            )
        if not pairs:
            raise EmptyTaskError(task)
        by_task[task] = pairs
    return manifest, by_task


@dataclass(frozen=True)
class Batch:
    """Padded id tensors for one optimizer step."""

    source: torch.Tensor  # (B, S) long
    source_lengths: torch.Tensor  # (B,) long
    decoder_input: torch.Tensor  # (B, T) long
    labels: torch.Tensor  # (B, T) long; pad ids mark ignored positions

    def __len__(self) -> int:
        return self.source.shape[0]


def encode_pair(vocab: Vocab, pair: Pair) -> tuple[list[int], list[int], list[int]]:
    """Build (source ids, decoder input ids, label ids) for one pair.

    The hint, when present, is prepended to the decoder input; loss is only
    charged on the target positions and the closing end-of-sequence step.
    """
    source = vocab.encode(pair.source_text) + [vocab.eos_id]
    hint = vocab.encode(pair.hint) if pair.hint else []
    target = vocab.encode(pair.target_text)
    decoder_input = [vocab.bos_id, *hint, *target]
    labels = [vocab.pad_id] * len(hint) + target + [vocab.eos_id]
    return source, decoder_input, labels


def collate(vocab: Vocab, pairs: Sequence[Pair]) -> Batch:
    """Pad a list of pairs into one batch of rectangular tensors."""
    if not pairs:
        raise ValueError("cannot collate an empty batch")
    encoded = [encode_pair(vocab, pair) for pair in pairs]
    pad = vocab.pad_id
    src_width = max(len(src) for src, _, _ in encoded)
    dec_width = max(len(dec) for _, dec, _ in encoded)
    source = torch.full((len(encoded), src_width), pad, dtype=torch.long)
    decoder_input = torch.full((len(encoded), dec_width), pad, dtype=torch.long)
    labels = torch.full((len(encoded), dec_width), pad, dtype=torch.long)
    lengths = torch.zeros(len(encoded), dtype=torch.long)
    for row, (src, dec, lab) in enumerate(encoded):
        source[row, : len(src)] = torch.tensor(src, dtype=torch.long)
        decoder_input[row, : len(dec)] = torch.tensor(dec, dtype=torch.long)
        labels[row, : len(lab)] = torch.tensor(lab, dtype=torch.long)
        lengths[row] = len(src)
    return Batch(source, lengths, decoder_input, labels)


def batches(
    vocab: Vocab, pairs: Sequence[Pair], batch_size: int, order: Sequence[int]
) -> list[Batch]:
    """Split ``pairs`` into batches following the given index order."""
    if batch_size < 1:
        raise ValueError("batch_size must be positive")
    shuffled = [pairs[i] for i in order]
    return [
        collate(vocab, shuffled[start : start + batch_size])
        for start in range(0, len(shuffled), batch_size)
    ]
