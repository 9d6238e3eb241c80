"""Manifest-driven alternating-task training loop.

Each iteration walks the manifest's task order; each task phase runs exactly
``epochs_per_task`` optimizer epochs over that task's pairs, updating the
shared encoder together with that task's decoder while the other decoder's
parameters stay untouched.
"""

from __future__ import annotations

import json
import random
from dataclasses import asdict, dataclass, field
from pathlib import Path

import torch

from .data import Manifest, Pair, batches, load_training_data
from .model import ModelBundle, ModelConfig
from .vocab import Vocab


@dataclass(frozen=True)
class TrainConfig:
    """Optimization knobs; model sizes live in :class:`ModelConfig`."""

    model: ModelConfig = field(default_factory=ModelConfig)
    learning_rate: float = 3e-3
    iteration_decay: float = 0.5
    batch_size: int = 16
    grad_clip: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0 or self.batch_size < 1:
            raise ValueError("learning_rate and batch_size must be positive")
        if not 0.0 < self.iteration_decay <= 1.0:
            raise ValueError("iteration_decay must lie in (0, 1]")


@dataclass
class PhaseRecord:
    """Per-epoch mean losses for one (iteration, task) phase."""

    iteration: int
    task: str
    losses: list[float]


@dataclass
class TrainState:
    """Progress counters plus the loss history of every finished phase."""

    iteration: int = 0
    task: str | None = None
    epoch: int = 0
    history: list[PhaseRecord] = field(default_factory=list)

    def losses_for(self, task: str) -> list[PhaseRecord]:
        return [record for record in self.history if record.task == task]

    def to_json(self) -> str:
        return json.dumps(
            {
                "iteration": self.iteration,
                "task": self.task,
                "epoch": self.epoch,
                "history": [asdict(record) for record in self.history],
            },
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "TrainState":
        payload = json.loads(text)
        return cls(
            iteration=payload["iteration"],
            task=payload["task"],
            epoch=payload["epoch"],
            history=[PhaseRecord(**record) for record in payload["history"]],
        )


def _run_epoch(
    bundle: ModelBundle,
    pairs: list[Pair],
    task: str,
    optimizer: torch.optim.Optimizer,
    config: TrainConfig,
    order: list[int],
) -> float:
    """One pass over the task's pairs; returns the mean per-token loss."""
    bundle.module.train()
    total, count = 0.0, 0
    for batch in batches(bundle.vocab, pairs, config.batch_size, order):
        optimizer.zero_grad()
        loss = bundle.module.loss(batch, task)
        loss.backward()
        torch.nn.utils.clip_grad_norm_(
            [p for group in optimizer.param_groups for p in group["params"]],
            config.grad_clip,
        )
        optimizer.step()
        total += float(loss.item()) * len(batch)
        count += len(batch)
    return total / count


def train_pairs(
    manifest: Manifest,
    pairs_by_task: dict[str, list[Pair]],
    config: TrainConfig | None = None,
) -> tuple[ModelBundle, TrainState]:
    """Train a fresh model on already-loaded pairs following the manifest."""
    config = config or TrainConfig()
    texts: list[str] = []
    for task in manifest.task_order:
        for pair in pairs_by_task[task]:
            texts.append(pair.source_text)
            texts.append(pair.target_text)
            if pair.hint:
                texts.append(pair.hint)
    vocab = Vocab.build(texts)
    bundle = ModelBundle.initialize(
        vocab, config.model, config.seed, manifest.hint_injection
    )
    state = TrainState()
    for iteration in range(manifest.iterations):
        for task in manifest.task_order:
            optimizer = torch.optim.Adam(
                bundle.module.task_parameters(task),
                lr=config.learning_rate * config.iteration_decay**iteration,
            )
            losses: list[float] = []
            for epoch in range(manifest.epochs_per_task):
                rng = random.Random(f"train:{config.seed}:{iteration}:{task}:{epoch}")
                order = list(range(len(pairs_by_task[task])))
                rng.shuffle(order)
                losses.append(
                    _run_epoch(bundle, pairs_by_task[task], task, optimizer, config, order)
                )
                state.iteration, state.task, state.epoch = iteration, task, epoch + 1
                assert state.epoch <= manifest.epochs_per_task
            state.history.append(PhaseRecord(iteration, task, losses))
    return bundle, state


def train(
    pairs_dir: Path | str,
    out_dir: Path | str,
    config: TrainConfig | None = None,
) -> tuple[ModelBundle, TrainState]:
    """Load a pair directory, train per its manifest, save the checkpoint."""
    manifest, pairs_by_task = load_training_data(pairs_dir)
    bundle, state = train_pairs(manifest, pairs_by_task, config)
    out_dir = Path(out_dir)
    bundle.save(out_dir)
    (out_dir / "history.json").write_text(state.to_json() + "\n", encoding="utf-8")
    return bundle, state
