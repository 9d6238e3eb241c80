"""Shared-encoder, two-decoder sequence model and its checkpoint bundle.

One embedding table and one bidirectional GRU encoder are shared by two
attention GRU decoders, one per task.  Both decoders read and write through
the same embedding matrix (tied input/output projections), so the encoder-side
parameters are literally the same tensors during both task phases.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import torch
from torch import nn

from .data import APPROXIMATE, Batch, RESTRUCTURE, TASKS
from .errors import CheckpointError
from .vocab import Vocab

CHECKPOINT_FILES = ("model.pt", "vocab.json", "config.json")


@dataclass(frozen=True)
class ModelConfig:
    """Size knobs; the defaults are deliberately laptop-sized."""

    d_model: int = 64
    hidden: int = 128
    dropout: float = 0.1
    max_decode_len: int = 48

    def __post_init__(self):
        if min(self.d_model, self.hidden, self.max_decode_len) < 1:
            raise ValueError("model dimensions must be positive")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError("dropout must lie in [0, 1)")


class Encoder(nn.Module):
    """Bidirectional GRU over the source sentence."""

    def __init__(self, embedding: nn.Embedding, config: ModelConfig):
        super().__init__()
        self.embedding = embedding
        self.gru = nn.GRU(
            config.d_model, config.hidden, batch_first=True, bidirectional=True
        )
        self.memory_proj = nn.Linear(2 * config.hidden, config.hidden, bias=False)
        self.bridge = nn.Linear(2 * config.hidden, config.hidden)
        self.dropout = nn.Dropout(config.dropout)

    def forward(
        self, source: torch.Tensor, lengths: torch.Tensor
    ) -> tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
        """Return (memory, initial decoder hidden, source key-padding mask)."""
        embedded = self.dropout(self.embedding(source))
        packed = nn.utils.rnn.pack_padded_sequence(
            embedded, lengths.cpu(), batch_first=True, enforce_sorted=False
        )
        outputs, final = self.gru(packed)
        outputs, _ = nn.utils.rnn.pad_packed_sequence(
            outputs, batch_first=True, total_length=source.shape[1]
        )
        memory = self.memory_proj(outputs)
        hidden = torch.tanh(self.bridge(torch.cat((final[0], final[1]), dim=-1)))
        mask = torch.arange(source.shape[1], device=source.device)[None, :] < lengths[
            :, None
        ]
        return memory, hidden.unsqueeze(0), mask


class Decoder(nn.Module):
    """GRU decoder with dot-product attention and a tied output projection."""

    def __init__(self, embedding: nn.Embedding, config: ModelConfig):
        super().__init__()
        self.embedding = embedding
        self.gru = nn.GRU(config.d_model, config.hidden, batch_first=True)
        self.combine = nn.Linear(2 * config.hidden, config.d_model)
        self.output_bias = nn.Parameter(torch.zeros(embedding.num_embeddings))
        self.dropout = nn.Dropout(config.dropout)

    def forward(
        self,
        tokens: torch.Tensor,
        hidden: torch.Tensor,
        memory: torch.Tensor,
        mask: torch.Tensor,
    ) -> tuple[torch.Tensor, torch.Tensor]:
        """Run teacher-forced steps; returns (logits, final hidden)."""
        embedded = self.dropout(self.embedding(tokens))
        states, hidden = self.gru(embedded, hidden)
        scores = states @ memory.transpose(1, 2)
        scores = scores.masked_fill(~mask[:, None, :], float("-inf"))
        context = torch.softmax(scores, dim=-1) @ memory
        mixed = torch.tanh(self.combine(torch.cat((states, context), dim=-1)))
        logits = mixed @ self.embedding.weight.T + self.output_bias
        return logits, hidden


class SeqPairModel(nn.Module):
    """The full parameter store: shared encoder plus one decoder per task."""

    def __init__(self, vocab_size: int, config: ModelConfig, pad_id: int):
        super().__init__()
        self.embedding = nn.Embedding(vocab_size, config.d_model, padding_idx=pad_id)
        self.encoder = Encoder(self.embedding, config)
        self.decoders = nn.ModuleDict(
            {task: Decoder(self.embedding, config) for task in TASKS}
        )
        self.pad_id = pad_id

    def encoder_parameters(self) -> list[nn.Parameter]:
        """The parameters shared by both task phases (embedding + encoder)."""
        return list(self.encoder.parameters())

    def task_parameters(self, task: str) -> list[nn.Parameter]:
        """Encoder parameters plus the named task's decoder parameters."""
        seen = {id(p): p for p in self.encoder_parameters()}
        for parameter in self.decoders[task].parameters():
            seen.setdefault(id(parameter), parameter)
        return list(seen.values())

    def loss(self, batch: Batch, task: str) -> torch.Tensor:
        """Teacher-forced cross-entropy on the batch's labelled positions."""
        memory, hidden, mask = self.encoder(batch.source, batch.source_lengths)
        logits, _ = self.decoders[task](batch.decoder_input, hidden, memory, mask)
        return nn.functional.cross_entropy(
            logits.reshape(-1, logits.shape[-1]),
            batch.labels.reshape(-1),
            ignore_index=self.pad_id,
        )


@dataclass
class ModelBundle:
    """A model, its vocabulary, and everything needed to serve it."""

    vocab: Vocab
    config: ModelConfig
    module: SeqPairModel
    hint_injection: str = "prepend"
    seed: int = 0

    @classmethod
    def initialize(
        cls,
        vocab: Vocab,
        config: ModelConfig | None = None,
        seed: int = 0,
        hint_injection: str = "prepend",
    ) -> "ModelBundle":
        """Build a freshly seeded model; the same seed gives identical weights."""
        config = config or ModelConfig()
        torch.manual_seed(seed)
        module = SeqPairModel(len(vocab), config, vocab.pad_id)
        return cls(vocab, config, module, hint_injection, seed)

    @torch.no_grad()
    def generate_ids(
        self,
        source_text: str,
        hint: str | None,
        task: str = APPROXIMATE,
        temperature: float = 0.0,
        generator: torch.Generator | None = None,
    ) -> list[int]:
        """Decode one sentence; greedy when temperature is 0, else sampled."""
        vocab = self.vocab
        self.module.eval()
        source = torch.tensor(
            [vocab.encode(source_text) + [vocab.eos_id]], dtype=torch.long
        )
        lengths = torch.tensor([source.shape[1]], dtype=torch.long)
        memory, hidden, mask = self.module.encoder(source, lengths)
        prefix = [vocab.bos_id]
        if hint and self.hint_injection == "prepend":
            prefix += vocab.encode(hint)
        decoder = self.module.decoders[task]
        tokens = torch.tensor([prefix], dtype=torch.long)
        logits, hidden = decoder(tokens, hidden, memory, mask)
        step_logits = logits[:, -1, :]
        produced: list[int] = []
        banned = (vocab.pad_id, vocab.bos_id, vocab.unk_id)
        for _ in range(self.config.max_decode_len):
            step_logits[:, list(banned)] = float("-inf")
            if temperature > 0.0:
                probabilities = torch.softmax(step_logits / temperature, dim=-1)
                next_id = int(
                    torch.multinomial(probabilities, 1, generator=generator).item()
                )
            else:
                next_id = int(step_logits.argmax(dim=-1).item())
            if next_id == vocab.eos_id:
                break
            produced.append(next_id)
            tokens = torch.tensor([[next_id]], dtype=torch.long)
            logits, hidden = decoder(tokens, hidden, memory, mask)
            step_logits = logits[:, -1, :]
        return produced

    def generate_text(
        self,
        source_text: str,
        hint: str | None,
        task: str = APPROXIMATE,
        temperature: float = 0.0,
        generator: torch.Generator | None = None,
    ) -> str:
        return self.vocab.decode(
            self.generate_ids(source_text, hint, task, temperature, generator)
        )

    def save(self, out_dir: Path | str) -> None:
        """Write the checkpoint directory (model.pt, vocab.json, config.json)."""
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        torch.save(self.module.state_dict(), out_dir / "model.pt")
        self.vocab.save(out_dir / "vocab.json")
        payload = {
            "model": asdict(self.config),
            "hint_injection": self.hint_injection,
            "seed": self.seed,
            "serve_task": APPROXIMATE,
        }
        (out_dir / "config.json").write_text(
            json.dumps(payload, indent=2) + "\n", encoding="utf-8"
        )

    @classmethod
    def load(cls, checkpoint_dir: Path | str) -> "ModelBundle":
        checkpoint_dir = Path(checkpoint_dir)
        missing = [
            name for name in CHECKPOINT_FILES if not (checkpoint_dir / name).is_file()
        ]
        if missing:
            raise CheckpointError(f"checkpoint {checkpoint_dir} is missing {missing}")
        vocab = Vocab.load(checkpoint_dir / "vocab.json")
        try:
            payload = json.loads(
                (checkpoint_dir / "config.json").read_text(encoding="utf-8")
            )
            config = ModelConfig(**payload["model"])
            bundle = cls(
                vocab,
                config,
                SeqPairModel(len(vocab), config, vocab.pad_id),
                payload["hint_injection"],
                payload.get("seed", 0),
            )
            state = torch.load(checkpoint_dir / "model.pt", map_location="cpu")
            bundle.module.load_state_dict(state)
        except (ValueError, KeyError, TypeError, RuntimeError) as exc:
            raise CheckpointError(f"broken checkpoint {checkpoint_dir}: {exc}") from exc
        bundle.module.eval()
        return bundle


__all__ = [
    "APPROXIMATE",
    "RESTRUCTURE",
    "CHECKPOINT_FILES",
    "Decoder",
    "Encoder",
    "ModelBundle",
    "ModelConfig",
    "SeqPairModel",
]
