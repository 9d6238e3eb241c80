"""Whitespace-token vocabulary with reserved control and entity-marker tokens.

Sentences in the pair files are space-joined token sequences, so splitting on
whitespace recovers the original tokens exactly.  The four entity markers are
registered up front and therefore always map to single vocabulary ids, never
to subword pieces.
"""

from __future__ import annotations

import json
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

from .errors import CheckpointError

PAD_TOKEN = "<pad>"
BOS_TOKEN = "<s>"
EOS_TOKEN = "</s>"
UNK_TOKEN = "<unk>"
CONTROL_TOKENS = (PAD_TOKEN, BOS_TOKEN, EOS_TOKEN, UNK_TOKEN)
MARKER_TOKENS = ("[E_sub]", "[/E_sub]", "[E_obj]", "[/E_obj]")
RESERVED_TOKENS = CONTROL_TOKENS + MARKER_TOKENS


@dataclass(frozen=True)
class Vocab:
    """Bidirectional token/id map; ids 0-3 are control, 4-7 are markers."""

    tokens: tuple[str, ...]
    _ids: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if tuple(self.tokens[: len(RESERVED_TOKENS)]) != RESERVED_TOKENS:
            raise ValueError("vocabulary must begin with the reserved tokens")
        ids = {}
        for index, token in enumerate(self.tokens):
            if token in ids:
                raise ValueError(f"duplicate vocabulary token {token!r}")
            if token != token.strip() or not token:
                raise ValueError(f"vocabulary token {token!r} is not a bare word")
            ids[token] = index
        object.__setattr__(self, "_ids", ids)

    @classmethod
    def build(cls, texts: Iterable[str]) -> "Vocab":
        """Collect every whitespace token of ``texts`` after the reserved ids."""
        seen: dict[str, None] = dict.fromkeys(RESERVED_TOKENS)
        for text in texts:
            for token in text.split():
                seen.setdefault(token)
        return cls(tuple(seen))

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self._ids

    @property
    def pad_id(self) -> int:
        return self._ids[PAD_TOKEN]

    @property
    def bos_id(self) -> int:
        return self._ids[BOS_TOKEN]

    @property
    def eos_id(self) -> int:
        return self._ids[EOS_TOKEN]

    @property
    def unk_id(self) -> int:
        return self._ids[UNK_TOKEN]

    @property
    def marker_ids(self) -> tuple[int, ...]:
        return tuple(self._ids[token] for token in MARKER_TOKENS)

    def id_of(self, token: str) -> int:
        return self._ids.get(token, self._ids[UNK_TOKEN])

    def encode(self, text: str) -> list[int]:
        """Map a space-joined sentence to ids, unknown words to the unk id."""
        unk = self._ids[UNK_TOKEN]
        return [self._ids.get(token, unk) for token in text.split()]

    def decode(self, ids: Sequence[int]) -> str:
        """Map ids back to a space-joined sentence, dropping control tokens."""
        controls = {self.pad_id, self.bos_id, self.eos_id}
        return " ".join(self.tokens[i] for i in ids if i not in controls)

    def save(self, path: Path | str) -> None:
        payload = json.dumps({"tokens": list(self.tokens)}, indent=2)
        Path(path).write_text(payload + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: Path | str) -> "Vocab":
        try:
            payload = json.loads(Path(path).read_text(encoding="utf-8"))
            return cls(tuple(payload["tokens"]))
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise CheckpointError(f"unreadable vocabulary file {path}: {exc}") from exc
