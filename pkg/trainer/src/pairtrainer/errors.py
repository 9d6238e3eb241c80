"""Exceptions raised by the trainer package."""

from __future__ import annotations


class TrainerError(Exception):
    """Base class for every failure this package raises deliberately."""


class SchemaError(TrainerError):
    """A pair file or schedule manifest does not match the documented format."""


class EmptyTaskError(TrainerError):
    """A task scheduled by the manifest has no training pairs."""

    def __init__(self, task: str):
        super().__init__(f"no training pairs for scheduled task {task!r}")
        self.task = task


class CheckpointError(TrainerError):
    """A checkpoint directory is missing files or internally inconsistent."""
