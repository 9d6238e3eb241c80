"""Training loop: schedule shape, phase isolation, checkpointing."""

import json

import pytest
import torch

from conftest import approximate_record, restructure_record, write_pairs_dir
from pairtrainer import (
    ModelBundle,
    ModelConfig,
    TrainConfig,
    TrainState,
    Vocab,
    load_training_data,
    train,
    train_pairs,
)

TINY_MODEL = ModelConfig(d_model=16, hidden=24, dropout=0.0, max_decode_len=16)
TINY_TRAIN = TrainConfig(model=TINY_MODEL, batch_size=4, seed=0)


def tiny_pairs_dir(tmp_path, **manifest_overrides):
    restructure = [restructure_record(source_id=f"r{i}") for i in range(4)]
    approximate = [
        approximate_record(source_id=f"r{i}", target_id=f"r{j}")
        for i in range(3)
        for j in range(3)
        if i != j
    ]
    return write_pairs_dir(
        tmp_path / "pairs", restructure, approximate, **manifest_overrides
    )


def test_train_config_validation():
    with pytest.raises(ValueError):
        TrainConfig(learning_rate=0.0)
    with pytest.raises(ValueError):
        TrainConfig(batch_size=0)
    with pytest.raises(ValueError):
        TrainConfig(iteration_decay=0.0)


def test_history_has_one_record_per_scheduled_phase(tmp_path):
    pairs_dir = tiny_pairs_dir(tmp_path, iterations=2, epochs_per_task=3)
    manifest, by_task = load_training_data(pairs_dir)
    _, state = train_pairs(manifest, by_task, TINY_TRAIN)
    phases = [(record.iteration, record.task) for record in state.history]
    assert phases == [
        (0, "restructure"),
        (0, "approximate"),
        (1, "restructure"),
        (1, "approximate"),
    ]


def test_epochs_per_task_is_honored_exactly(tmp_path):
    pairs_dir = tiny_pairs_dir(tmp_path, iterations=1, epochs_per_task=5)
    manifest, by_task = load_training_data(pairs_dir)
    _, state = train_pairs(manifest, by_task, TINY_TRAIN)
    assert all(len(record.losses) == 5 for record in state.history)
    assert state.epoch == 5


def test_losses_are_finite_and_positive(tmp_path):
    pairs_dir = tiny_pairs_dir(tmp_path, iterations=1, epochs_per_task=2)
    manifest, by_task = load_training_data(pairs_dir)
    _, state = train_pairs(manifest, by_task, TINY_TRAIN)
    for record in state.history:
        assert all(0.0 < loss < 100.0 for loss in record.losses)


def test_zero_iterations_checkpoint_equals_initialization(tmp_path):
    pairs_dir = tiny_pairs_dir(tmp_path, iterations=0)
    bundle, state = train(pairs_dir, tmp_path / "ckpt", TINY_TRAIN)
    assert state.history == []
    manifest, by_task = load_training_data(pairs_dir)
    texts = []
    for task in manifest.task_order:
        for pair in by_task[task]:
            texts += [pair.source_text, pair.target_text]
            if pair.hint:
                texts.append(pair.hint)
    fresh = ModelBundle.initialize(
        Vocab.build(texts), TINY_MODEL, seed=0, hint_injection="prepend"
    )
    loaded = ModelBundle.load(tmp_path / "ckpt")
    for name, tensor in fresh.module.state_dict().items():
        assert torch.equal(tensor, loaded.module.state_dict()[name]), name


def test_training_one_task_leaves_the_other_decoder_untouched(tmp_path):
    pairs_dir = tiny_pairs_dir(
        tmp_path,
        iterations=1,
        epochs_per_task=2,
        task_order=["restructure"],
        pair_files={"restructure": "restructure_pairs.jsonl"},
    )
    manifest, by_task = load_training_data(pairs_dir)
    bundle, _ = train_pairs(manifest, by_task, TINY_TRAIN)
    texts = []
    for pair in by_task["restructure"]:
        texts += [pair.source_text, pair.target_text]
    fresh = ModelBundle.initialize(Vocab.build(texts), TINY_MODEL, seed=0)
    trained_state = bundle.module.state_dict()
    fresh_state = fresh.module.state_dict()
    # the shared embedding is aliased under every submodule path; only the
    # decoder's own parameters must stay at their initialization
    approx_keys = [
        key
        for key in trained_state
        if key.startswith("decoders.approximate.") and ".embedding." not in key
    ]
    assert approx_keys
    for key in approx_keys:
        assert torch.equal(trained_state[key], fresh_state[key]), key
    # ...while the shared encoder did move
    assert any(
        not torch.equal(trained_state[key], fresh_state[key])
        for key in trained_state
        if key.startswith("encoder.")
    )


def test_training_is_deterministic_for_a_fixed_seed(tmp_path):
    pairs_dir = tiny_pairs_dir(tmp_path, iterations=1, epochs_per_task=2)
    manifest, by_task = load_training_data(pairs_dir)
    first, first_state = train_pairs(manifest, by_task, TINY_TRAIN)
    second, second_state = train_pairs(manifest, by_task, TINY_TRAIN)
    assert [r.losses for r in first_state.history] == [
        r.losses for r in second_state.history
    ]
    for name, tensor in first.module.state_dict().items():
        assert torch.equal(tensor, second.module.state_dict()[name]), name


def test_train_writes_checkpoint_and_history(tmp_path):
    pairs_dir = tiny_pairs_dir(tmp_path, iterations=1, epochs_per_task=1)
    train(pairs_dir, tmp_path / "ckpt", TINY_TRAIN)
    for name in ("model.pt", "vocab.json", "config.json", "history.json"):
        assert (tmp_path / "ckpt" / name).is_file()
    payload = json.loads((tmp_path / "ckpt" / "history.json").read_text("utf-8"))
    assert len(payload["history"]) == 2


def test_train_state_json_round_trip(tmp_path):
    pairs_dir = tiny_pairs_dir(tmp_path, iterations=1, epochs_per_task=2)
    manifest, by_task = load_training_data(pairs_dir)
    _, state = train_pairs(manifest, by_task, TINY_TRAIN)
    restored = TrainState.from_json(state.to_json())
    assert restored == state
    assert [r.task for r in restored.losses_for("approximate")] == ["approximate"]
