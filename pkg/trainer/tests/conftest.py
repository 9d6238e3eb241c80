"""Shared fixtures: a synthetic 50-sentence corpus, pair generation through
the upstream CLI, a session-scoped trained checkpoint, and the acceptance
result summary hook.

The upstream augmentation toolkit is exercised strictly through its public
surfaces: the corpus file format, the pair/manifest files, and the CLI.
"""

from __future__ import annotations

import json
import random
import subprocess
import sys
import time
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from time import perf_counter

import pytest

from pairtrainer import TrainConfig, train

FRAMES = {
    "Agent-Tool": dict(
        subjects="cook smith nurse guard tailor miner scout clerk".split(),
        verbs="uses holds".split(),
        objects="knife hammer needle rope shears drill lamp sieve".split(),
        adposition="in",
        places="kitchen forge ward yard cellar".split(),
        count=17,
        prefix="ag",
    ),
    "Keeper-Item": dict(
        subjects="baker farmer sailor teacher singer potter weaver hunter".split(),
        verbs="kept stored".split(),
        objects="bread grain charts books drums bowls cloth traps".split(),
        adposition="near",
        places="oven barn cabin shelf stage".split(),
        count=17,
        prefix="kp",
    ),
    "Cause-Outcome": dict(
        subjects="storm flood frost quake blaze drought gale hail".split(),
        verbs="caused brought".split(),
        objects="delay damage panic losses outage famine alarm rust".split(),
        adposition="during",
        places="night harvest voyage winter match".split(),
        count=16,
        prefix="co",
    ),
}


@dataclass(frozen=True)
class ToyInstance:
    """One synthetic sentence with its marked form and entity surfaces."""

    id: str
    relation: str
    marked: str
    subject: str
    object: str


def build_toy_corpus(path: Path) -> list[ToyInstance]:
    """Write a 50-sentence, 3-relation corpus file; return its instances.

    Every sentence follows the frame ``The S V the O <adp> the L .`` with the
    subject span at token 2 and the object span at token 5, so restructuring
    rules have a movable oblique phrase and approximation pairs exist between
    all same-relation sentences.
    """
    upos = ["DET", "NOUN", "VERB", "DET", "NOUN", "ADP", "DET", "NOUN", "PUNCT"]
    heads = [2, 3, 0, 5, 3, 8, 8, 3, 3]
    deprels = ["det", "nsubj", "root", "det", "obj", "case", "det", "obl", "punct"]
    instances, blocks = [], []
    for relation, frame in FRAMES.items():
        for k in range(frame["count"]):
            subject = frame["subjects"][k % 8]
            verb = frame["verbs"][k % 2]
            obj = frame["objects"][(k + 3) % 8]
            place = frame["places"][k % 5]
            ident = f"{frame['prefix']}{k:02d}"
            forms = ["The", subject, verb, "the", obj, frame["adposition"], "the", place, "."]
            lines = [
                f"# id = {ident}",
                f"# relation = {relation}",
                "# subj = 2-2",
                "# obj = 5-5",
            ]
            lines += [
                f"{i}\t{form}\t{upos[i - 1]}\t{heads[i - 1]}\t{deprels[i - 1]}"
                for i, form in enumerate(forms, start=1)
            ]
            blocks.append("\n".join(lines))
            marked = " ".join(
                ["The", "[E_sub]", subject, "[/E_sub]", verb, "the", "[E_obj]", obj,
                 "[/E_obj]", frame["adposition"], "the", place, "."]
            )
            instances.append(ToyInstance(ident, relation, marked, subject, obj))
    path.write_text("\n\n".join(blocks) + "\n", encoding="utf-8")
    return instances


def validate_markers(text: str) -> bool:
    """True when each marker occurs once, spans are non-empty and disjoint."""
    tokens = text.split()
    positions = {}
    for marker in ("[E_sub]", "[/E_sub]", "[E_obj]", "[/E_obj]"):
        hits = [i for i, token in enumerate(tokens) if token == marker]
        if len(hits) != 1:
            return False
        positions[marker] = hits[0]
    s_open, s_close = positions["[E_sub]"], positions["[/E_sub]"]
    o_open, o_close = positions["[E_obj]"], positions["[/E_obj]"]
    if not (s_open < s_close and o_open < o_close):
        return False
    if s_close - s_open < 2 or o_close - o_open < 2:
        return False
    return s_close < o_open or o_close < s_open


def run_relaug(*args: str) -> subprocess.CompletedProcess:
    """Run the upstream CLI in a subprocess; the only code-level touchpoint."""
    return subprocess.run(
        [sys.executable, "-m", "relaug.cli", *args],
        capture_output=True,
        text=True,
        timeout=300,
    )


def sample_hints(instances, count: int, seed: str) -> list[tuple[ToyInstance, str]]:
    """Deterministically pair instances with same-relation entity surfaces."""
    pools: dict[str, list[str]] = {}
    for instance in instances:
        pools.setdefault(instance.relation, []).extend(
            (instance.subject, instance.object)
        )
    rng = random.Random(seed)
    return [
        (instances[i % len(instances)], rng.choice(pools[instances[i % len(instances)].relation]))
        for i in range(count)
    ]


@pytest.fixture(scope="session")
def toy_setup(tmp_path_factory):
    """The toy corpus plus its pair directory, built through the upstream CLI."""
    root = tmp_path_factory.mktemp("toy")
    corpus = root / "toy50.conllu"
    instances = build_toy_corpus(corpus)
    pairs_dir = root / "pairs"
    result = run_relaug("pairs", str(corpus), "--out", str(pairs_dir), "--seed", "0")
    assert result.returncode == 0, result.stderr
    return type(
        "ToySetup",
        (),
        dict(root=root, corpus=corpus, instances=instances, pairs_dir=pairs_dir),
    )


@pytest.fixture(scope="session")
def trained(toy_setup, tmp_path_factory):
    """One full manifest-schedule training run, reused by every consumer."""
    checkpoint = tmp_path_factory.mktemp("checkpoint")
    started = time.perf_counter()
    bundle, state = train(toy_setup.pairs_dir, checkpoint, TrainConfig(seed=0))
    seconds = time.perf_counter() - started
    return type(
        "Trained",
        (),
        dict(bundle=bundle, state=state, checkpoint=checkpoint, seconds=seconds),
    )


SECONDARY_RESULTS: list[str] = []


@contextmanager
def criterion(name: str, budget: float | None = None):
    """Record one acceptance criterion's outcome for the terminal summary."""
    start = perf_counter()
    try:
        yield
    except BaseException:
        SECONDARY_RESULTS.append(f"FAIL  {name}")
        raise
    elapsed = perf_counter() - start
    if budget is not None and elapsed >= budget:
        SECONDARY_RESULTS.append(
            f"FAIL  {name} ({elapsed:.2f}s, budget {budget:g}s)"
        )
        pytest.fail(f"{name}: runtime {elapsed:.2f}s exceeds {budget:g}s budget")
    timing = f" ({elapsed:.2f}s < {budget:g}s)" if budget is not None else ""
    SECONDARY_RESULTS.append(f"PASS  {name}{timing}")


def pytest_terminal_summary(terminalreporter):
    if SECONDARY_RESULTS:
        terminalreporter.section("trainer acceptance criteria")
        for line in SECONDARY_RESULTS:
            terminalreporter.write_line(line)


def write_pair_file(path: Path, records: list[dict]) -> None:
    """Write pair records in the documented JSON Lines layout."""
    with path.open("w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record) + "\n")


def restructure_record(source_id="s1", text="The [E_sub] cook [/E_sub] uses the [E_obj] knife [/E_obj] .", target=None):
    return {
        "task": "restructure",
        "source_text": text,
        "hint": None,
        "target_text": target or text,
        "relation": "Agent-Tool",
        "source_id": source_id,
        "target_id": source_id,
        "pattern_distance": None,
    }


def approximate_record(
    source_id="s1",
    target_id="s2",
    hint="hammer",
    text="The [E_sub] cook [/E_sub] uses the [E_obj] knife [/E_obj] .",
    target="The [E_sub] smith [/E_sub] holds the [E_obj] hammer [/E_obj] .",
):
    return {
        "task": "approximate",
        "source_text": text,
        "hint": hint,
        "target_text": target,
        "relation": "Agent-Tool",
        "source_id": source_id,
        "target_id": target_id,
        "pattern_distance": 1,
    }


def manifest_payload(**overrides) -> dict:
    payload = {
        "iterations": 2,
        "epochs_per_task": 5,
        "task_order": ["restructure", "approximate"],
        "pair_files": {
            "restructure": "restructure_pairs.jsonl",
            "approximate": "approximate_pairs.jsonl",
        },
        "lambda": 3,
        "seed": 0,
        "hint_injection": "prepend",
    }
    payload.update(overrides)
    return payload


def write_pairs_dir(
    root: Path,
    restructure: list[dict],
    approximate: list[dict],
    **manifest_overrides,
) -> Path:
    """Assemble a complete pair directory in the documented layout."""
    root.mkdir(parents=True, exist_ok=True)
    write_pair_file(root / "restructure_pairs.jsonl", restructure)
    write_pair_file(root / "approximate_pairs.jsonl", approximate)
    (root / "manifest.json").write_text(
        json.dumps(manifest_payload(**manifest_overrides), indent=2) + "\n",
        encoding="utf-8",
    )
    return root
