"""Construction and serialization of the two seq2seq training-pair sets.

Restructuring pairs map each sentence onto its deterministically reordered
self; approximation pairs map each sentence onto every same-relation
sentence whose pattern lies strictly within the distance threshold, with an
entity of the target attached as a generation hint. The pair files plus a
schedule manifest tell the downstream trainer how to alternate the two
tasks.
"""

import json
import os
import random
from dataclasses import dataclass, field

from .corpus import DEFAULT_SCHEME, inject_markers
from .errors import FormatError, InvariantError
from .pattern import MatchConfig, match_targets
from .restructure import DEFAULT_RULESET, restructure

TASK_RESTRUCTURE = "restructure"
TASK_APPROXIMATE = "approximate"
TASKS = (TASK_RESTRUCTURE, TASK_APPROXIMATE)

PAIR_FIELDS = (
    "task",
    "source_text",
    "hint",
    "target_text",
    "relation",
    "source_id",
    "target_id",
    "pattern_distance",
)

HINT_POLICIES = ("uniform", "subject", "object")


@dataclass(frozen=True)
class PairRecord:
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
            raise InvariantError(f"unknown task {self.task!r}")
        if self.task == TASK_RESTRUCTURE:
            if self.hint is not None or self.pattern_distance is not None:
                raise InvariantError("restructure records carry no hint or distance")
            if self.target_id != self.source_id:
                raise InvariantError("restructure records pair an instance with itself")
        else:
            if self.hint is None or self.pattern_distance is None:
                raise InvariantError("approximate records need a hint and a distance")

    def to_json(self):
        return json.dumps(
            {name: getattr(self, name) for name in PAIR_FIELDS}, ensure_ascii=False
        )

    @classmethod
    def from_json(cls, line):
        data = json.loads(line)
        missing = [name for name in PAIR_FIELDS if name not in data]
        if missing:
            raise FormatError(f"pair record missing fields {missing}")
        return cls(**{name: data[name] for name in PAIR_FIELDS})


@dataclass
class PairStats:
    restructure_count: int = 0
    approximate_count: int = 0
    per_relation: dict = field(default_factory=dict)

    @classmethod
    def of(cls, records):
        stats = cls()
        for record in records:
            slot = stats.per_relation.setdefault(
                record.relation, {TASK_RESTRUCTURE: 0, TASK_APPROXIMATE: 0}
            )
            slot[record.task] += 1
            if record.task == TASK_RESTRUCTURE:
                stats.restructure_count += 1
            else:
                stats.approximate_count += 1
        return stats


@dataclass
class PairSet:
    records: list

    @property
    def stats(self):
        return PairStats.of(self.records)

    def __len__(self):
        return len(self.records)

    @classmethod
    def merged(cls, *sets):
        records = []
        for pairset in sets:
            records.extend(pairset.records)
        return cls(records)


@dataclass
class ScheduleManifest:
    """How the trainer should consume the pair files."""

    iterations: int = 2
    epochs_per_task: int = 5
    task_order: tuple = (TASK_RESTRUCTURE, TASK_APPROXIMATE)
    pair_files: dict = field(
        default_factory=lambda: {
            TASK_RESTRUCTURE: "restructure_pairs.jsonl",
            TASK_APPROXIMATE: "approximate_pairs.jsonl",
        }
    )
    threshold: int = 3
    seed: int = 0
    hint_injection: str = "prepend"

    def __post_init__(self):
        if self.iterations < 1:
            raise InvariantError("iterations must be >= 1")
        if self.epochs_per_task < 1:
            raise InvariantError("epochs_per_task must be >= 1")

    def to_json(self):
        return json.dumps(
            {
                "iterations": self.iterations,
                "epochs_per_task": self.epochs_per_task,
                "task_order": list(self.task_order),
                "pair_files": self.pair_files,
                "lambda": self.threshold,
                "seed": self.seed,
                "hint_injection": self.hint_injection,
            },
            indent=2,
            ensure_ascii=False,
        )

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        return cls(
            iterations=data["iterations"],
            epochs_per_task=data["epochs_per_task"],
            task_order=tuple(data["task_order"]),
            pair_files=data["pair_files"],
            threshold=data["lambda"],
            seed=data["seed"],
            hint_injection=data.get("hint_injection", "prepend"),
        )


def build_restructure_pairs(corpus, rules=DEFAULT_RULESET, scheme=DEFAULT_SCHEME):
    """One restructuring pair per instance, ordered by (relation, id)."""
    records = []
    for relation in corpus.relations:
        for instance_id in sorted(corpus.by_relation[relation]):
            inst = corpus.by_id[instance_id]
            records.append(
                PairRecord(
                    task=TASK_RESTRUCTURE,
                    source_text=inject_markers(inst, scheme),
                    hint=None,
                    target_text=inject_markers(restructure(inst, rules), scheme),
                    relation=relation,
                    source_id=instance_id,
                    target_id=instance_id,
                    pattern_distance=None,
                )
            )
    return PairSet(records)


def _pick_hint(target, policy, seed, source_id):
    if policy not in HINT_POLICIES:
        raise InvariantError(f"unknown hint policy {policy!r}")
    if policy == "uniform":
        rng = random.Random(f"hint:{seed}:{source_id}:{target.id}")
        policy = rng.choice(("subject", "object"))
    span = target.subject if policy == "subject" else target.object
    return target.span_surface(span)


def build_approx_pairs(
    corpus,
    index,
    cfg=MatchConfig(),
    hint_policy="uniform",
    seed=0,
    scheme=DEFAULT_SCHEME,
):
    """One approximation pair per qualifying (source, target) ordered pair.

    The hint is an entity surface string of the *target* instance: the policy
    picks the subject, the object, or (default) a per-pair seeded coin flip.
    """
    marked = {inst.id: inject_markers(inst, scheme) for inst in corpus.instances}
    records = []
    for relation in corpus.relations:
        for source_id in sorted(corpus.by_relation[relation]):
            for target_id, distance in match_targets(source_id, index, cfg):
                target = corpus.by_id[target_id]
                records.append(
                    PairRecord(
                        task=TASK_APPROXIMATE,
                        source_text=marked[source_id],
                        hint=_pick_hint(target, hint_policy, seed, source_id),
                        target_text=marked[target_id],
                        relation=relation,
                        source_id=source_id,
                        target_id=target_id,
                        pattern_distance=distance,
                    )
                )
    records.sort(key=lambda r: (r.relation, r.source_id, r.target_id))
    return PairSet(records)


def emit(pairset, manifest, out_dir):
    """Write one pair file per task plus the manifest; byte-deterministic.

    Returns the mapping of written paths. Both pair files are always
    produced, empty when a task has no records.
    """
    os.makedirs(out_dir, exist_ok=True)
    by_task = {task: [] for task in TASKS}
    for record in pairset.records:
        by_task[record.task].append(record)

    paths = {}
    for task in manifest.task_order:
        path = os.path.join(out_dir, manifest.pair_files[task])
        try:
            with open(path, "w", encoding="utf-8", newline="\n") as handle:
                for record in by_task[task]:
                    handle.write(record.to_json())
                    handle.write("\n")
        except OSError as exc:
            raise FormatError(f"cannot write pair file {path}: {exc}") from exc
        paths[task] = path

    manifest_path = os.path.join(out_dir, "manifest.json")
    with open(manifest_path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(manifest.to_json())
        handle.write("\n")
    paths["manifest"] = manifest_path
    return paths


def read_pairs(path):
    records = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                records.append(PairRecord.from_json(line))
    return records


def read_manifest(path):
    with open(path, encoding="utf-8") as handle:
        return ScheduleManifest.from_json(handle.read())
