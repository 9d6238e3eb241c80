"""Pseudo-sentence generation: sample requests, call a backend, validate.

A generation request is a marked source sentence plus an entity hint drawn
from the same relation. Backends answer with marked text; whatever parses
cleanly becomes a new instance inheriting the request's relation label,
everything else lands in the reject report. Three backends exist: a
deterministic in-process template backend (for tests and dry runs), a child
process speaking JSON lines, and a remote HTTP endpoint.
"""

import json
import random
import subprocess
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import requests

from .corpus import (
    DEFAULT_SCHEME,
    OBJECT,
    Provenance,
    REInstance,
    SUBJECT,
    Span,
    Token,
    inject_markers,
    parse_marked,
    write_corpus,
)
from .errors import (
    BackendUnavailable,
    InvariantError,
    MarkerError,
    RelationTooSmall,
)
from .pattern import MatchConfig, build_index, match_targets

TEMPLATE = "template"
COMMAND = "command"
REMOTE = "remote"


@dataclass(frozen=True)
class GenRequest:
    request_id: str
    source_text: str
    hint: str
    relation: str

    def __post_init__(self):
        if not self.hint:
            raise InvariantError("generation request needs a non-empty hint")

    @property
    def source_id(self):
        """Instance id encoded in the request id (everything before the last '#')."""
        return self.request_id.rsplit("#", 1)[0]

    def to_json(self):
        return json.dumps(
            {
                "request_id": self.request_id,
                "source_text": self.source_text,
                "hint": self.hint,
                "relation": self.relation,
            },
            ensure_ascii=False,
        )


@dataclass(frozen=True)
class GenResponse:
    request_id: str
    generated_text: str


@dataclass(frozen=True)
class BackendSpec:
    kind: str
    target: str | None = None
    strict_hint: bool = False
    retries: int = 2
    max_in_flight: int = 8

    def __post_init__(self):
        if self.kind not in (TEMPLATE, COMMAND, REMOTE):
            raise InvariantError(f"unknown backend kind {self.kind!r}")
        if self.kind != TEMPLATE and not self.target:
            raise InvariantError(f"{self.kind} backend needs a path or url")


def parse_backend_spec(text, strict_hint=False):
    """Parse the CLI form: template | command:<path> | remote:<url>."""
    if text == TEMPLATE:
        return BackendSpec(TEMPLATE, strict_hint=strict_hint)
    kind, sep, target = text.partition(":")
    if sep and kind in (COMMAND, REMOTE):
        return BackendSpec(kind, target, strict_hint=strict_hint)
    raise InvariantError(f"unknown backend {text!r}")


@dataclass
class Rejection:
    request_id: str
    reason: str
    generated_text: str | None = None


@dataclass
class RejectReport:
    requested: int = 0
    accepted: int = 0
    rejections: list = field(default_factory=list)

    def write(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            for r in self.rejections:
                handle.write(
                    json.dumps(
                        {
                            "request_id": r.request_id,
                            "reason": r.reason,
                            "generated_text": r.generated_text,
                        },
                        ensure_ascii=False,
                    )
                )
                handle.write("\n")


def sample_requests(corpus, multiple, seed=0, scheme=DEFAULT_SCHEME):
    """Exactly multiple x |corpus| requests, each source paired with a
    seeded-uniform entity hint from its own relation group."""
    if multiple < 1:
        raise InvariantError("multiple must be >= 1")
    pools = {}
    for relation in corpus.relations:
        ids = corpus.by_relation[relation]
        if not ids:
            raise RelationTooSmall(f"relation {relation!r} has no instances")
        pool = []
        for instance_id in ids:
            inst = corpus.by_id[instance_id]
            pool.append(inst.span_surface(inst.subject))
            pool.append(inst.span_surface(inst.object))
        pools[relation] = pool

    requests_out = []
    for inst in corpus.instances:
        marked = inject_markers(inst, scheme)
        for k in range(multiple):
            rng = random.Random(f"req:{seed}:{inst.id}:{k}")
            requests_out.append(
                GenRequest(
                    request_id=f"{inst.id}#{k}",
                    source_text=marked,
                    hint=rng.choice(pools[inst.relation]),
                    relation=inst.relation,
                )
            )
    return requests_out


class TemplateBackend:
    """Deterministic stand-in for a trained generator.

    Answers a request by picking a same-relation instance whose pattern is
    strictly within the distance threshold of the request's source (the
    source itself when nothing qualifies) and splicing the hint into its
    subject or object slot. Output is valid marked text by construction.
    """

    name = TEMPLATE

    def __init__(self, corpus, cfg=MatchConfig(), seed=0, scheme=DEFAULT_SCHEME):
        self.corpus = corpus
        self.cfg = cfg
        self.seed = seed
        self.scheme = scheme
        self.index = build_index(corpus)
        self._by_text = {}
        for inst in corpus.instances:
            self._by_text.setdefault(inject_markers(inst, scheme), inst.id)

    def _resolve_source(self, request):
        candidate = request.source_id
        if candidate in self.corpus.by_id:
            return candidate
        return self._by_text.get(request.source_text)

    def __call__(self, request):
        rng = random.Random(f"tpl:{self.seed}:{request.request_id}")
        source_id = self._resolve_source(request)
        target = None
        if source_id is not None:
            hits = [tid for tid, _ in match_targets(source_id, self.index, self.cfg)]
            target = self.corpus.by_id[rng.choice(hits)] if hits else self.corpus.by_id[source_id]
        slot = rng.choice((SUBJECT, OBJECT))
        if target is not None:
            text = substitute_entity(target, slot, request.hint, self.scheme)
        else:
            # unknown source: splice the hint into the request text itself
            forms, subject, object_ = parse_marked(request.source_text, self.scheme)
            shadow = _plain_instance("adhoc", forms, subject, object_, request.relation)
            text = substitute_entity(shadow, slot, request.hint, self.scheme)
        return GenResponse(request.request_id, text)


def substitute_entity(instance, slot, hint, scheme=DEFAULT_SCHEME):
    """Marked text of `instance` with the hint replacing one entity span."""
    hint_forms = hint.split()
    if not hint_forms:
        raise InvariantError("hint has no tokens")
    spans = {SUBJECT: instance.subject, OBJECT: instance.object}
    chosen = spans[slot]
    pieces = []
    for span, open_m, close_m in (
        (instance.subject, scheme.subj_open, scheme.subj_close),
        (instance.object, scheme.obj_open, scheme.obj_close),
    ):
        content = hint_forms if span is chosen else instance.forms[span.start - 1 : span.end]
        pieces.append((span.start, [open_m, *content, close_m]))
    out = []
    consumed = set(instance.subject.indices()) | set(instance.object.indices())
    insert_at = dict(pieces)
    for idx, form in enumerate(instance.forms, start=1):
        if idx in insert_at:
            out.extend(insert_at[idx])
        if idx not in consumed:
            out.append(form)
    return " ".join(out)


def _plain_instance(instance_id, forms, subject, object_, relation, provenance=None):
    tokens = [Token(i, form, None, None) for i, form in enumerate(forms, start=1)]
    inst = REInstance(
        id=instance_id,
        tokens=tokens,
        subject=subject,
        object=object_,
        relation=relation,
        provenance=provenance,
    )
    return inst.validate()


class CommandBackend:
    """Child process speaking one JSON request/response per line, in order."""

    name = COMMAND

    def __init__(self, command):
        self.command = command
        try:
            self.proc = subprocess.Popen(
                command,
                shell=True,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                encoding="utf-8",
            )
        except OSError as exc:
            raise BackendUnavailable(f"cannot start {command!r}: {exc}") from exc

    def __call__(self, request):
        try:
            self.proc.stdin.write(request.to_json() + "\n")
            self.proc.stdin.flush()
            line = self.proc.stdout.readline()
        except (BrokenPipeError, OSError) as exc:
            raise BackendUnavailable(f"backend process died: {exc}") from exc
        if not line:
            raise BackendUnavailable(f"backend process closed its output: {self.command!r}")
        data = json.loads(line)
        return GenResponse(data["request_id"], data["generated_text"])

    def close(self):
        if self.proc.stdin:
            self.proc.stdin.close()
        self.proc.wait(timeout=10)


class RemoteBackend:
    """HTTP endpoint: POST the request JSON, expect a 200 JSON reply."""

    name = REMOTE

    def __init__(self, url, timeout=30):
        self.url = url
        self.timeout = timeout

    def __call__(self, request):
        try:
            reply = requests.post(
                self.url,
                json={
                    "request_id": request.request_id,
                    "source_text": request.source_text,
                    "hint": request.hint,
                    "relation": request.relation,
                },
                timeout=self.timeout,
            )
        except requests.exceptions.ConnectionError as exc:
            raise BackendUnavailable(f"cannot reach {self.url}: {exc}") from exc
        if reply.status_code != 200:
            raise _RetryableFailure(f"status {reply.status_code}")
        data = reply.json()
        return GenResponse(data["request_id"], data["generated_text"])


class _RetryableFailure(Exception):
    pass


def _make_backend(spec, corpus, match_cfg, seed, scheme):
    if spec.kind == TEMPLATE:
        if corpus is None:
            raise InvariantError("template backend needs a corpus snapshot")
        return TemplateBackend(corpus, match_cfg or MatchConfig(), seed, scheme)
    if spec.kind == COMMAND:
        return CommandBackend(spec.target)
    return RemoteBackend(spec.target)


def _validate(request, response, spec, scheme):
    """Turn a backend response into an instance, or a Rejection."""
    try:
        forms, subject, object_ = parse_marked(response.generated_text, scheme)
    except MarkerError as exc:
        return Rejection(request.request_id, type(exc).__name__, response.generated_text)
    if spec.strict_hint:
        inst_probe = _plain_instance("probe", forms, subject, object_, request.relation)
        surfaces = (inst_probe.span_surface(subject), inst_probe.span_surface(object_))
        if not any(request.hint in s for s in surfaces):
            return Rejection(request.request_id, "HintMissing", response.generated_text)
    return _plain_instance(
        request.request_id,
        forms,
        subject,
        object_,
        request.relation,
        Provenance(request.source_id, request.hint, spec.kind),
    )


def generate(
    requests_in,
    spec,
    corpus=None,
    match_cfg=None,
    seed=0,
    scheme=DEFAULT_SCHEME,
):
    """Run every request through the backend; returns (instances, report).

    Transient failures (non-200, malformed reply) are retried up to
    spec.retries extra attempts, then recorded as rejections; marker
    validation failures are retried the same way since a sampling backend
    may succeed on a second draw. Results keep request order.
    """
    backend = _make_backend(spec, corpus, match_cfg, seed, scheme)
    report = RejectReport(requested=len(requests_in))
    accepted = []

    def run_one(request):
        outcome = None
        for _ in range(1 + max(spec.retries, 0)):
            try:
                response = backend(request)
            except (_RetryableFailure, json.JSONDecodeError, KeyError) as exc:
                outcome = Rejection(request.request_id, f"BackendFailure: {exc}")
                continue
            if response.request_id != request.request_id:
                outcome = Rejection(
                    request.request_id,
                    f"BackendFailure: reply for {response.request_id!r}",
                )
                continue
            outcome = _validate(request, response, spec, scheme)
            if isinstance(outcome, REInstance):
                return outcome
        return outcome

    if spec.kind == REMOTE and spec.max_in_flight > 1:
        with ThreadPoolExecutor(max_workers=spec.max_in_flight) as pool:
            outcomes = list(pool.map(run_one, requests_in))
    else:
        outcomes = [run_one(request) for request in requests_in]

    if spec.kind == COMMAND:
        backend.close()

    for outcome in outcomes:
        if isinstance(outcome, REInstance):
            accepted.append(outcome)
        else:
            report.rejections.append(outcome)
    report.accepted = len(accepted)
    return accepted, report


def write_augmented(instances, path):
    """Serialize generated instances in the corpus file profile."""
    write_corpus(instances, path)
