"""Parsed relation-extraction corpora and the entity-marker text form.

A corpus is a set of sentences, each carrying a dependency parse, a subject
span, an object span, and a relation label. Sentences are stored and
exchanged in a small CoNLL-U-style profile (see `read_corpus`), and move in
and out of generation models as whitespace-joined token strings in which the
two entities are delimited by four reserved marker tokens.
"""

from dataclasses import dataclass, field

from .errors import (
    DuplicateMarker,
    EmptyEntity,
    FormatError,
    InterleavedMarkers,
    InvariantError,
    MissingMarker,
)

SUBJECT = "subject"
OBJECT = "object"


@dataclass(frozen=True)
class MarkerScheme:
    """The four reserved tokens delimiting entity spans in marked text."""

    subj_open: str = "[E_sub]"
    subj_close: str = "[/E_sub]"
    obj_open: str = "[E_obj]"
    obj_close: str = "[/E_obj]"

    def __post_init__(self):
        markers = self.all()
        if len(set(markers)) != 4:
            raise InvariantError(f"marker strings must be pairwise distinct: {markers}")
        for m in markers:
            if not m or m.split() != [m]:
                raise InvariantError(f"marker must be a single non-empty token: {m!r}")

    def all(self):
        return (self.subj_open, self.subj_close, self.obj_open, self.obj_close)


DEFAULT_SCHEME = MarkerScheme()


@dataclass(frozen=True)
class Token:
    """One token of a sentence; head/deprel are None for unparsed text."""

    index: int
    form: str
    head: int | None
    deprel: str | None
    upos: str | None = None

    def __post_init__(self):
        if self.index < 1:
            raise InvariantError(f"token index must be >= 1, got {self.index}")
        if not self.form or self.form.split() != [self.form]:
            raise InvariantError(f"token form must be non-empty and whitespace-free: {self.form!r}")
        if (self.head is None) != (self.deprel is None):
            raise InvariantError(f"token {self.index}: head and deprel must be set together")
        if self.head is not None:
            if self.head < 0:
                raise InvariantError(f"token {self.index}: head must be >= 0")
            if self.head == self.index:
                raise InvariantError(f"token {self.index}: token cannot govern itself")


@dataclass(frozen=True)
class Span:
    """A contiguous 1-based token range marking an entity mention."""

    start: int
    end: int
    role: str

    def __post_init__(self):
        if self.role not in (SUBJECT, OBJECT):
            raise InvariantError(f"span role must be subject or object, got {self.role!r}")
        if not 1 <= self.start <= self.end:
            raise InvariantError(f"bad span bounds {self.start}-{self.end}")

    def indices(self):
        return range(self.start, self.end + 1)

    def overlaps(self, other):
        return self.start <= other.end and other.start <= self.end


@dataclass(frozen=True)
class Provenance:
    """Where a generated instance came from."""

    source_id: str
    hint: str
    backend: str


@dataclass
class REInstance:
    """A sentence with its parse, entity spans, and relation label."""

    id: str
    tokens: list
    subject: Span
    object: Span
    relation: str
    provenance: Provenance | None = None

    @property
    def forms(self):
        return [t.form for t in self.tokens]

    @property
    def parsed(self):
        return all(t.head is not None for t in self.tokens)

    def span_surface(self, span):
        return " ".join(self.forms[span.start - 1 : span.end])

    def validate(self):
        n = len(self.tokens)
        if n == 0:
            raise InvariantError(f"instance {self.id}: empty sentence")
        for pos, tok in enumerate(self.tokens, start=1):
            if tok.index != pos:
                raise InvariantError(f"instance {self.id}: token ids must run 1..{n}")
        for span in (self.subject, self.object):
            if span.end > n:
                raise InvariantError(f"instance {self.id}: span {span.start}-{span.end} exceeds length {n}")
        if self.subject.overlaps(self.object):
            raise InvariantError(f"instance {self.id}: subject and object spans overlap")
        if self.subject.role != SUBJECT or self.object.role != OBJECT:
            raise InvariantError(f"instance {self.id}: span roles are swapped")
        if self.parsed:
            self._validate_tree()
        elif any(t.head is not None for t in self.tokens):
            raise InvariantError(f"instance {self.id}: mixed parsed and unparsed tokens")
        return self

    def _validate_tree(self):
        n = len(self.tokens)
        roots = [t.index for t in self.tokens if t.head == 0]
        if len(roots) != 1:
            raise InvariantError(f"instance {self.id}: expected exactly one root, found {len(roots)}")
        for t in self.tokens:
            if t.head > n:
                raise InvariantError(f"instance {self.id}: token {t.index} has head {t.head} > {n}")
        # every token must reach the root by following heads; a cycle never does
        ok = set()
        for t in self.tokens:
            trail = []
            cur = t.index
            while cur != 0 and cur not in ok:
                if cur in trail:
                    raise InvariantError(f"instance {self.id}: head cycle through token {cur}")
                trail.append(cur)
                cur = self.tokens[cur - 1].head
            ok.update(trail)


@dataclass
class Corpus:
    """An immutable collection of validated instances, grouped by relation."""

    instances: list
    relations: list = field(default_factory=list)
    by_relation: dict = field(default_factory=dict)
    by_id: dict = field(default_factory=dict)

    @classmethod
    def from_instances(cls, instances, relations=None):
        """Assemble and cross-validate a corpus.

        `relations` closes the label vocabulary; by default it is collected
        from the data in first-seen order.
        """
        closed = relations is not None
        seen_relations = list(relations) if closed else []
        by_relation = {}
        by_id = {}
        for inst in instances:
            inst.validate()
            if inst.id in by_id:
                raise InvariantError(f"duplicate instance id {inst.id!r}")
            if inst.relation not in seen_relations:
                if closed:
                    raise InvariantError(
                        f"instance {inst.id}: unknown relation {inst.relation!r}"
                    )
                seen_relations.append(inst.relation)
            by_id[inst.id] = inst
            by_relation.setdefault(inst.relation, []).append(inst.id)
        return cls(list(instances), seen_relations, by_relation, by_id)

    def __len__(self):
        return len(self.instances)


# ---------------------------------------------------------------------------
# marked-text form

def inject_markers(instance, scheme=DEFAULT_SCHEME):
    """Render the sentence with entity markers, tokens joined by single spaces."""
    opens = {instance.subject.start: scheme.subj_open, instance.object.start: scheme.obj_open}
    closes = {instance.subject.end: scheme.subj_close, instance.object.end: scheme.obj_close}
    out = []
    for tok in instance.tokens:
        if tok.index in opens:
            out.append(opens[tok.index])
        out.append(tok.form)
        if tok.index in closes:
            out.append(closes[tok.index])
    return " ".join(out)


def parse_marked(text, scheme=DEFAULT_SCHEME):
    """Recover (forms, subject span, object span) from marker-annotated text.

    The text must contain each of the four markers exactly once, each open
    before its close, the two pairs disjoint, and at least one token inside
    each pair. Returned spans use 1-based indices into the marker-free
    token list.
    """
    tokens = text.split()
    positions = {m: [] for m in scheme.all()}
    for i, tok in enumerate(tokens):
        if tok in positions:
            positions[tok].append(i)
    for marker, hits in positions.items():
        if not hits:
            raise MissingMarker(marker)
        if len(hits) > 1:
            raise DuplicateMarker(marker)
    so, sc = positions[scheme.subj_open][0], positions[scheme.subj_close][0]
    oo, oc = positions[scheme.obj_open][0], positions[scheme.obj_close][0]
    if sc < so:
        raise InterleavedMarkers(scheme.subj_close, f"{scheme.subj_close} precedes {scheme.subj_open}")
    if oc < oo:
        raise InterleavedMarkers(scheme.obj_close, f"{scheme.obj_close} precedes {scheme.obj_open}")
    if not (sc < oo or oc < so):
        raise InterleavedMarkers(scheme.obj_open, "subject and object marker pairs overlap")
    if sc == so + 1:
        raise EmptyEntity(scheme.subj_open)
    if oc == oo + 1:
        raise EmptyEntity(scheme.obj_open)

    marker_set = set(scheme.all())
    forms = []
    plain_index = {}  # marked position -> 1-based plain position
    for i, tok in enumerate(tokens):
        if tok in marker_set:
            continue
        forms.append(tok)
        plain_index[i] = len(forms)
    subject = Span(plain_index[so + 1], plain_index[sc - 1], SUBJECT)
    object_ = Span(plain_index[oo + 1], plain_index[oc - 1], OBJECT)
    return forms, subject, object_


# ---------------------------------------------------------------------------
# CoNLL-U-plus profile
#
# One blank-line-separated block per instance:
#   # id = <string>          # relation = <label>
#   # subj = <start>-<end>   # obj = <start>-<end>
#   optional: # provenance = <source_id>|<hint>|<backend>
# followed by TAB-separated token lines: ID FORM UPOS HEAD DEPREL.
# "_" means absent and is always legal in UPOS; it is legal in HEAD/DEPREL
# only when reading with allow_unparsed (generated corpora carry no parse).

_REQUIRED_COMMENTS = ("id", "relation", "subj", "obj")


def _parse_span(value, role, line):
    parts = value.split("-")
    if len(parts) != 2:
        raise FormatError(f"expected <start>-<end>, got {value!r}", line)
    try:
        start, end = int(parts[0]), int(parts[1])
    except ValueError:
        raise FormatError(f"non-integer span bound in {value!r}", line) from None
    try:
        return Span(start, end, role)
    except InvariantError as exc:
        raise FormatError(str(exc), line) from None


def _finish_block(comments, rows, first_line, scheme):
    for key in _REQUIRED_COMMENTS:
        if key not in comments:
            raise FormatError(f"block is missing required comment '# {key} = ...'", first_line)
    tokens = []
    for line_no, cols in rows:
        try:
            index = int(cols[0])
        except ValueError:
            raise FormatError(f"non-integer token id {cols[0]!r}", line_no) from None
        form = cols[1]
        upos = None if cols[2] == "_" else cols[2]
        if cols[3] == "_" or cols[4] == "_":
            if cols[3] != "_" or cols[4] != "_":
                raise FormatError("HEAD and DEPREL must both be '_' or both be set", line_no)
            head, deprel = None, None
        else:
            try:
                head = int(cols[3])
            except ValueError:
                raise FormatError(f"non-integer head {cols[3]!r}", line_no) from None
            deprel = cols[4]
        if form in scheme.all():
            raise FormatError(f"token form {form!r} collides with a reserved marker", line_no)
        try:
            tokens.append(Token(index, form, head, deprel, upos))
        except InvariantError as exc:
            raise FormatError(str(exc), line_no) from None

    provenance = None
    if "provenance" in comments:
        fields = comments["provenance"].split("|")
        if len(fields) == 3:
            provenance = Provenance(*fields)
        else:
            raise FormatError("provenance must be <source_id>|<hint>|<backend>", first_line)
    instance = REInstance(
        id=comments["id"],
        tokens=tokens,
        subject=_parse_span(comments["subj"], SUBJECT, first_line),
        object=_parse_span(comments["obj"], OBJECT, first_line),
        relation=comments["relation"],
        provenance=provenance,
    )
    try:
        instance.validate()
    except InvariantError as exc:
        raise FormatError(str(exc), first_line) from None
    return instance


def read_corpus(path, scheme=DEFAULT_SCHEME, relations=None, allow_unparsed=False):
    """Read and validate a corpus file; deterministic in the input bytes."""
    instances = []
    comments, rows = {}, []
    first_line = None
    with open(path, encoding="utf-8") as handle:
        for line_no, raw in enumerate(handle, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                if rows or comments:
                    instances.append(_finish_block(comments, rows, first_line, scheme))
                    comments, rows, first_line = {}, [], None
                continue
            if first_line is None:
                first_line = line_no
            if line.startswith("#"):
                body = line[1:].strip()
                key, sep, value = body.partition("=")
                if not sep:
                    raise FormatError(f"malformed comment {line!r}", line_no)
                comments[key.strip()] = value.strip()
                continue
            cols = line.split("\t")
            if len(cols) != 5:
                raise FormatError(f"expected 5 TAB-separated columns, got {len(cols)}", line_no)
            rows.append((line_no, cols))
    if rows or comments:
        instances.append(_finish_block(comments, rows, first_line, scheme))

    if not allow_unparsed:
        for inst in instances:
            if not inst.parsed:
                raise FormatError(f"instance {inst.id}: missing dependency parse")
    return Corpus.from_instances(instances, relations=relations)


def ingest(path, format="conllu-plus", scheme=DEFAULT_SCHEME, relations=None, allow_unparsed=False):
    """Ingest a corpus file in the named format (only 'conllu-plus' exists)."""
    if format != "conllu-plus":
        raise FormatError(f"unknown corpus format {format!r}")
    return read_corpus(
        path, scheme=scheme, relations=relations, allow_unparsed=allow_unparsed
    )


def instance_to_block(instance):
    lines = [
        f"# id = {instance.id}",
        f"# relation = {instance.relation}",
        f"# subj = {instance.subject.start}-{instance.subject.end}",
        f"# obj = {instance.object.start}-{instance.object.end}",
    ]
    if instance.provenance is not None:
        p = instance.provenance
        lines.append(f"# provenance = {p.source_id}|{p.hint}|{p.backend}")
    for tok in instance.tokens:
        upos = tok.upos if tok.upos is not None else "_"
        head = str(tok.head) if tok.head is not None else "_"
        deprel = tok.deprel if tok.deprel is not None else "_"
        lines.append(f"{tok.index}\t{tok.form}\t{upos}\t{head}\t{deprel}")
    return "\n".join(lines) + "\n"


def write_corpus(instances, path):
    """Serialize instances (an iterable or a Corpus) back to the file profile."""
    if isinstance(instances, Corpus):
        instances = instances.instances
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for inst in instances:
            handle.write(instance_to_block(inst))
            handle.write("\n")
