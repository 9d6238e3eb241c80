"""Relational patterns: the dependency path between the two entity heads.

A pattern is the alternating sequence of edge labels and intermediate word
forms along the unique tree path between the head token of the subject span
and the head token of the object span. The endpoints themselves contribute
no lexical material; edge direction is discarded. Patterns are compared
with a plain Levenshtein distance in which each element (edge label or word
form) is one atomic symbol.
"""

from dataclasses import dataclass, field

from .errors import InvariantError, NoParse, UnknownId

EDGE = "edge"
NODE = "node"


def edge(label):
    return (EDGE, label.upper())


def node(form):
    return (NODE, form.lower())


@dataclass(frozen=True)
class Pattern:
    """An alternating Edge/Node element sequence; empty iff the heads coincide."""

    elements: tuple

    def __post_init__(self):
        for i, (kind, text) in enumerate(self.elements):
            expected = EDGE if i % 2 == 0 else NODE
            if kind != expected:
                raise InvariantError(f"pattern element {i} must be a {expected}: {self.elements}")
            if not text:
                raise InvariantError("pattern elements must carry non-empty text")
        if self.elements and len(self.elements) % 2 == 0:
            raise InvariantError(f"pattern must end with an edge: {self.elements}")

    def __len__(self):
        return len(self.elements)

    @property
    def text(self):
        """Display form, elements joined by '-' (e.g. NSUBJ-applies-DOBJ)."""
        return "-".join(text for _, text in self.elements)

    @property
    def node_forms(self):
        return [text for kind, text in self.elements if kind == NODE]


def entity_head(instance, span):
    """Index of the span token governed from outside the span.

    The leftmost such token wins when there are several; if the span has no
    outward edge at all (impossible in a valid tree) the leftmost token is
    returned as a fallback.
    """
    if not instance.parsed:
        raise NoParse(f"instance {instance.id} has no dependency parse")
    inside = set(span.indices())
    for idx in span.indices():
        head = instance.tokens[idx - 1].head
        if head not in inside:  # root (0) is always outside
            return idx
    return span.start


def _chain_to_root(instance, start):
    chain = [start]
    cur = start
    while True:
        head = instance.tokens[cur - 1].head
        if head == 0:
            return chain
        chain.append(head)
        cur = head


def extract_pattern(instance):
    """The pattern between the subject and object heads, subject first."""
    s_head = entity_head(instance, instance.subject)
    o_head = entity_head(instance, instance.object)
    if s_head == o_head:
        return Pattern(())

    s_chain = _chain_to_root(instance, s_head)
    s_rank = {idx: i for i, idx in enumerate(s_chain)}
    o_chain = []
    cur = o_head
    while cur not in s_rank:
        o_chain.append(cur)
        cur = instance.tokens[cur - 1].head
    lca = cur
    # token index path s_head .. lca .. o_head
    path = s_chain[: s_rank[lca] + 1] + list(reversed(o_chain))

    elements = []
    for a, b in zip(path, path[1:]):
        # the traversed edge carries the deprel of whichever node is the child
        if instance.tokens[a - 1].head == b:
            elements.append(edge(instance.tokens[a - 1].deprel))
        else:
            elements.append(edge(instance.tokens[b - 1].deprel))
        if b != path[-1]:
            elements.append(node(instance.tokens[b - 1].form))
    return Pattern(tuple(elements))


def lev_distance(a, b):
    """Edit distance over whole pattern elements (unit-cost ins/del/sub)."""
    xs = a.elements if isinstance(a, Pattern) else tuple(a)
    ys = b.elements if isinstance(b, Pattern) else tuple(b)
    if len(xs) < len(ys):
        xs, ys = ys, xs
    previous = list(range(len(ys) + 1))
    for i, x in enumerate(xs, start=1):
        current = [i] + [0] * len(ys)
        for j, y in enumerate(ys, start=1):
            cost = 0 if x == y else 1
            current[j] = min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + cost)
        previous = current
    return previous[len(ys)]


@dataclass(frozen=True)
class MatchConfig:
    """Matching knobs: `threshold` is the strict upper bound on distance (λ)."""

    threshold: int = 3
    exclude_self: bool = True

    def __post_init__(self):
        if self.threshold < 0:
            raise InvariantError("threshold must be >= 0")


@dataclass
class PatternIndex:
    """Per-relation pattern lists with length buckets for pruning."""

    groups: dict = field(default_factory=dict)  # relation -> [(id, Pattern)]
    buckets: dict = field(default_factory=dict)  # relation -> {length: [(id, Pattern)]}
    by_id: dict = field(default_factory=dict)  # id -> (relation, Pattern)

    def add(self, relation, instance_id, pattern):
        self.groups.setdefault(relation, []).append((instance_id, pattern))
        self.buckets.setdefault(relation, {}).setdefault(len(pattern), []).append(
            (instance_id, pattern)
        )
        self.by_id[instance_id] = (relation, pattern)


def build_index(corpus):
    """Extract every instance's pattern, grouped by relation, ordered by id."""
    index = PatternIndex()
    for relation in corpus.relations:
        for instance_id in sorted(corpus.by_relation.get(relation, [])):
            index.add(relation, instance_id, extract_pattern(corpus.by_id[instance_id]))
    return index


def match_targets(source_id, index, cfg=MatchConfig()):
    """All same-relation instances whose pattern lies strictly within threshold.

    Returns (target id, distance) pairs sorted by (distance, id). Length
    buckets whose size differs from the source pattern by >= threshold are
    skipped outright; the length gap is a lower bound on the distance, so
    pruning never changes the result.
    """
    if source_id not in index.by_id:
        raise UnknownId(f"instance {source_id!r} is not indexed")
    relation, source = index.by_id[source_id]
    hits = []
    for length, entries in index.buckets[relation].items():
        if abs(length - len(source)) >= cfg.threshold:
            continue
        for target_id, pattern in entries:
            if cfg.exclude_self and target_id == source_id:
                continue
            distance = lev_distance(source, pattern)
            if distance < cfg.threshold:
                hits.append((target_id, distance))
    hits.sort(key=lambda item: (item[1], item[0]))
    return hits
