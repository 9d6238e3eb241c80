"""Deterministic sentence restructuring by moving whole dependency subtrees.

The output sentence is a permutation of the input: a rule picks (head, child)
edges by the head's POS tag and the child's dependency label, then relocates
the child's complete subtree as one contiguous block. Applications that
would break an entity span apart, or whose subtree is not currently
contiguous, are skipped. The dependency tree itself is preserved and only
re-indexed.
"""

from dataclasses import dataclass, field

from .corpus import REInstance, Span, Token
from .errors import FormatError, InvariantError

MOVE_BEFORE_HEAD = "MoveBeforeHead"
MOVE_AFTER_HEAD = "MoveAfterHead"
SWAP_WITH_NEXT_SIBLING = "SwapWithNextSibling"
ACTIONS = (MOVE_BEFORE_HEAD, MOVE_AFTER_HEAD, SWAP_WITH_NEXT_SIBLING)

WILDCARD = "*"


@dataclass(frozen=True)
class ReorderRule:
    head_upos: str
    child_deprel: str
    action: str

    def __post_init__(self):
        if not self.child_deprel:
            raise InvariantError("rule needs a child deprel")
        if self.action not in ACTIONS:
            raise InvariantError(f"unknown action {self.action!r}, expected one of {ACTIONS}")

    def matches(self, head_token, child_token):
        if self.head_upos != WILDCARD:
            if head_token.upos is None or head_token.upos.lower() != self.head_upos.lower():
                return False
        return (child_token.deprel or "").lower() == self.child_deprel.lower()


@dataclass
class RuleSet:
    rules: list = field(default_factory=list)
    max_applications: int = 8

    def __post_init__(self):
        if self.max_applications < 0:
            raise InvariantError("max_applications must be >= 0")


DEFAULT_RULESET = RuleSet(
    [
        ReorderRule(WILDCARD, "obl", MOVE_BEFORE_HEAD),
        ReorderRule(WILDCARD, "advmod", MOVE_AFTER_HEAD),
        ReorderRule(WILDCARD, "nmod", MOVE_BEFORE_HEAD),
    ]
)


def load_rules(path, max_applications=8):
    """Read one rule per line: HEAD_UPOS<TAB>DEPREL<TAB>ACTION ('#' comments ok)."""
    rules = []
    with open(path, encoding="utf-8") as handle:
        for line_no, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) != 3:
                raise FormatError("expected HEAD_UPOS<TAB>DEPREL<TAB>ACTION", line_no)
            try:
                rules.append(ReorderRule(cols[0], cols[1], cols[2]))
            except InvariantError as exc:
                raise FormatError(str(exc), line_no) from None
    return RuleSet(rules, max_applications=max_applications)


def _subtree_sets(instance):
    children = {t.index: [] for t in instance.tokens}
    root = None
    for t in instance.tokens:
        if t.head == 0:
            root = t.index
        else:
            children[t.head].append(t.index)
    subtree = {}

    def collect(idx):
        acc = {idx}
        for child in children[idx]:
            acc |= collect(child)
        subtree[idx] = acc
        return acc

    collect(root)
    depth = {root: 0}
    stack = [root]
    while stack:
        cur = stack.pop()
        for child in children[cur]:
            depth[child] = depth[cur] + 1
            stack.append(child)
    return children, subtree, depth


def _block_of(seq, members):
    """Positions of `members` in seq if they form one contiguous run, else None."""
    positions = sorted(i for i, idx in enumerate(seq) if idx in members)
    if not positions:
        return None
    if positions[-1] - positions[0] + 1 != len(positions):
        return None
    return positions[0], positions[-1]


def _entity_safe_block(block_members, entities):
    # a moved block may contain an entity whole or miss it entirely
    for entity in entities:
        overlap = block_members & entity
        if overlap and overlap != entity:
            return False
    return True


def _splits_entity(seq, insert_at, entities):
    if insert_at == 0 or insert_at == len(seq):
        return False
    left, right = seq[insert_at - 1], seq[insert_at]
    return any(left in entity and right in entity for entity in entities)


def _apply_move(seq, members, head_idx, action, entities):
    """Try one relocation; return the new order or None when skipped."""
    block = _block_of(seq, members)
    if block is None or not _entity_safe_block(members, entities):
        return None
    lo, hi = block
    rest = seq[:lo] + seq[hi + 1 :]
    head_pos = rest.index(head_idx)
    insert_at = head_pos if action == MOVE_BEFORE_HEAD else head_pos + 1
    if _splits_entity(rest, insert_at, entities):
        return None
    moved = rest[:insert_at] + seq[lo : hi + 1] + rest[insert_at:]
    return None if moved == seq else moved


def _apply_swap(seq, members, sibling_blocks, entities):
    block = _block_of(seq, members)
    if block is None or not _entity_safe_block(members, entities):
        return None
    following = [b for b in sibling_blocks if b is not None and b[0] > block[1]]
    if not following:
        return None
    nxt = min(following)
    a_lo, a_hi = block
    b_lo, b_hi = nxt
    b_members = set(seq[b_lo : b_hi + 1])
    if not _entity_safe_block(b_members, entities):
        return None
    return (
        seq[:a_lo]
        + seq[b_lo : b_hi + 1]
        + seq[a_hi + 1 : b_lo]
        + seq[a_lo : a_hi + 1]
        + seq[b_hi + 1 :]
    )


def restructure(instance, rules=DEFAULT_RULESET):
    """Permute the sentence by the rule set; identical multiset of forms out.

    Rules fire in list order; within a rule, matching edges fire top-down by
    the head's depth, then by textual position (both taken at the start of
    the rule), capped by the rule set's application budget.
    """
    children, subtree, depth = _subtree_sets(instance)
    seq = [t.index for t in instance.tokens]
    entities = [set(instance.subject.indices()), set(instance.object.indices())]

    budget = rules.max_applications
    applied = 0
    for rule in rules.rules:
        if applied >= budget:
            break
        pos = {idx: i for i, idx in enumerate(seq)}
        candidates = []
        for head in seq:
            for child in children[head]:
                if rule.matches(instance.tokens[head - 1], instance.tokens[child - 1]):
                    candidates.append((depth[head], pos[head], pos[child], head, child))
        candidates.sort()
        for _, _, _, head, child in candidates:
            if applied >= budget:
                break
            if rule.action == SWAP_WITH_NEXT_SIBLING:
                sibling_blocks = [
                    _block_of(seq, subtree[other])
                    for other in children[head]
                    if other != child
                ]
                new_seq = _apply_swap(seq, subtree[child], sibling_blocks, entities)
            else:
                new_seq = _apply_move(seq, subtree[child], head, rule.action, entities)
            if new_seq is not None:
                seq = new_seq
                applied += 1

    return _reindex(instance, seq)


def _reindex(instance, seq):
    remap = {old: new for new, old in enumerate(seq, start=1)}
    tokens = []
    for new_pos, old_idx in enumerate(seq, start=1):
        tok = instance.tokens[old_idx - 1]
        head = 0 if tok.head == 0 else remap[tok.head]
        tokens.append(Token(new_pos, tok.form, head, tok.deprel, tok.upos))

    def respan(span):
        new_positions = sorted(remap[i] for i in span.indices())
        if new_positions[-1] - new_positions[0] + 1 != len(new_positions):
            raise InvariantError(f"instance {instance.id}: entity span torn apart by reordering")
        return Span(new_positions[0], new_positions[-1], span.role)

    out = REInstance(
        id=instance.id,
        tokens=tokens,
        subject=respan(instance.subject),
        object=respan(instance.object),
        relation=instance.relation,
        provenance=instance.provenance,
    )
    return out.validate()
