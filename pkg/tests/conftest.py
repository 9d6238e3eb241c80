import os
import random

import pytest

from relaug.corpus import REInstance, Span, Token, read_corpus

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")
TOY12 = os.path.join(DATA_DIR, "toy12.conllu")

# one line per acceptance criterion, printed after the run regardless of
# output capturing (see tests/test_acceptance.py)
ACCEPTANCE_RESULTS = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_RESULTS:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def toy12_path():
    return TOY12


@pytest.fixture()
def toy12(toy12_path):
    return read_corpus(toy12_path)


def make_instance(instance_id, rows, subj, obj, relation="Rel"):
    """Compact builder: rows are (form, head, deprel[, upos]) in index order."""
    tokens = []
    for i, row in enumerate(rows, start=1):
        form, head, deprel = row[0], row[1], row[2]
        upos = row[3] if len(row) > 3 else None
        tokens.append(Token(i, form, head, deprel, upos))
    inst = REInstance(
        id=instance_id,
        tokens=tokens,
        subject=Span(subj[0], subj[1], "subject"),
        object=Span(obj[0], obj[1], "object"),
        relation=relation,
    )
    return inst.validate()


SURGEON_ROWS = [
    ("A", 2, "det", "DET"),
    ("surgeon", 4, "nsubj", "NOUN"),
    ("carefully", 4, "advmod", "ADV"),
    ("applies", 0, "root", "VERB"),
    ("the", 6, "det", "DET"),
    ("splints", 4, "dobj", "NOUN"),
    ("to", 9, "case", "ADP"),
    ("the", 9, "det", "DET"),
    ("forearm", 4, "obl", "NOUN"),
    (".", 4, "punct", "PUNCT"),
]


@pytest.fixture()
def surgeon():
    return make_instance("surg", SURGEON_ROWS, (2, 2), (6, 6), "Instrument-Agency")


_FORMS = ["alpha", "beta", "gamma", "delta", "omega", "sigma", "kappa", "zeta"]
_DEPRELS = ["nsubj", "obj", "obl", "advmod", "nmod", "det", "case", "amod"]
_UPOS = ["NOUN", "VERB", "ADJ", "ADV", "ADP", "DET"]


def random_tree_instance(rng, instance_id="rand", relation="Rel", min_tokens=4, max_tokens=12):
    """A random valid parsed instance with two disjoint contiguous spans.

    Every non-root token attaches to a uniformly chosen other position, with
    attachment order randomized, so trees are not left-leaning by design.
    """
    n = rng.randint(min_tokens, max_tokens)
    order = list(range(1, n + 1))
    rng.shuffle(order)
    root = order[0]
    heads = {root: 0}
    attached = [root]
    for idx in order[1:]:
        heads[idx] = rng.choice(attached)
        attached.append(idx)
    tokens = [
        Token(
            i,
            f"{rng.choice(_FORMS)}{i}",
            heads[i],
            "root" if heads[i] == 0 else rng.choice(_DEPRELS),
            rng.choice(_UPOS),
        )
        for i in range(1, n + 1)
    ]
    # two disjoint contiguous spans of 1-2 tokens each
    while True:
        s_len = rng.randint(1, 2)
        o_len = rng.randint(1, 2)
        if s_len + o_len > n:
            continue
        s_start = rng.randint(1, n - s_len + 1)
        o_start = rng.randint(1, n - o_len + 1)
        s = Span(s_start, s_start + s_len - 1, "subject")
        o = Span(o_start, o_start + o_len - 1, "object")
        if not s.overlaps(o):
            break
    return REInstance(
        id=instance_id, tokens=tokens, subject=s, object=o, relation=relation
    ).validate()


@pytest.fixture()
def rng():
    return random.Random(1234)
