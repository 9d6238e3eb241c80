"""Rule-driven sentence restructuring by whole-subtree moves.

Each rule names a head part-of-speech (or * for any), a child dependency
label, and an action: move the child's whole subtree before its head,
after its head, or swap it with the next sibling subtree.  Moves keep
the word multiset intact, never split an entity span, and re-derive
token indices and spans afterwards, so the result is again a valid
parsed sentence.

Run:  python3 demos/03_restructuring.py
"""

import tempfile
from pathlib import Path

from relaug import DEFAULT_RULESET, ReorderRule, RuleSet, ingest, restructure

CORPUS = """\
# id = d1
# relation = Instrument-Agency
# subj = 2-2
# obj = 6-6
1\tA\tDET\t2\tdet
2\tsurgeon\tNOUN\t4\tnsubj
3\tcarefully\tADV\t4\tadvmod
4\tapplies\tVERB\t0\troot
5\tthe\tDET\t6\tdet
6\tsplints\tNOUN\t4\tdobj
7\tto\tADP\t9\tcase
8\tthe\tDET\t9\tdet
9\tforearm\tNOUN\t4\tobl
10\t.\tPUNCT\t4\tpunct
"""


def show(label: str, instance) -> None:
    print(f"{label:12} {' '.join(instance.forms)}")
    print(f"{'':12} subject={instance.span_surface(instance.subject)!r} "
          f"object={instance.span_surface(instance.object)!r}")


def main() -> None:
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "demo.conllu"
        path.write_text(CORPUS, encoding="utf-8")
        corpus = ingest(path)
    original = corpus.instances[0]

    show("original:", original)

    print("\ndefault rules:")
    for rule in DEFAULT_RULESET.rules:
        print(f"    head={rule.head_upos} child={rule.child_deprel} -> {rule.action}")
    show("\nrewritten:", restructure(original))

    # a single rule: move only the oblique phrase in front of the verb
    obl_only = RuleSet([ReorderRule("*", "obl", "MoveBeforeHead")])
    show("\nobl only:", restructure(original, obl_only))

    # words are conserved: same multiset before and after
    rewritten = restructure(original)
    assert sorted(rewritten.forms) == sorted(original.forms)
    print("\nword multiset preserved, entity spans contiguous and intact")


if __name__ == "__main__":
    main()
