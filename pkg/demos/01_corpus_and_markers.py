"""Reading an annotated corpus and round-tripping entity markers.

A corpus file holds one block per sentence: comment lines naming the
instance id, its relation label, and the subject/object token spans,
followed by one TAB-separated row per token (index, form, part of
speech, head index, dependency label).  The reader validates every
block; the marker helpers linearize an instance to a single string with
the two entity spans wrapped in reserved bracket tokens, and parse such
strings back.

Run:  python3 demos/01_corpus_and_markers.py
"""

import tempfile
from pathlib import Path

from relaug import ingest, inject_markers, parse_marked

CORPUS = """\
# id = a1
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

# id = a2
# relation = Cause-Effect
# subj = 2-2
# obj = 5-5
1\tThe\tDET\t2\tdet
2\tstorm\tNOUN\t3\tnsubj
3\tcauses\tVERB\t0\troot
4\ta\tDET\t5\tdet
5\tdelay\tNOUN\t3\tobj
6\t.\tPUNCT\t3\tpunct
"""


def main() -> None:
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "demo.conllu"
        path.write_text(CORPUS, encoding="utf-8")
        corpus = ingest(path)

    print(f"read {len(corpus.instances)} instances, "
          f"relations: {sorted(corpus.relations)}")

    for instance in corpus.instances:
        print(f"\n--- {instance.id} ({instance.relation}) ---")
        print("tokens:     ", " ".join(instance.forms))
        print("subject:    ", instance.span_surface(instance.subject))
        print("object:     ", instance.span_surface(instance.object))

        marked = inject_markers(instance)
        print("marked:     ", marked)

        # parsing the marked string recovers the forms and both spans
        forms, subject, obj = parse_marked(marked)
        assert forms == list(instance.forms)
        assert (subject, obj) == (instance.subject, instance.object)
        print("round trip:  forms and spans recovered exactly")


if __name__ == "__main__":
    main()
