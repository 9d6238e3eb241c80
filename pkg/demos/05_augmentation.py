"""End-to-end corpus augmentation with the built-in template backend.

Requests are sampled deterministically: each sentence is asked for
``multiple`` rewrites, each carrying an entity hint drawn from its
relation's surface pool.  The template backend rewrites a matched
same-relation sentence by substituting the hint into an entity slot.
Every generated string is validated (marker structure, optional hint
containment) before joining the output corpus; failures land in a
rejection report instead of crashing the run.

Run:  python3 demos/05_augmentation.py
"""

import tempfile
from pathlib import Path

from relaug import generate, ingest, parse_backend_spec, sample_requests, write_augmented

CORPUS = """\
# id = g1
# relation = Cause-Effect
# subj = 2-2
# obj = 5-5
1\tThe\tDET\t2\tdet
2\tstorm\tNOUN\t3\tnsubj
3\tcauses\tVERB\t0\troot
4\ta\tDET\t5\tdet
5\tdelay\tNOUN\t3\tobj
6\t.\tPUNCT\t3\tpunct

# id = g2
# relation = Cause-Effect
# subj = 2-2
# obj = 5-5
1\tThe\tDET\t2\tdet
2\tquake\tNOUN\t3\tnsubj
3\ttriggered\tVERB\t0\troot
4\ta\tDET\t5\tdet
5\tpanic\tNOUN\t3\tobj
6\t.\tPUNCT\t3\tpunct
"""


def main() -> None:
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "demo.conllu"
        path.write_text(CORPUS, encoding="utf-8")
        corpus = ingest(path)

        requests = sample_requests(corpus, multiple=3, seed=7)
        print(f"{len(requests)} generation requests for {len(corpus.instances)} sentences:")
        for request in requests[:3]:
            print(f"    {request.request_id}: hint={request.hint!r}")
        print("    ...")

        spec = parse_backend_spec("template")
        instances, report = generate(requests, spec, corpus=corpus, seed=7)

        print(f"\naccepted {report.accepted} of {report.requested}, "
              f"rejected {len(report.rejections)}")
        for instance in instances[:4]:
            origin = instance.provenance
            print(f"    {instance.id}  (from {origin.source_id}, hint {origin.hint!r})")
            print(f"        {' '.join(instance.forms)}")

        out = Path(tmp) / "augmented.conllu"
        write_augmented(instances, out)
        reread = ingest(out, allow_unparsed=True)
        print(f"\nwrote and re-read {len(reread.instances)} augmented instances")


if __name__ == "__main__":
    main()
