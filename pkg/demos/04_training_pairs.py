"""Building the two seq2seq training-pair files and their schedule manifest.

Two tasks share one corpus.  The restructuring task pairs every sentence
with its rule-rewritten form; the approximation task pairs every sentence
with each same-relation sentence whose dependency-path pattern is within
the edit-distance threshold, carrying an entity surface of the target as
a generation hint.  ``emit`` writes one JSON Lines file per task plus a
manifest describing the alternating training schedule.

Run:  python3 demos/04_training_pairs.py
"""

import json
import tempfile
from pathlib import Path

from relaug import (
    MatchConfig,
    PairSet,
    ScheduleManifest,
    build_approx_pairs,
    build_index,
    build_restructure_pairs,
    emit,
    ingest,
)

CORPUS = """\
# id = p1
# relation = Cause-Effect
# subj = 2-2
# obj = 5-5
1\tThe\tDET\t2\tdet
2\tstorm\tNOUN\t3\tnsubj
3\tcauses\tVERB\t0\troot
4\ta\tDET\t5\tdet
5\tdelay\tNOUN\t3\tobj
6\t.\tPUNCT\t3\tpunct

# id = p2
# relation = Cause-Effect
# subj = 2-2
# obj = 5-5
1\tThe\tDET\t2\tdet
2\tquake\tNOUN\t3\tnsubj
3\ttriggered\tVERB\t0\troot
4\ta\tDET\t5\tdet
5\tpanic\tNOUN\t3\tobj
6\t.\tPUNCT\t3\tpunct

# id = p3
# relation = Cause-Effect
# subj = 2-2
# obj = 7-7
1\tThe\tDET\t2\tdet
2\tvirus\tNOUN\t3\tnsubj
3\tcauses\tVERB\t0\troot
4\ta\tDET\t5\tdet
5\tloss\tNOUN\t3\tobj
6\tof\tADP\t7\tcase
7\tsmell\tNOUN\t5\tnmod
8\t.\tPUNCT\t3\tpunct
"""


def main() -> None:
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "demo.conllu"
        path.write_text(CORPUS, encoding="utf-8")
        corpus = ingest(path)

        restructure_pairs = build_restructure_pairs(corpus)
        index = build_index(corpus)
        approx_pairs = build_approx_pairs(corpus, index, MatchConfig(threshold=3), seed=0)
        pairset = PairSet.merged(restructure_pairs, approx_pairs)

        print(f"restructure pairs: {len(restructure_pairs)}")
        print(f"approximate pairs: {len(approx_pairs)}")
        print("\none record per line, fixed field order:")
        print(approx_pairs.records[0].to_json())

        out_dir = Path(tmp) / "pairs"
        emit(pairset, ScheduleManifest(seed=0), out_dir)
        print(f"\nfiles written to {out_dir.name}/:")
        for name in sorted(p.name for p in out_dir.iterdir()):
            print(f"    {name}")

        manifest = json.loads((out_dir / "manifest.json").read_text("utf-8"))
        print("\nschedule:", manifest["iterations"], "iterations x",
              manifest["epochs_per_task"], "epochs per task, order",
              manifest["task_order"])


if __name__ == "__main__":
    main()
