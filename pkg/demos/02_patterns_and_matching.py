"""Dependency-path patterns, their edit distance, and target matching.

A pattern is the shortest path through the dependency tree between the
two entity heads, rendered as alternating dependency labels (upper-case)
and intermediate word forms (lower-case).  Two sentences whose patterns
lie within a small element-level edit distance of each other make good
rewrite partners: same relation, nearly the same syntax.

Run:  python3 demos/02_patterns_and_matching.py
"""

import tempfile
from pathlib import Path

from relaug import MatchConfig, build_index, extract_pattern, ingest, lev_distance, match_targets

CORPUS = """\
# id = s1
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

# id = s2
# relation = Instrument-Agency
# subj = 2-2
# obj = 6-6
1\tThe\tDET\t2\tdet
2\tpanel\tNOUN\t4\tnsubj
3\thas\tAUX\t4\taux
4\tchosen\tVERB\t0\troot
5\tthe\tDET\t6\tdet
6\ttheme\tNOUN\t4\tdobj
7\t.\tPUNCT\t4\tpunct

# id = s3
# relation = Instrument-Agency
# subj = 2-2
# obj = 7-7
1\tThe\tDET\t2\tdet
2\ttrain\tNOUN\t3\tnsubj
3\thas\tVERB\t0\troot
4\tsix\tNUM\t5\tnummod
5\tsets\tNOUN\t3\tobj
6\tof\tADP\t7\tcase
7\tdoors\tNOUN\t5\tnmod
8\t.\tPUNCT\t3\tpunct
"""


def main() -> None:
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "demo.conllu"
        path.write_text(CORPUS, encoding="utf-8")
        corpus = ingest(path)

    patterns = {}
    for instance in corpus.instances:
        pattern = extract_pattern(instance)
        patterns[instance.id] = pattern
        print(f"{instance.id}: {' '.join(instance.forms)}")
        print(f"    pattern: {pattern.text}")

    print("\npairwise element-level edit distances:")
    ids = sorted(patterns)
    for i, left in enumerate(ids):
        for right in ids[i + 1 :]:
            distance = lev_distance(patterns[left], patterns[right])
            print(f"    {patterns[left].text}  vs  {patterns[right].text}  ->  {distance}")

    # the index groups patterns by relation; matching returns every other
    # same-relation instance whose pattern is strictly closer than the
    # threshold, nearest first
    index = build_index(corpus)
    for threshold in (1, 2, 3):
        hits = match_targets("s1", index, MatchConfig(threshold=threshold))
        shown = ", ".join(f"{target}(d={distance})" for target, distance in hits) or "none"
        print(f"targets for s1 at threshold {threshold}: {shown}")


if __name__ == "__main__":
    main()
