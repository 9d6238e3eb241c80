"""Diversity metrics over dependency-path patterns.

The type-token ratio (TTR) of a relation divides the number of distinct
words by the total number of words occurring in its patterns' node
positions, kept as an exact fraction.  The pattern histogram and its
normalized entropy summarize how varied the syntax is; an external
line-oriented scorer can add a perplexity column.

Run:  python3 demos/06_metrics.py
"""

import tempfile
from pathlib import Path

from relaug import build_report, ingest, pattern_diversity, ttr

CORPUS = """\
# id = m1
# relation = Cause-Effect
# subj = 2-2
# obj = 5-5
1\tThe\tDET\t2\tdet
2\tstorm\tNOUN\t3\tnsubj
3\tcauses\tVERB\t0\troot
4\ta\tDET\t5\tdet
5\tdelay\tNOUN\t3\tobj
6\t.\tPUNCT\t3\tpunct

# id = m2
# relation = Cause-Effect
# subj = 2-2
# obj = 5-5
1\tThe\tDET\t2\tdet
2\tquake\tNOUN\t3\tnsubj
3\ttriggered\tVERB\t0\troot
4\ta\tDET\t5\tdet
5\tpanic\tNOUN\t3\tobj
6\t.\tPUNCT\t3\tpunct

# id = m3
# relation = Cause-Effect
# subj = 2-2
# obj = 5-5
1\tThe\tDET\t2\tdet
2\tfrost\tNOUN\t3\tnsubj
3\tcauses\tVERB\t0\troot
4\ta\tDET\t5\tdet
5\tfamine\tNOUN\t3\tobj
6\t.\tPUNCT\t3\tpunct
"""


def main() -> None:
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "demo.conllu"
        path.write_text(CORPUS, encoding="utf-8")
        corpus = ingest(path)

    summary = ttr(corpus.instances)
    for relation, value in summary.per_relation.items():
        # three patterns contribute the words: causes, triggered, causes
        print(f"TTR[{relation}] = {value} (exact rational)")
    print(f"macro TTR = {summary.macro}")

    diversity = pattern_diversity(corpus.instances)
    print("\npattern histogram:")
    for relation, counts in diversity.histogram.items():
        for text, count in counts.items():
            print(f"    {relation}: {text} x{count}")
    print(f"normalized entropy: { {r: round(e, 4) for r, e in diversity.entropy.items()} }")

    report = build_report(corpus.instances)
    print("\nfull report as a table:\n")
    print(report.to_table())


if __name__ == "__main__":
    main()
