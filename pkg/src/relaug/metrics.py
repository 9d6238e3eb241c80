"""Diversity metrics over extracted patterns, plus a perplexity pass-through.

Type-Token Ratio is computed per relation over the word elements of the
dependency-path patterns: distinct words divided by total word occurrences.
All ratios are exact rationals; decimals appear only when a report is
rendered. Perplexity is not computed here, it is delegated to an external
scorer command that reads one sentence per line and answers one number per
line.
"""

import json
import math
import shlex
import subprocess
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import LineCountMismatch, ScorerFailure
from .pattern import extract_pattern


def _patterns_by_relation(instances):
    groups = {}
    for inst in instances:
        groups.setdefault(inst.relation, []).append(extract_pattern(inst))
    return groups


@dataclass(frozen=True)
class TTRSummary:
    """Per-relation type-token ratios with their exact macro average."""

    per_relation: dict
    macro: Fraction
    degenerate: tuple  # relations with zero pattern words, reported as 1

    def __post_init__(self):
        for relation, value in self.per_relation.items():
            if not 0 <= value <= 1:
                raise ValueError(f"TTR out of range for {relation}: {value}")


def ttr(instances):
    """Type-Token Ratio per relation over pattern words.

    A relation whose patterns carry no words at all (entity heads adjacent
    in every instance) cannot repeat a word, so it reports 1 and is listed
    as degenerate.
    """
    per_relation = {}
    degenerate = []
    for relation, patterns in sorted(_patterns_by_relation(instances).items()):
        words = [form for pattern in patterns for form in pattern.node_forms]
        if words:
            per_relation[relation] = Fraction(len(set(words)), len(words))
        else:
            per_relation[relation] = Fraction(1)
            degenerate.append(relation)
    if per_relation:
        macro = Fraction(sum(per_relation.values()), len(per_relation))
    else:
        macro = Fraction(0)
    return TTRSummary(per_relation, macro, tuple(degenerate))


@dataclass(frozen=True)
class DiversitySummary:
    """Pattern frequency histograms and their normalized entropies."""

    histogram: dict  # relation -> {pattern text: count}
    entropy: dict  # relation -> float in [0, 1]


def pattern_diversity(instances):
    """Histogram of pattern text forms per relation plus normalized entropy.

    Entropy is Shannon entropy over the histogram divided by log(k) for k
    distinct patterns, so 0 means every instance shares one pattern and 1
    means the distinct patterns are uniformly used.
    """
    histogram = {}
    entropy = {}
    for relation, patterns in sorted(_patterns_by_relation(instances).items()):
        counts = Counter(pattern.text for pattern in patterns)
        histogram[relation] = dict(sorted(counts.items()))
        total = sum(counts.values())
        if len(counts) <= 1:
            entropy[relation] = 0.0
        else:
            h = -sum((c / total) * math.log(c / total) for c in counts.values())
            entropy[relation] = h / math.log(len(counts))
    return DiversitySummary(histogram, entropy)


def perplexity(texts, scorer):
    """Mean score from an external line-oriented scorer command.

    One UTF-8 text per input line; the scorer must answer exactly one
    decimal per line. `scorer` is a shell command string or an argv list.
    """
    texts = list(texts)
    if not texts:
        raise ScorerFailure("no texts to score")
    argv = shlex.split(scorer) if isinstance(scorer, str) else list(scorer)
    try:
        proc = subprocess.run(
            argv,
            input="".join(t + "\n" for t in texts),
            capture_output=True,
            text=True,
            encoding="utf-8",
        )
    except OSError as exc:
        raise ScorerFailure(f"cannot run scorer {argv!r}: {exc}") from exc
    if proc.returncode != 0:
        raise ScorerFailure(
            f"scorer exited with {proc.returncode}: {proc.stderr.strip()}"
        )
    lines = proc.stdout.splitlines()
    if len(lines) != len(texts):
        raise LineCountMismatch(
            f"scored {len(lines)} lines for {len(texts)} texts"
        )
    try:
        values = [float(line) for line in lines]
    except ValueError as exc:
        raise ScorerFailure(f"non-numeric scorer output: {exc}") from exc
    return sum(values) / len(values)


def percent(value):
    """One-decimal percentage rendering of a ratio, e.g. 86.4."""
    return f"{float(value) * 100:.1f}"


@dataclass
class MetricsReport:
    per_relation_ttr: dict
    macro_ttr: Fraction
    degenerate_relations: tuple
    pattern_histogram: dict
    pattern_entropy: dict
    pair_stats: object = None
    perplexity: float | None = None

    def __post_init__(self):
        for relation, value in self.per_relation_ttr.items():
            if not 0 <= value <= 1:
                raise ValueError(f"TTR out of range for {relation}: {value}")

    def to_json(self):
        def ttr_entry(value):
            return {"exact": str(value), "percent": percent(value)}

        doc = {
            "ttr": {
                relation: ttr_entry(value)
                for relation, value in sorted(self.per_relation_ttr.items())
            },
            "macro_ttr": ttr_entry(self.macro_ttr),
            "degenerate_relations": list(self.degenerate_relations),
            "pattern_histogram": {
                relation: dict(sorted(counts.items()))
                for relation, counts in sorted(self.pattern_histogram.items())
            },
            "pattern_entropy": {
                relation: round(value, 6)
                for relation, value in sorted(self.pattern_entropy.items())
            },
        }
        if self.pair_stats is not None:
            doc["pair_stats"] = {
                "restructure": self.pair_stats.restructure_count,
                "approximate": self.pair_stats.approximate_count,
                "per_relation": {
                    relation: dict(sorted(counts.items()))
                    for relation, counts in sorted(self.pair_stats.per_relation.items())
                },
            }
        if self.perplexity is not None:
            doc["perplexity"] = round(self.perplexity, 6)
        return json.dumps(doc, indent=2, ensure_ascii=False, sort_keys=True)

    def to_table(self):
        """Aligned plain-text view, one row per relation plus the macro row."""
        rows = [("relation", "ttr", "ttr%", "entropy", "patterns")]
        for relation in sorted(self.per_relation_ttr):
            flag = " (degenerate)" if relation in self.degenerate_relations else ""
            rows.append(
                (
                    relation + flag,
                    str(self.per_relation_ttr[relation]),
                    percent(self.per_relation_ttr[relation]),
                    f"{self.pattern_entropy.get(relation, 0.0):.4f}",
                    str(len(self.pattern_histogram.get(relation, {}))),
                )
            )
        rows.append(("macro", str(self.macro_ttr), percent(self.macro_ttr), "", ""))
        widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
        lines = []
        for row in rows:
            cells = [cell.ljust(width) for cell, width in zip(row, widths)]
            lines.append("  ".join(cells).rstrip())
        if self.perplexity is not None:
            lines.append("")
            lines.append(f"perplexity (lower is better): {self.perplexity:.4f}")
        return "\n".join(lines) + "\n"


def build_report(instances, pair_stats=None, scorer=None, texts=None):
    """Assemble the full report; perplexity only when a scorer is given."""
    ttr_summary = ttr(instances)
    diversity = pattern_diversity(instances)
    mean_ppl = None
    if scorer is not None:
        if texts is None:
            texts = [" ".join(inst.forms) for inst in instances]
        mean_ppl = perplexity(texts, scorer)
    return MetricsReport(
        per_relation_ttr=ttr_summary.per_relation,
        macro_ttr=ttr_summary.macro,
        degenerate_relations=ttr_summary.degenerate,
        pattern_histogram=diversity.histogram,
        pattern_entropy=diversity.entropy,
        pair_stats=pair_stats,
        perplexity=mean_ppl,
    )
