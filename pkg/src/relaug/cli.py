"""Command-line pipeline: ingest, pairs, augment, metrics.

One binary with four subcommands sharing flag conventions. Exit codes:
0 success, 1 validation or data error, 2 usage error. Diagnostics go to
standard error; data goes to files under --out or to standard output.
"""

import argparse
import json
import os
import sys
from dataclasses import dataclass

from . import __version__
from .augment import generate, parse_backend_spec, sample_requests
from .corpus import ingest as ingest_corpus
from .corpus import write_corpus
from .errors import RelaugError
from .metrics import build_report
from .pairgen import (
    PairSet,
    ScheduleManifest,
    build_approx_pairs,
    build_restructure_pairs,
    emit,
    read_manifest,
    read_pairs,
)
from .pattern import MatchConfig, build_index
from .restructure import DEFAULT_RULESET, load_rules


@dataclass(frozen=True)
class RunConfig:
    """Parsed invocation: one subcommand plus its effective knob values."""

    subcommand: str
    input: str
    out: str | None = None
    threshold: int = 3
    multiple: int = 3
    seed: int = 0
    backend: str = "template"
    rules: str | None = None
    strict_hint: bool = False
    scorer: str | None = None
    pairs_dir: str | None = None
    allow_unparsed: bool = False
    format: str = "conllu-plus"

    def __post_init__(self):
        if self.threshold < 0:
            raise ValueError("lambda must be >= 0")
        if self.multiple < 1:
            raise ValueError("multiple must be >= 1")

    @classmethod
    def from_args(cls, args):
        known = {f for f in cls.__dataclass_fields__}
        values = {k: v for k, v in vars(args).items() if k in known}
        return cls(**values)


def _nonneg_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return value


def _positive_int(text):
    value = _nonneg_int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _backend_text(text):
    try:
        parse_backend_spec(text)
    except RelaugError as exc:
        raise argparse.ArgumentTypeError(str(exc))
    return text


def build_parser():
    parser = argparse.ArgumentParser(
        prog="relaug",
        description="Relational data augmentation pipeline.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, out_required=False):
        p.add_argument("input", help="corpus file (CoNLL-U-plus profile)")
        p.add_argument("--seed", type=_nonneg_int, default=0)
        p.add_argument(
            "--out",
            required=out_required,
            help="output directory" + ("" if out_required else " (default: stdout)"),
        )

    p_ingest = sub.add_parser("ingest", help="validate a corpus file and report")
    common(p_ingest)
    p_ingest.add_argument("--format", default="conllu-plus")
    p_ingest.add_argument(
        "--allow-unparsed",
        action="store_true",
        help="accept instances without dependency parses (augmented output)",
    )

    p_pairs = sub.add_parser("pairs", help="emit training pair files and manifest")
    common(p_pairs, out_required=True)
    p_pairs.add_argument("--lambda", dest="threshold", type=_nonneg_int, default=3)
    p_pairs.add_argument("--rules", help="reordering rule file (TAB: upos deprel action)")

    p_aug = sub.add_parser("augment", help="generate and validate pseudo sentences")
    common(p_aug, out_required=True)
    p_aug.add_argument("--lambda", dest="threshold", type=_nonneg_int, default=3)
    p_aug.add_argument("--multiple", type=_positive_int, default=3)
    p_aug.add_argument(
        "--backend",
        type=_backend_text,
        default="template",
        help="template | command:<path> | remote:<url>",
    )
    p_aug.add_argument(
        "--strict-hint",
        dest="strict_hint",
        action="store_true",
        help="reject outputs whose entities do not contain the hint",
    )

    p_met = sub.add_parser("metrics", help="compute diversity metrics")
    common(p_met)
    p_met.add_argument(
        "--pairs",
        dest="pairs_dir",
        help="pair output directory; folds pair statistics into the report",
    )
    p_met.add_argument(
        "--scorer",
        help="external perplexity command (one sentence in, one number out, per line)",
    )
    return parser


def cmd_ingest(cfg):
    corpus = ingest_corpus(
        cfg.input, format=cfg.format, allow_unparsed=cfg.allow_unparsed
    )
    report = {
        "instances": len(corpus.instances),
        "relations": {
            relation: len(corpus.by_relation[relation])
            for relation in sorted(corpus.relations)
        },
        "unparsed": sum(1 for inst in corpus.instances if not inst.parsed),
    }
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if cfg.out:
        os.makedirs(cfg.out, exist_ok=True)
        path = os.path.join(cfg.out, "ingest.json")
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        print(f"wrote {path}", file=sys.stderr)
    else:
        sys.stdout.write(text)
    print(f"ok: {len(corpus.instances)} instances", file=sys.stderr)
    return 0


def cmd_pairs(cfg):
    corpus = ingest_corpus(cfg.input)
    rules = load_rules(cfg.rules) if cfg.rules else DEFAULT_RULESET
    match_cfg = MatchConfig(threshold=cfg.threshold)
    index = build_index(corpus)
    pairset = PairSet.merged(
        build_restructure_pairs(corpus, rules),
        build_approx_pairs(corpus, index, match_cfg, seed=cfg.seed),
    )
    manifest = ScheduleManifest(threshold=cfg.threshold, seed=cfg.seed)
    paths = emit(pairset, manifest, cfg.out)
    stats = pairset.stats
    print(
        f"wrote {stats.restructure_count} restructure and "
        f"{stats.approximate_count} approximation pairs to {cfg.out}",
        file=sys.stderr,
    )
    for path in paths.values():
        print(f"  {path}", file=sys.stderr)
    return 0


def cmd_augment(cfg):
    corpus = ingest_corpus(cfg.input)
    spec = parse_backend_spec(cfg.backend, strict_hint=cfg.strict_hint)
    requests = sample_requests(corpus, cfg.multiple, cfg.seed)
    instances, report = generate(
        requests,
        spec,
        corpus=corpus,
        match_cfg=MatchConfig(threshold=cfg.threshold),
        seed=cfg.seed,
    )
    os.makedirs(cfg.out, exist_ok=True)
    out_corpus = os.path.join(cfg.out, "augmented.conllu")
    out_rejects = os.path.join(cfg.out, "rejects.jsonl")
    write_corpus(instances, out_corpus)
    report.write(out_rejects)
    print(
        f"requested {report.requested}, accepted {report.accepted}, "
        f"rejected {len(report.rejections)}",
        file=sys.stderr,
    )
    print(f"  {out_corpus}", file=sys.stderr)
    print(f"  {out_rejects}", file=sys.stderr)
    return 0


def cmd_metrics(cfg):
    corpus = ingest_corpus(cfg.input)
    pair_stats = None
    if cfg.pairs_dir:
        manifest = read_manifest(os.path.join(cfg.pairs_dir, "manifest.json"))
        sets = [
            PairSet(read_pairs(os.path.join(cfg.pairs_dir, manifest.pair_files[task])))
            for task in manifest.task_order
        ]
        pair_stats = PairSet.merged(*sets).stats
    report = build_report(corpus.instances, pair_stats=pair_stats, scorer=cfg.scorer)
    if cfg.out:
        os.makedirs(cfg.out, exist_ok=True)
        json_path = os.path.join(cfg.out, "metrics.json")
        table_path = os.path.join(cfg.out, "metrics.txt")
        with open(json_path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(report.to_json() + "\n")
        with open(table_path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(report.to_table())
        print(f"wrote {json_path} and {table_path}", file=sys.stderr)
    else:
        sys.stdout.write(report.to_json() + "\n")
    sys.stderr.write(report.to_table())
    return 0


_HANDLERS = {
    "ingest": cmd_ingest,
    "pairs": cmd_pairs,
    "augment": cmd_augment,
    "metrics": cmd_metrics,
}


def run(argv):
    """Parse argv (without the program name) and execute one subcommand."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return int(code) if code is not None else 0
    try:
        cfg = RunConfig.from_args(args)
        return _HANDLERS[cfg.subcommand](cfg)
    except (RelaugError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main(argv=None):
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
