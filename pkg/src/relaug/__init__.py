"""Relational text augmentation toolkit.

Ingests relation-annotated, dependency-parsed sentences; extracts the
dependency path between the two entities as a comparable pattern; builds
sentence-pair training data for a restructuring task and a
pattern-approximation task; runs marker-validated pseudo-sentence
generation against pluggable backends; and measures lexical diversity of
the result. Everything is seed-deterministic.
"""

from .augment import (
    BackendSpec,
    CommandBackend,
    GenRequest,
    GenResponse,
    RejectReport,
    Rejection,
    RemoteBackend,
    TemplateBackend,
    generate,
    parse_backend_spec,
    sample_requests,
    substitute_entity,
    write_augmented,
)
from .corpus import (
    DEFAULT_SCHEME,
    Corpus,
    MarkerScheme,
    Provenance,
    REInstance,
    Span,
    Token,
    ingest,
    inject_markers,
    instance_to_block,
    parse_marked,
    read_corpus,
    write_corpus,
)
from .errors import (
    BackendUnavailable,
    DuplicateMarker,
    EmptyEntity,
    FormatError,
    InterleavedMarkers,
    InvariantError,
    LineCountMismatch,
    MarkerError,
    MissingMarker,
    NoParse,
    RelationTooSmall,
    RelaugError,
    ScorerFailure,
    UnknownId,
)
from .metrics import (
    DiversitySummary,
    MetricsReport,
    TTRSummary,
    build_report,
    pattern_diversity,
    percent,
    perplexity,
    ttr,
)
from .pairgen import (
    PairRecord,
    PairSet,
    PairStats,
    ScheduleManifest,
    TASK_APPROXIMATE,
    TASK_RESTRUCTURE,
    build_approx_pairs,
    build_restructure_pairs,
    emit,
    read_manifest,
    read_pairs,
)
from .pattern import (
    MatchConfig,
    Pattern,
    PatternIndex,
    build_index,
    entity_head,
    extract_pattern,
    lev_distance,
    match_targets,
)
from .restructure import (
    DEFAULT_RULESET,
    MOVE_AFTER_HEAD,
    MOVE_BEFORE_HEAD,
    SWAP_WITH_NEXT_SIBLING,
    ReorderRule,
    RuleSet,
    load_rules,
    restructure,
)

__version__ = "0.1.0"

__all__ = [
    "BackendSpec",
    "BackendUnavailable",
    "CommandBackend",
    "Corpus",
    "DEFAULT_RULESET",
    "DEFAULT_SCHEME",
    "DiversitySummary",
    "DuplicateMarker",
    "EmptyEntity",
    "FormatError",
    "GenRequest",
    "GenResponse",
    "InterleavedMarkers",
    "InvariantError",
    "LineCountMismatch",
    "MarkerError",
    "MarkerScheme",
    "MatchConfig",
    "MetricsReport",
    "MissingMarker",
    "MOVE_AFTER_HEAD",
    "MOVE_BEFORE_HEAD",
    "NoParse",
    "PairRecord",
    "PairSet",
    "PairStats",
    "Pattern",
    "PatternIndex",
    "Provenance",
    "REInstance",
    "RejectReport",
    "Rejection",
    "RelationTooSmall",
    "RelaugError",
    "RemoteBackend",
    "ReorderRule",
    "RuleSet",
    "ScheduleManifest",
    "ScorerFailure",
    "Span",
    "SWAP_WITH_NEXT_SIBLING",
    "TASK_APPROXIMATE",
    "TASK_RESTRUCTURE",
    "TTRSummary",
    "TemplateBackend",
    "Token",
    "UnknownId",
    "build_approx_pairs",
    "build_index",
    "build_report",
    "build_restructure_pairs",
    "emit",
    "entity_head",
    "extract_pattern",
    "generate",
    "ingest",
    "inject_markers",
    "instance_to_block",
    "lev_distance",
    "load_rules",
    "match_targets",
    "parse_backend_spec",
    "parse_marked",
    "pattern_diversity",
    "percent",
    "perplexity",
    "read_corpus",
    "read_manifest",
    "read_pairs",
    "restructure",
    "sample_requests",
    "substitute_entity",
    "ttr",
    "write_augmented",
    "write_corpus",
]
