"""Pooled-judgment evaluation toolkit for text-to-media retrieval benchmarks.

Subpackage map:

- corpus:    data model and file IO (runs, judgments, queries)
- metrics:   Correct@K, Recall@K, average precision, delta reports
- pooling:   pool construction, annotation plans, label resolution
- agreement: raw agreement and Krippendorff's alpha
- analysis:  overlap/RBO, leave-one-system-out bias, distributions
- stats:     bootstrap budget sizing, Spearman/Kendall correlations
- textsim:   character n-gram TF-IDF similarity profiles
- plots:     matplotlib renderings of the report data
- cli:       command-line entry point (`pooleval`)
- service:   HTTP annotation service backing the judging UI
"""

from .corpus import (
    Collection,
    JudgmentSet,
    Query,
    RankedRun,
    merge_judgments,
    parse_judgments,
    parse_queries,
    parse_run,
)
from .metrics import DEFAULT_KS, delta_report, evaluate
from .pooling import ResolutionResult, assignment_plan, build_pool, resolve_labels

__version__ = "0.1.0"

__all__ = [
    "Collection",
    "JudgmentSet",
    "Query",
    "RankedRun",
    "merge_judgments",
    "parse_judgments",
    "parse_queries",
    "parse_run",
    "DEFAULT_KS",
    "delta_report",
    "evaluate",
    "ResolutionResult",
    "assignment_plan",
    "build_pool",
    "resolve_labels",
    "__version__",
]
