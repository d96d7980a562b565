"""Retrieval metrics over ranked lists and binary judgments.

Implements the hit-based Correct@K, the textbook multi-positive Recall@K,
average precision, and first-positive rank, plus run-level evaluation and
corrected-vs-original delta reports. Pairs absent from a judgment set are
unjudged and contribute nothing to any numerator or denominator; only
explicit relevant labels count as positives.

Aggregation uses plain summation over query ids in sorted order so results
are bit-reproducible regardless of parallelism in the caller.
"""

from __future__ import annotations

import statistics
import warnings
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .corpus import JudgmentSet, RankedRun, ValidationWarning

DEFAULT_KS = (1, 5, 10, 50)

FORMAT_VERSION = 1

NO_POSITIVE_EXCLUDE = "exclude"
NO_POSITIVE_ZERO = "zero"


class NoKnownPositiveError(ValueError):
    """The query has no item labeled relevant, so the metric is undefined."""

    def __init__(self, query_id: str):
        super().__init__(f"query {query_id} has no known positive item")
        self.query_id = query_id


class EvaluationError(ValueError):
    """Run and judgments share no queries."""


class PositiveMissingWarning(UserWarning):
    """A judged positive does not appear in the ranked list; it contributes a
    zero precision term but stays in the average-precision denominator."""


def correct_at_k(
    run_list: Sequence[str], judgments: JudgmentSet, query_id: str, k: int
) -> int:
    """1 if at least one relevant item is ranked in the top ``k``, else 0."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    positives = judgments.relevant_items(query_id)
    if not positives:
        raise NoKnownPositiveError(query_id)
    return int(any(item in positives for item in run_list[:k]))


def recall_at_k(
    run_list: Sequence[str], judgments: JudgmentSet, query_id: str, k: int
) -> float:
    """Fraction of the query's relevant items that appear in the top ``k``.

    The denominator counts every item judged relevant for the query, whether
    or not the ranked list contains it.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    positives = judgments.relevant_items(query_id)
    if not positives:
        raise NoKnownPositiveError(query_id)
    hit = sum(1 for item in run_list[:k] if item in positives)
    return hit / len(positives)


def average_precision(
    run_list: Sequence[str], judgments: JudgmentSet, query_id: str
) -> float:
    """Mean of precision at each rank where a relevant item occurs.

    Judged positives absent from the ranked list add zero precision terms but
    remain in the denominator (a warning reports how many were missing).
    """
    positives = judgments.relevant_items(query_id)
    if not positives:
        raise NoKnownPositiveError(query_id)
    hits = 0
    acc = 0.0
    for i, item in enumerate(run_list, start=1):
        if item in positives:
            hits += 1
            acc += hits / i
    if hits < len(positives):
        warnings.warn(
            f"query {query_id}: {len(positives) - hits} judged positive(s) "
            "absent from the ranked list",
            PositiveMissingWarning,
        )
    return acc / len(positives)


def first_positive_rank(
    run_list: Sequence[str], judgments: JudgmentSet, query_id: str
) -> int | None:
    """1-based rank of the first relevant item, or None if none is ranked."""
    positives = judgments.relevant_items(query_id)
    for i, item in enumerate(run_list, start=1):
        if item in positives:
            return i
    return None


@dataclass(frozen=True)
class QueryMetrics:
    correct_at: Mapping[int, int]
    recall_at: Mapping[int, float]
    avg_prec: float
    first_pos_rank: int | None


@dataclass(frozen=True)
class AggregateMetrics:
    n_evaluated: int
    correct_at: Mapping[int, float]
    recall_at: Mapping[int, float]
    avg_prec: float
    mean_first_pos_rank: float | None
    median_first_pos_rank: float | None
    n_ranked: int


@dataclass(frozen=True)
class MetricReport:
    """Per-query and aggregate metrics for one run under one judgment set."""

    run: str
    judgment_tag: str
    ks: tuple[int, ...]
    per_query: Mapping[str, QueryMetrics]
    no_positive_queries: tuple[str, ...]
    aggregate: AggregateMetrics

    def to_dict(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "report": "eval",
            "run": self.run,
            "judgment_tag": self.judgment_tag,
            "ks": list(self.ks),
            "n_evaluated": self.aggregate.n_evaluated,
            "n_no_positive": len(self.no_positive_queries),
            "no_positive_queries": list(self.no_positive_queries),
            "aggregate": {
                "correct_at": {str(k): v for k, v in self.aggregate.correct_at.items()},
                "recall_at": {str(k): v for k, v in self.aggregate.recall_at.items()},
                "avg_prec": self.aggregate.avg_prec,
                "mean_first_pos_rank": self.aggregate.mean_first_pos_rank,
                "median_first_pos_rank": self.aggregate.median_first_pos_rank,
                "n_ranked": self.aggregate.n_ranked,
            },
            "per_query": {
                qid: {
                    "correct_at": {str(k): v for k, v in qm.correct_at.items()},
                    "recall_at": {str(k): v for k, v in qm.recall_at.items()},
                    "avg_prec": qm.avg_prec,
                    "first_pos_rank": qm.first_pos_rank,
                }
                for qid, qm in sorted(self.per_query.items())
            },
        }

    def to_csv(self) -> str:
        rows = ["metric,k,value"]
        agg = self.aggregate
        for k in self.ks:
            rows.append(f"correct_at,{k},{agg.correct_at[k]!r}")
        for k in self.ks:
            rows.append(f"recall_at,{k},{agg.recall_at[k]!r}")
        rows.append(f"avg_prec,,{agg.avg_prec!r}")
        rows.append(f"mean_first_pos_rank,,{_opt(agg.mean_first_pos_rank)}")
        rows.append(f"median_first_pos_rank,,{_opt(agg.median_first_pos_rank)}")
        rows.append(f"n_evaluated,,{agg.n_evaluated}")
        rows.append(f"n_no_positive,,{len(self.no_positive_queries)}")
        return "\n".join(rows) + "\n"

    def per_query_csv(self) -> str:
        header = ["query_id"]
        header += [f"correct_at_{k}" for k in self.ks]
        header += [f"recall_at_{k}" for k in self.ks]
        header += ["avg_prec", "first_pos_rank"]
        rows = [",".join(header)]
        for qid in sorted(self.per_query):
            qm = self.per_query[qid]
            cells = [qid]
            cells += [str(qm.correct_at[k]) for k in self.ks]
            cells += [repr(qm.recall_at[k]) for k in self.ks]
            cells.append(repr(qm.avg_prec))
            cells.append("" if qm.first_pos_rank is None else str(qm.first_pos_rank))
            rows.append(",".join(cells))
        return "\n".join(rows) + "\n"


def _opt(value: float | None) -> str:
    return "" if value is None else repr(value)


def _validated_ks(ks: Sequence[int]) -> tuple[int, ...]:
    out = tuple(dict.fromkeys(int(k) for k in ks))
    if not out or any(k < 1 for k in out):
        raise ValueError(f"metric cutoffs must be positive integers, got {ks!r}")
    return out


def evaluate(
    run: RankedRun,
    judgments: JudgmentSet,
    ks: Sequence[int] = DEFAULT_KS,
    no_positive_policy: str = NO_POSITIVE_EXCLUDE,
) -> MetricReport:
    """Score every query of ``run`` under ``judgments``.

    Queries without a known positive are listed separately and, by default,
    excluded from the aggregates; with ``no_positive_policy="zero"`` they
    instead contribute zero to every averaged metric.
    """
    ks = _validated_ks(ks)
    if no_positive_policy not in (NO_POSITIVE_EXCLUDE, NO_POSITIVE_ZERO):
        raise ValueError(f"unknown no-positive policy {no_positive_policy!r}")
    if not set(run.entries) & judgments.queries():
        raise EvaluationError(
            f"run {run.system!r} and judgments {judgments.tag!r} share no queries"
        )

    per_query: dict[str, QueryMetrics] = {}
    no_positive: list[str] = []
    for qid in sorted(run.entries):
        items = run.ranking(qid)
        positives = judgments.relevant_items(qid)
        if not positives:
            no_positive.append(qid)
            if no_positive_policy == NO_POSITIVE_ZERO:
                per_query[qid] = QueryMetrics(
                    correct_at={k: 0 for k in ks},
                    recall_at={k: 0.0 for k in ks},
                    avg_prec=0.0,
                    first_pos_rank=None,
                )
            continue
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", PositiveMissingWarning)
            ap = average_precision(items, judgments, qid)
        per_query[qid] = QueryMetrics(
            correct_at={k: correct_at_k(items, judgments, qid, k) for k in ks},
            recall_at={k: recall_at_k(items, judgments, qid, k) for k in ks},
            avg_prec=ap,
            first_pos_rank=first_positive_rank(items, judgments, qid),
        )

    qids = sorted(per_query)
    n = len(qids)
    ranks = [per_query[q].first_pos_rank for q in qids if per_query[q].first_pos_rank is not None]
    aggregate = AggregateMetrics(
        n_evaluated=n,
        correct_at={k: sum(per_query[q].correct_at[k] for q in qids) / n for k in ks},
        recall_at={k: sum(per_query[q].recall_at[k] for q in qids) / n for k in ks},
        avg_prec=sum(per_query[q].avg_prec for q in qids) / n,
        mean_first_pos_rank=sum(ranks) / len(ranks) if ranks else None,
        median_first_pos_rank=float(statistics.median(ranks)) if ranks else None,
        n_ranked=len(ranks),
    )
    return MetricReport(
        run=run.system,
        judgment_tag=judgments.tag,
        ks=ks,
        per_query=per_query,
        no_positive_queries=tuple(no_positive),
        aggregate=aggregate,
    )


@dataclass(frozen=True)
class DeltaEntry:
    metric: str
    k: int | None
    corrected: float | None
    original: float | None
    delta: float | None


@dataclass(frozen=True)
class DeltaReport:
    """Corrected (A), original (B), and delta (C = A - B) per metric.

    The delta is the IEEE-754 difference of the two aggregates, so it carries
    no error of its own; reconstructing A as B + C is exact up to one unit in
    the last place. All three serialize at full precision.
    """

    run: str
    original_tag: str
    corrected_tag: str
    ks: tuple[int, ...]
    entries: tuple[DeltaEntry, ...]
    corrected_report: MetricReport = field(repr=False)
    original_report: MetricReport = field(repr=False)
    ap_delta_negative: bool = False

    def to_dict(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "report": "delta",
            "run": self.run,
            "original_tag": self.original_tag,
            "corrected_tag": self.corrected_tag,
            "ks": list(self.ks),
            "ap_delta_negative": self.ap_delta_negative,
            "n_evaluated_corrected": self.corrected_report.aggregate.n_evaluated,
            "n_evaluated_original": self.original_report.aggregate.n_evaluated,
            "entries": [
                {
                    "metric": e.metric,
                    "k": e.k,
                    "corrected": e.corrected,
                    "original": e.original,
                    "delta": e.delta,
                }
                for e in self.entries
            ],
        }

    def to_csv(self) -> str:
        rows = ["metric,k,corrected,original,delta"]
        for e in self.entries:
            k = "" if e.k is None else str(e.k)
            rows.append(
                f"{e.metric},{k},{_opt(e.corrected)},{_opt(e.original)},{_opt(e.delta)}"
            )
        return "\n".join(rows) + "\n"

    def format_table(self) -> str:
        """Percent lines in the "A (B + C)%" style, three significant figures."""
        lines = []
        for e in self.entries:
            if e.metric == "correct_at":
                name = f"C@{e.k}"
            elif e.metric == "avg_prec":
                name = "AP"
            else:
                continue
            lines.append(
                f"{name:<5} {format_percent(e.corrected)} ({format_percent(e.original)} + {format_percent(e.delta)})%"
            )
        return "\n".join(lines)


def format_percent(value: float | None) -> str:
    """Fraction as a percent with three significant figures (Table style)."""
    if value is None:
        return "na"
    out = format(100.0 * value, "#.3g")
    return out[:-1] if out.endswith(".") else out


def delta_report(
    run: RankedRun,
    original: JudgmentSet,
    corrected: JudgmentSet,
    ks: Sequence[int] = DEFAULT_KS,
    no_positive_policy: str = NO_POSITIVE_EXCLUDE,
) -> DeltaReport:
    """Evaluate ``run`` under both judgment sets and report per-metric deltas.

    ``corrected`` is expected to be a superset of ``original``; a warning is
    issued otherwise. A negative average-precision delta is possible with
    truncated ranked lists and is flagged rather than rejected.
    """
    changed = [
        pair for pair, label in original.labels.items()
        if corrected.labels.get(pair) != label
    ]
    if changed:
        warnings.warn(
            f"corrected set is not a superset of the original: {len(changed)} "
            "pair(s) missing or relabeled",
            ValidationWarning,
        )
    report_a = evaluate(run, corrected, ks, no_positive_policy)
    report_b = evaluate(run, original, ks, no_positive_policy)
    if report_a.aggregate.n_evaluated != report_b.aggregate.n_evaluated:
        warnings.warn(
            "evaluated query sets differ between original and corrected judgments; "
            "deltas compare aggregates over different populations",
            ValidationWarning,
        )

    entries: list[DeltaEntry] = []
    for k in report_a.ks:
        a, b = report_a.aggregate.correct_at[k], report_b.aggregate.correct_at[k]
        entries.append(DeltaEntry("correct_at", k, a, b, a - b))
    for k in report_a.ks:
        a, b = report_a.aggregate.recall_at[k], report_b.aggregate.recall_at[k]
        entries.append(DeltaEntry("recall_at", k, a, b, a - b))
    a, b = report_a.aggregate.avg_prec, report_b.aggregate.avg_prec
    ap_negative = a - b < 0
    entries.append(DeltaEntry("avg_prec", None, a, b, a - b))
    for name in ("mean_first_pos_rank", "median_first_pos_rank"):
        a = getattr(report_a.aggregate, name)
        b = getattr(report_b.aggregate, name)
        delta = None if a is None or b is None else a - b
        entries.append(DeltaEntry(name, None, a, b, delta))

    if ap_negative:
        warnings.warn(
            "average precision decreased after adding positives (possible with "
            "truncated ranked lists)",
            ValidationWarning,
        )
    return DeltaReport(
        run=run.system,
        original_tag=original.tag,
        corrected_tag=corrected.tag,
        ks=report_a.ks,
        entries=tuple(entries),
        corrected_report=report_a,
        original_report=report_b,
        ap_delta_negative=ap_negative,
    )
