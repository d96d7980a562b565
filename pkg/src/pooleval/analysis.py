"""Diagnostic analyses over runs and judgments.

Covers three families:

* prediction overlap between systems, both plain set overlap at a fixed
  depth and rank-biased overlap (RBO) with persistence parameter p;
* leave-one-system-out ablation, which rescoring a target system after
  discarding pooled positives only that system contributed, estimating the
  bias a future unpooled model would face;
* descriptive distributions: positives per query, ranks of positives split
  by label provenance, caption lengths, and the joint length-by-positives
  density, all exported as bin edges plus counts so any plotting frontend
  can redraw them.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Mapping, Sequence

from .corpus import (
    RELEVANT,
    SOURCE_MERGED,
    SOURCE_ORIGINAL,
    JudgmentSet,
    Query,
    RankedRun,
    ValidationWarning,
    merge_judgments,
)
from .metrics import DEFAULT_KS, MetricReport, evaluate

FORMAT_VERSION = 1

RBO_EXTRAPOLATED = "extrapolated"
RBO_TRUNCATED = "truncated"


class ProvenanceError(ValueError):
    """A pooled label lacks the per-system provenance the analysis needs."""


def plain_overlap(
    list_a: Sequence[str], list_b: Sequence[str], depth: int
) -> float:
    """|top-depth(A) and top-depth(B)| / depth.

    Lists shorter than ``depth`` use their available prefix but keep the
    full-depth normalizer, with a warning.
    """
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    _warn_short(list_a, list_b, depth)
    return len(set(list_a[:depth]) & set(list_b[:depth])) / depth


def rbo(
    list_a: Sequence[str],
    list_b: Sequence[str],
    p: float = 0.9,
    depth: int = 10,
    variant: str = RBO_EXTRAPOLATED,
) -> float:
    """Rank-biased overlap of two ranked prefixes.

    The extrapolated form assumes agreement beyond the evaluated depth
    continues at the depth-D level, so identical lists score exactly 1:

        (1 - p) * sum_{d=1..D} p^(d-1) * A_d  +  p^D * A_D

    with A_d the fraction of the top-d sets shared. The truncated variant
    drops the extrapolation term and is a lower bound useful for sensitivity
    checks.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"persistence p must be in (0, 1), got {p}")
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    if variant not in (RBO_EXTRAPOLATED, RBO_TRUNCATED):
        raise ValueError(f"unknown rbo variant {variant!r}")
    _warn_short(list_a, list_b, depth)

    seen_a: set[str] = set()
    seen_b: set[str] = set()
    shared = 0
    agreements: list[float] = []
    for d in range(1, depth + 1):
        x = list_a[d - 1] if d <= len(list_a) else None
        y = list_b[d - 1] if d <= len(list_b) else None
        if x is not None and x == y:
            shared += 1
        else:
            if x is not None and x in seen_b:
                shared += 1
            if y is not None and y in seen_a:
                shared += 1
        if x is not None:
            seen_a.add(x)
        if y is not None:
            seen_b.add(y)
        agreements.append(shared / d)

    final = agreements[-1]
    weight = 1.0  # p^(d-1)
    if variant == RBO_TRUNCATED:
        acc = 0.0
        for a_d in agreements:
            acc += weight * a_d
            weight *= p
        return (1.0 - p) * acc
    # Algebraically equal to (1-p) * sum(p^(d-1) * A_d) + p^D * A_D but with
    # the geometric mass factored out, so constant agreement (identical or
    # disjoint lists) suffers no rounding: every correction term is zero.
    correction = 0.0
    for a_d in agreements[:-1]:
        correction += weight * (a_d - final)
        weight *= p
    return final + (1.0 - p) * correction


def _warn_short(list_a: Sequence[str], list_b: Sequence[str], depth: int) -> None:
    if len(list_a) < depth or len(list_b) < depth:
        warnings.warn(
            f"ranked list shorter than depth {depth}; overlap normalized by "
            "the full depth",
            ValidationWarning,
        )


@dataclass(frozen=True)
class PairOverlap:
    system_a: str
    system_b: str
    per_query: Mapping[str, tuple[float, float]]  # qid -> (overlap, rbo)
    mean_overlap: float
    mean_rbo: float


@dataclass(frozen=True)
class OverlapReport:
    depth: int
    p: float
    variant: str
    pairs: tuple[PairOverlap, ...]

    def to_dict(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "report": "overlap",
            "depth": self.depth,
            "p": self.p,
            "variant": self.variant,
            "pairs": [
                {
                    "system_a": po.system_a,
                    "system_b": po.system_b,
                    "n_queries": len(po.per_query),
                    "mean_overlap": po.mean_overlap,
                    "mean_rbo": po.mean_rbo,
                }
                for po in self.pairs
            ],
        }

    def to_csv(self) -> str:
        rows = ["system_a,system_b,query_id,overlap,rbo"]
        for po in self.pairs:
            for qid in sorted(po.per_query):
                ov, rb = po.per_query[qid]
                rows.append(f"{po.system_a},{po.system_b},{qid},{ov!r},{rb!r}")
        return "\n".join(rows) + "\n"

    def format_table(self) -> str:
        lines = [f"{'systems':<28} {'overlap':>8} {'rbo':>8}"]
        for po in self.pairs:
            name = f"{po.system_a} & {po.system_b}"
            lines.append(f"{name:<28} {po.mean_overlap:>8.4f} {po.mean_rbo:>8.4f}")
        return "\n".join(lines)


def overlap_report(
    runs: Sequence[RankedRun],
    p: float = 0.9,
    depth: int = 10,
    variant: str = RBO_EXTRAPOLATED,
) -> OverlapReport:
    """Per-query overlap and RBO for every unordered pair of runs, averaged
    over the queries the two runs share."""
    if len(runs) < 2:
        raise ValueError("overlap analysis needs at least two runs")
    pairs = []
    for i in range(len(runs)):
        for j in range(i + 1, len(runs)):
            a, b = runs[i], runs[j]
            shared = sorted(a.queries() & b.queries())
            if not shared:
                warnings.warn(
                    f"runs {a.system!r} and {b.system!r} share no queries",
                    ValidationWarning,
                )
                continue
            per_query = {}
            for qid in shared:
                la, lb = a.ranking(qid), b.ranking(qid)
                per_query[qid] = (
                    plain_overlap(la, lb, depth),
                    rbo(la, lb, p, depth, variant),
                )
            pairs.append(
                PairOverlap(
                    system_a=a.system,
                    system_b=b.system,
                    per_query=per_query,
                    mean_overlap=sum(per_query[q][0] for q in shared) / len(shared),
                    mean_rbo=sum(per_query[q][1] for q in shared) / len(shared),
                )
            )
    return OverlapReport(depth=depth, p=p, variant=variant, pairs=tuple(pairs))


def pooled_provenance_systems(judgments: JudgmentSet, pair) -> tuple[str, ...]:
    """Systems recorded in a pooled label's source tag ("pooled:a+b")."""
    source = judgments.sources[pair]
    if not source.startswith("pooled:"):
        raise ProvenanceError(
            f"label for pair {pair} has source {source!r}; leave-one-out needs "
            "per-system provenance of the form pooled:<sys>+<sys>"
        )
    systems = tuple(s for s in source[len("pooled:"):].split("+") if s)
    if not systems:
        raise ProvenanceError(f"label for pair {pair} names no contributing system")
    return systems


@dataclass(frozen=True)
class AblationReport:
    """Metrics for one target system with and without its own pooled labels."""

    target: str
    all_report: MetricReport
    new_report: MetricReport

    def to_dict(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "report": "ablate",
            "target": self.target,
            "all": self.all_report.to_dict(),
            "new": self.new_report.to_dict(),
        }

    def to_csv(self) -> str:
        rows = ["target,metric,k,all,new,bias"]
        agg_all, agg_new = self.all_report.aggregate, self.new_report.aggregate
        for k in self.all_report.ks:
            a, n = agg_all.correct_at[k], agg_new.correct_at[k]
            rows.append(f"{self.target},correct_at,{k},{a!r},{n!r},{a - n!r}")
        for k in self.all_report.ks:
            a, n = agg_all.recall_at[k], agg_new.recall_at[k]
            rows.append(f"{self.target},recall_at,{k},{a!r},{n!r},{a - n!r}")
        a, n = agg_all.avg_prec, agg_new.avg_prec
        rows.append(f"{self.target},avg_prec,,{a!r},{n!r},{a - n!r}")
        return "\n".join(rows) + "\n"

    def format_table(self) -> str:
        lines = [f"{'data':<6}" + "".join(f"C@{k:<8}" for k in self.all_report.ks)]
        for name, rep in (("All", self.all_report), ("New", self.new_report)):
            cells = "".join(f"{rep.aggregate.correct_at[k]:<10.3f}" for k in rep.ks)
            lines.append(f"{name:<6}{cells}")
        return "\n".join(lines)


def leave_one_out(
    runs: Sequence[RankedRun],
    original: JudgmentSet,
    pooled: JudgmentSet,
    target: str,
    ks: Sequence[int] = DEFAULT_KS,
) -> AblationReport:
    """Score ``target`` under all pooled positives versus only those another
    system also surfaced, emulating evaluation of a future unpooled model.

    Every relevant pooled label must carry per-system provenance; missing
    provenance aborts rather than silently attributing labels.
    """
    by_tag = {r.system: r for r in runs}
    if target not in by_tag:
        raise ValueError(f"target {target!r} is not among the runs: {sorted(by_tag)}")
    run = by_tag[target]

    all_positive: dict = {}
    new_positive: dict = {}
    all_sources: dict = {}
    new_sources: dict = {}
    for pair, label in pooled.labels.items():
        if label != RELEVANT:
            continue
        systems = pooled_provenance_systems(pooled, pair)
        all_positive[pair] = RELEVANT
        all_sources[pair] = pooled.sources[pair]
        if any(s != target for s in systems):
            new_positive[pair] = RELEVANT
            new_sources[pair] = pooled.sources[pair]

    with_all = merge_judgments(
        original, JudgmentSet(all_positive, all_sources, tag=f"{pooled.tag}:all")
    )
    with_new = merge_judgments(
        original, JudgmentSet(new_positive, new_sources, tag=f"{pooled.tag}:new")
    )
    return AblationReport(
        target=target,
        all_report=evaluate(run, with_all, ks),
        new_report=evaluate(run, with_new, ks),
    )


@dataclass(frozen=True)
class Histogram:
    name: str
    bin_width: int
    bin_edges: tuple[int, ...]
    counts: tuple[int, ...]
    population: int

    def to_rows(self) -> list[tuple[str, int, int, int]]:
        return [
            (self.name, self.bin_edges[i], self.bin_edges[i + 1], self.counts[i])
            for i in range(len(self.counts))
        ]


def _int_histogram(name: str, values: Sequence[int], width: int = 1) -> Histogram:
    """Contiguous fixed-width integer bins [i*w, (i+1)*w) covering all values."""
    if any(v < 0 for v in values):
        raise ValueError(f"{name}: negative values cannot be binned")
    n_bins = (max(values) // width + 1) if values else 1
    counts = [0] * n_bins
    for v in values:
        counts[v // width] += 1
    edges = tuple(i * width for i in range(n_bins + 1))
    return Histogram(
        name=name,
        bin_width=width,
        bin_edges=edges,
        counts=tuple(counts),
        population=len(values),
    )


@dataclass(frozen=True)
class JointHistogram:
    """Counts on a (positives count) x (caption word length) integer grid."""

    x_name: str
    y_name: str
    x_edges: tuple[int, ...]
    y_edges: tuple[int, ...]
    counts: tuple[tuple[int, ...], ...]  # indexed [x][y]
    population: int

    def x_marginal(self) -> tuple[int, ...]:
        return tuple(sum(row) for row in self.counts)

    def y_marginal(self) -> tuple[int, ...]:
        return tuple(sum(col) for col in zip(*self.counts))


@dataclass(frozen=True)
class DistributionReport:
    positives_per_query: Histogram
    positive_rank: Mapping[str, Mapping[str, Histogram]]  # run -> source class
    caption_words: Histogram
    caption_chars: Histogram
    joint: JointHistogram

    def to_dict(self) -> dict:
        def hist(h: Histogram) -> dict:
            return {
                "bin_width": h.bin_width,
                "bin_edges": list(h.bin_edges),
                "counts": list(h.counts),
                "population": h.population,
            }

        return {
            "format_version": FORMAT_VERSION,
            "report": "dist",
            "positives_per_query": hist(self.positives_per_query),
            "positive_rank": {
                run: {src: hist(h) for src, h in sorted(by_src.items())}
                for run, by_src in sorted(self.positive_rank.items())
            },
            "caption_words": hist(self.caption_words),
            "caption_chars": hist(self.caption_chars),
            "joint_positives_words": {
                "x": self.joint.x_name,
                "y": self.joint.y_name,
                "x_edges": list(self.joint.x_edges),
                "y_edges": list(self.joint.y_edges),
                "counts": [list(row) for row in self.joint.counts],
                "log10_density": [
                    [None if c == 0 else math.log10(c) for c in row]
                    for row in self.joint.counts
                ],
                "population": self.joint.population,
            },
        }

    def to_csv(self) -> str:
        rows = ["histogram,bin_lo,bin_hi,count"]
        for h in (self.positives_per_query, self.caption_words, self.caption_chars):
            for name, lo, hi, count in h.to_rows():
                rows.append(f"{name},{lo},{hi},{count}")
        for run in sorted(self.positive_rank):
            for src in sorted(self.positive_rank[run]):
                for name, lo, hi, count in self.positive_rank[run][src].to_rows():
                    rows.append(f"{name},{lo},{hi},{count}")
        return "\n".join(rows) + "\n"


def _source_class(source: str) -> str:
    """Original labels (including merged pairs, whose original label
    pre-existed the pool) versus pooled labels."""
    if source in (SOURCE_ORIGINAL, SOURCE_MERGED):
        return "original"
    return "pooled"


def distributions(
    runs: Sequence[RankedRun],
    judgments: JudgmentSet,
    queries: Mapping[str, Query],
) -> DistributionReport:
    """Histograms for positives per query, positive ranks by provenance, and
    caption lengths, plus the joint positives-by-length grid.

    Queries with empty captions are excluded from the length histograms and
    the joint grid; each histogram records its own population.
    """
    qids = sorted(queries)
    pos_counts = {q: len(judgments.relevant_items(q)) for q in qids}
    positives_hist = _int_histogram(
        "positives_per_query", [pos_counts[q] for q in qids]
    )

    rank_hists: dict[str, dict[str, Histogram]] = {}
    for run in runs:
        by_src: dict[str, list[int]] = {"original": [], "pooled": []}
        for qid in qids:
            ranking = run.ranking(qid)
            index = {item: r for r, item in enumerate(ranking, start=1)}
            for item in sorted(judgments.relevant_items(qid)):
                rank = index.get(item)
                if rank is None:
                    continue
                by_src[_source_class(judgments.sources[(qid, item)])].append(rank)
        rank_hists[run.system] = {
            src: _int_histogram(f"positive_rank:{run.system}:{src}", vals)
            for src, vals in by_src.items()
        }

    with_text = [q for q in qids if queries[q].text]
    words = [queries[q].word_length for q in with_text]
    chars = [queries[q].char_length for q in with_text]
    words_hist = _int_histogram("caption_words", words)
    chars_hist = _int_histogram("caption_chars", chars, width=20)

    x_vals = [pos_counts[q] for q in with_text]
    nx = (max(x_vals) + 1) if x_vals else 1
    ny = (max(words) + 1) if words else 1
    grid = [[0] * ny for _ in range(nx)]
    for q in with_text:
        grid[pos_counts[q]][queries[q].word_length] += 1
    joint = JointHistogram(
        x_name="positives_per_query",
        y_name="caption_words",
        x_edges=tuple(range(nx + 1)),
        y_edges=tuple(range(ny + 1)),
        counts=tuple(tuple(row) for row in grid),
        population=len(with_text),
    )
    return DistributionReport(
        positives_per_query=positives_hist,
        positive_rank=rank_hists,
        caption_words=words_hist,
        caption_chars=chars_hist,
        joint=joint,
    )
