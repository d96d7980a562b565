"""Annotation pooling: pool construction, job planning, and label resolution.

A pool is the deduplicated union of every system's top-depth predictions,
minus pairs already judged. Pairs are kept in lexicographic (query, item)
order so the annotation queue leaks nothing about which system ranked what.
The pool artifact records, per pair, which systems contributed it; that
provenance later drives leave-one-system-out bias analysis.

Label resolution is a pure fold over the label log: one label resolves a
pair, two agreeing labels resolve it, two disagreeing labels request a third,
and three or more resolve by strict majority. Escalated labels are
abstentions and never count toward a majority.
"""

from __future__ import annotations

import json
import math
import random
import warnings
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .corpus import (
    IRRELEVANT,
    RELEVANT,
    JudgmentSet,
    Pair,
    RankedRun,
    ValidationWarning,
)

ESCALATED = "escalated"
LABEL_VALUES = (RELEVANT, IRRELEVANT, ESCALATED)

POOL_FORMAT_VERSION = 1

STATUS_RESOLVED = "resolved"
STATUS_UNRESOLVED = "unresolved"
STATUS_ESCALATED = "escalated"


def pair_id(query_id: str, item_id: str) -> str:
    """Canonical pair token. Ids contain no whitespace, so a space join is
    unambiguous."""
    return f"{query_id} {item_id}"


@dataclass(frozen=True)
class LabelRecord:
    """One rater's raw judgment of one query-item pair."""

    query_id: str
    item_id: str
    rater_id: str
    label: str
    ts: str

    def __post_init__(self):
        if self.label not in LABEL_VALUES:
            raise ValueError(f"label must be one of {LABEL_VALUES}, got {self.label!r}")
        if not self.rater_id:
            raise ValueError("rater_id must be non-empty")

    @property
    def pair(self) -> Pair:
        return (self.query_id, self.item_id)


@dataclass(frozen=True)
class Pool:
    """Deduplicated query-item pairs awaiting annotation."""

    depth: int
    pairs: tuple[Pair, ...]
    contributors: Mapping[Pair, tuple[str, ...]]
    contributing_systems: tuple[str, ...]
    excluded: int

    def __len__(self) -> int:
        return len(self.pairs)

    def to_dict(self) -> dict:
        return {
            "format_version": POOL_FORMAT_VERSION,
            "depth": self.depth,
            "contributing_systems": list(self.contributing_systems),
            "excluded": self.excluded,
            "pairs": [
                {
                    "query_id": q,
                    "item_id": i,
                    "systems": list(self.contributors[(q, i)]),
                }
                for q, i in self.pairs
            ],
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "Pool":
        pairs = tuple((p["query_id"], p["item_id"]) for p in doc["pairs"])
        contributors = {
            (p["query_id"], p["item_id"]): tuple(p["systems"]) for p in doc["pairs"]
        }
        return cls(
            depth=int(doc["depth"]),
            pairs=pairs,
            contributors=contributors,
            contributing_systems=tuple(doc["contributing_systems"]),
            excluded=int(doc["excluded"]),
        )


def build_pool(
    runs: Sequence[RankedRun], seed: JudgmentSet | None = None, depth: int = 10
) -> Pool:
    """Union of every run's top-``depth`` pairs, minus already-judged pairs."""
    if depth < 1:
        raise ValueError(f"pool depth must be >= 1, got {depth}")
    if not runs:
        raise ValueError("at least one run is required to build a pool")

    contributors: dict[Pair, set[str]] = {}
    for run in runs:
        for qid in run.entries:
            for item in run.ranking(qid)[:depth]:
                contributors.setdefault((qid, item), set()).add(run.system)

    if seed is not None:
        seed_queries = seed.queries()
        for run in runs:
            missing = seed_queries - run.queries()
            if missing:
                warnings.warn(
                    f"run {run.system!r} is missing {len(missing)} query(ies) "
                    "present in the seed judgments",
                    ValidationWarning,
                )

    judged = set(seed.labels) if seed is not None else set()
    kept = sorted(p for p in contributors if p not in judged)
    excluded = len(contributors) - len(kept)
    return Pool(
        depth=depth,
        pairs=tuple(kept),
        contributors={p: tuple(sorted(contributors[p])) for p in kept},
        contributing_systems=tuple(sorted({r.system for r in runs})),
        excluded=excluded,
    )


def export_pool_run(pool: Pool) -> str:
    """Pool pairs in the run-file grammar under the tag POOL, so any consumer
    of run files can load the queue. Ranks follow pool (lexicographic) order
    within each query; scores are all zero."""
    lines = []
    rank = 0
    last_query = None
    for qid, iid in pool.pairs:
        rank = rank + 1 if qid == last_query else 1
        last_query = qid
        lines.append(f"{qid} {iid} {rank} 0.0 POOL")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class Job:
    """One annotation task: a pair plus the labeling pass it belongs to."""

    job_id: str
    query_id: str
    item_id: str
    pass_no: int

    @property
    def pair(self) -> Pair:
        return (self.query_id, self.item_id)

    def to_dict(self) -> dict:
        return {
            "job_id": self.job_id,
            "query_id": self.query_id,
            "item_id": self.item_id,
            "pass": self.pass_no,
        }


def make_job(query_id: str, item_id: str, pass_no: int) -> Job:
    return Job(
        job_id=f"{pair_id(query_id, item_id)}#p{pass_no}",
        query_id=query_id,
        item_id=item_id,
        pass_no=pass_no,
    )


def assignment_plan(
    pool: Pool, double_label_fraction: float = 0.1, rng_seed: int = 0
) -> list[Job]:
    """Pass-1 jobs for every pair plus pass-2 jobs for a seeded-random sample.

    Exactly ``floor(fraction * len(pool))`` pairs are double-labeled; the
    sample is drawn with a seeded Mersenne Twister so plans are reproducible.
    Pass-3 jobs are not planned here; resolution creates them on disagreement.
    Rater exclusion (no rater labels the same pair twice) is enforced at
    assignment time by the annotation service.
    """
    if not 0.0 <= double_label_fraction <= 1.0:
        raise ValueError(
            f"double-label fraction must be in [0, 1], got {double_label_fraction}"
        )
    jobs = [make_job(q, i, 1) for q, i in pool.pairs]
    n_double = math.floor(double_label_fraction * len(pool.pairs))
    rng = random.Random(rng_seed)
    chosen = sorted(rng.sample(range(len(pool.pairs)), n_double))
    jobs.extend(make_job(*pool.pairs[idx], 2) for idx in chosen)
    return jobs


def write_jobs(path: str | Path, jobs: Iterable[Job]) -> None:
    text = "".join(json.dumps(j.to_dict()) + "\n" for j in jobs)
    Path(path).write_text(text, encoding="utf-8")


@dataclass(frozen=True)
class ResolutionOutcome:
    query_id: str
    item_id: str
    status: str
    label: str | None
    labels_used: int

    @property
    def pair(self) -> Pair:
        return (self.query_id, self.item_id)


@dataclass(frozen=True)
class ResolutionResult:
    judgments: JudgmentSet
    outcomes: tuple[ResolutionOutcome, ...]
    pending: tuple[Job, ...]

    @property
    def n_resolved(self) -> int:
        return sum(1 for o in self.outcomes if o.status == STATUS_RESOLVED)

    @property
    def n_unresolved(self) -> int:
        return sum(1 for o in self.outcomes if o.status == STATUS_UNRESOLVED)

    @property
    def n_escalated(self) -> int:
        return sum(1 for o in self.outcomes if o.status == STATUS_ESCALATED)

    @property
    def resolution_rate(self) -> float | None:
        return self.n_resolved / len(self.outcomes) if self.outcomes else None

    def outcomes_csv(self) -> str:
        rows = ["query_id,item_id,status,label,labels_used"]
        for o in self.outcomes:
            rows.append(
                f"{o.query_id},{o.item_id},{o.status},{o.label or ''},{o.labels_used}"
            )
        return "\n".join(rows) + "\n"


def resolve_labels(
    records: Iterable[LabelRecord],
    provenance: Mapping[Pair, Sequence[str]] | None = None,
    default_source: str = "pooled",
) -> ResolutionResult:
    """Fold raw label records into resolved judgments.

    The outcome of a pair depends only on the multiset of its labels, never
    on record order. Escalated labels are dropped before majority counting; a
    pair with nothing but escalations is reported as escalated. More than
    three labels per pair (which real collections produce by accident) are
    tolerated with a warning and resolved by strict majority; exact ties stay
    unresolved. When ``provenance`` is given, resolved labels carry a
    "pooled:<sys>+<sys>" source naming the contributing systems.
    """
    by_pair: dict[Pair, list[str]] = {}
    for rec in records:
        by_pair.setdefault(rec.pair, []).append(rec.label)

    labels: dict[Pair, str] = {}
    sources: dict[Pair, str] = {}
    outcomes: list[ResolutionOutcome] = []
    pending: list[Job] = []
    oversampled = 0

    for pair in sorted(by_pair):
        qid, iid = pair
        votes = [lb for lb in by_pair[pair] if lb != ESCALATED]
        if not votes:
            outcomes.append(ResolutionOutcome(qid, iid, STATUS_ESCALATED, None, 0))
            continue
        if len(votes) > 3:
            oversampled += 1
        counts = Counter(votes)
        top_label, top_count = counts.most_common(1)[0]
        if top_count * 2 > len(votes):
            outcomes.append(
                ResolutionOutcome(qid, iid, STATUS_RESOLVED, top_label, len(votes))
            )
            labels[pair] = top_label
            if provenance is not None and pair in provenance:
                sources[pair] = "pooled:" + "+".join(provenance[pair])
            else:
                if provenance is not None:
                    warnings.warn(
                        f"no pool provenance for resolved pair {pair}", ValidationWarning
                    )
                sources[pair] = default_source
            continue
        # Tied votes. With exactly two labels the protocol asks a third
        # rater; larger even splits stay unresolved.
        outcomes.append(ResolutionOutcome(qid, iid, STATUS_UNRESOLVED, None, len(votes)))
        if len(votes) == 2:
            pending.append(make_job(qid, iid, 3))

    if oversampled:
        warnings.warn(
            f"{oversampled} pair(s) carry more than three labels; resolved by majority",
            ValidationWarning,
        )
    return ResolutionResult(
        judgments=JudgmentSet(labels=labels, sources=sources, tag="resolved"),
        outcomes=tuple(outcomes),
        pending=tuple(pending),
    )


def format_label_record(record: LabelRecord) -> str:
    return json.dumps(
        {
            "pair_id": pair_id(record.query_id, record.item_id),
            "query_id": record.query_id,
            "item_id": record.item_id,
            "rater_id": record.rater_id,
            "label": record.label,
            "ts": record.ts,
        }
    )


def read_label_log(path: str | Path) -> list[LabelRecord]:
    """Load a line-delimited JSON label log in file order."""
    records = []
    with Path(path).open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                doc = json.loads(line)
                records.append(
                    LabelRecord(
                        query_id=doc["query_id"],
                        item_id=doc["item_id"],
                        rater_id=doc["rater_id"],
                        label=doc["label"],
                        ts=doc["ts"],
                    )
                )
            except (KeyError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: bad label record: {exc}") from None
    return records


def write_label_log(path: str | Path, records: Iterable[LabelRecord]) -> None:
    text = "".join(format_label_record(r) + "\n" for r in records)
    Path(path).write_text(text, encoding="utf-8")


def load_pool(path: str | Path) -> Pool:
    return Pool.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def save_pool(path: str | Path, pool: Pool) -> None:
    Path(path).write_text(
        json.dumps(pool.to_dict(), indent=2) + "\n", encoding="utf-8"
    )
