"""Data model and file IO for ranked runs, relevance judgments, and queries.

All files are whitespace-delimited UTF-8 text with LF line endings; lines
starting with ``#`` are comments. Grammars:

    run file:      query_id item_id rank score run_tag
    judgment file: query_id item_id label source     (label is 0 or 1)
    query file:    query_id<TAB>split<TAB>caption text

Identifiers are opaque non-empty tokens without internal whitespace, which
makes the space-delimited grammars unambiguous. Parsed values are immutable
after construction and safe to share across threads.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

Pair = tuple[str, str]

RELEVANT = "relevant"
IRRELEVANT = "irrelevant"

SOURCE_ORIGINAL = "original"
SOURCE_MERGED = "merged"
SOURCE_POOLED_PREFIX = "pooled"

POLICY_RELEVANT_WINS = "relevant-wins"
POLICY_ERROR_ON_CONFLICT = "error-on-conflict"


class CorpusError(ValueError):
    """Base class for data-model violations."""


class ParseError(CorpusError):
    """A file line could not be interpreted under its grammar."""

    def __init__(self, path: str | Path, lineno: int, message: str):
        super().__init__(f"{path}:{lineno}: {message}")
        self.path = str(path)
        self.lineno = lineno


class DuplicateEntryError(ParseError):
    """The same (query, item) pair occurred twice where it must be unique."""


class ConflictingLabelError(ParseError):
    """One file labels the same pair both relevant and irrelevant."""


class RankGapError(ParseError):
    """Ranks within a query are not contiguous 1..n (strict mode only)."""


class MergeConflictError(CorpusError):
    """Two judgment sets disagree under the error-on-conflict policy."""


class ValidationWarning(UserWarning):
    """Non-fatal data oddity (score order violations, short lists, ...)."""


def _check_id(token: str, what: str) -> str:
    if not token or token.split() != [token]:
        raise CorpusError(f"{what} must be a non-empty token without whitespace: {token!r}")
    return token


@dataclass(frozen=True)
class Query:
    """A caption used as a search query, tagged with its dataset split."""

    id: str
    text: str
    split: str

    def __post_init__(self):
        _check_id(self.id, "query id")
        if self.split not in ("train", "test"):
            raise CorpusError(f"query {self.id}: split must be train or test, got {self.split!r}")

    @property
    def word_length(self) -> int:
        return len(self.text.split())

    @property
    def char_length(self) -> int:
        return len(self.text)


@dataclass(frozen=True)
class RunEntry:
    item_id: str
    score: float
    rank: int


@dataclass(frozen=True)
class RankedRun:
    """Per-query ranked item lists produced by one retrieval system."""

    system: str
    entries: Mapping[str, tuple[RunEntry, ...]]

    def ranking(self, query_id: str) -> list[str]:
        """Item ids for one query in rank order (empty if the query is absent)."""
        return [e.item_id for e in self.entries.get(query_id, ())]

    def queries(self) -> set[str]:
        return set(self.entries)

    def items(self) -> set[str]:
        return {e.item_id for es in self.entries.values() for e in es}

    @property
    def n_entries(self) -> int:
        return sum(len(es) for es in self.entries.values())


@dataclass(frozen=True)
class JudgmentSet:
    """Resolved binary relevance labels with per-pair provenance.

    Pairs absent from ``labels`` are *unjudged*, which is distinct from
    irrelevant. ``sources`` carries one provenance tag per labeled pair
    ("original", "pooled:<sys>+<sys>", or "merged").
    """

    labels: Mapping[Pair, str]
    sources: Mapping[Pair, str]
    tag: str = ""
    _positives: dict[str, frozenset[str]] = field(
        init=False, repr=False, compare=False, default_factory=dict
    )

    def __post_init__(self):
        by_query: dict[str, set[str]] = {}
        for (qid, iid), label in self.labels.items():
            if label not in (RELEVANT, IRRELEVANT):
                raise CorpusError(f"bad label {label!r} for pair ({qid}, {iid})")
            if label == RELEVANT:
                by_query.setdefault(qid, set()).add(iid)
        object.__setattr__(
            self, "_positives", {q: frozenset(s) for q, s in by_query.items()}
        )

    def relevant_items(self, query_id: str) -> frozenset[str]:
        return self._positives.get(query_id, frozenset())

    def is_relevant(self, query_id: str, item_id: str) -> bool:
        return self.labels.get((query_id, item_id)) == RELEVANT

    def queries(self) -> set[str]:
        return {qid for qid, _ in self.labels}

    @property
    def n_relevant(self) -> int:
        return sum(len(s) for s in self._positives.values())

    def __len__(self) -> int:
        return len(self.labels)


@dataclass(frozen=True)
class Collection:
    """The item universe plus the query set shared by runs and judgments."""

    items: frozenset[str]
    queries: Mapping[str, Query]

    @classmethod
    def gather(
        cls,
        queries: Mapping[str, Query],
        runs: Iterable[RankedRun] = (),
        judgments: Iterable[JudgmentSet] = (),
    ) -> "Collection":
        """Build a collection whose items are everything the inputs reference."""
        items: set[str] = set()
        for run in runs:
            items |= run.items()
        for js in judgments:
            items |= {iid for _, iid in js.labels}
        return cls(items=frozenset(items), queries=dict(queries))

    def check_run(self, run: RankedRun, strict: bool = True) -> None:
        unknown = run.items() - self.items
        self._report_unknown(unknown, f"run {run.system}", strict)

    def check_judgments(self, judgments: JudgmentSet, strict: bool = True) -> None:
        unknown = {iid for _, iid in judgments.labels} - self.items
        self._report_unknown(unknown, f"judgments {judgments.tag}", strict)

    def _report_unknown(self, unknown: set[str], what: str, strict: bool) -> None:
        if not unknown:
            return
        msg = f"{what} references {len(unknown)} item(s) outside the collection"
        if strict:
            raise CorpusError(msg)
        warnings.warn(msg, ValidationWarning)


def _data_lines(path: Path):
    with path.open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            yield lineno, line


def parse_run(path: str | Path, strict: bool = True) -> RankedRun:
    """Parse a run file into a validated :class:`RankedRun`.

    Duplicate (query, item) pairs always abort. Non-contiguous ranks abort in
    strict mode and warn otherwise; the parser keeps the file's own ordering
    and never re-sorts by score. Score increases along ranks only warn.
    """
    path = Path(path)
    system: str | None = None
    per_query: dict[str, list[RunEntry]] = {}
    seen: set[Pair] = set()
    for lineno, line in _data_lines(path):
        parts = line.split()
        if len(parts) != 5:
            raise ParseError(path, lineno, f"expected 5 fields, got {len(parts)}")
        qid, iid, rank_s, score_s, tag = parts
        try:
            rank = int(rank_s)
        except ValueError:
            raise ParseError(path, lineno, f"rank is not an integer: {rank_s!r}") from None
        if rank < 1:
            raise ParseError(path, lineno, f"rank must be >= 1, got {rank}")
        try:
            score = float(score_s)
        except ValueError:
            raise ParseError(path, lineno, f"score is not a number: {score_s!r}") from None
        if system is None:
            system = tag
        elif tag != system:
            raise ParseError(path, lineno, f"run tag changed from {system!r} to {tag!r}")
        if (qid, iid) in seen:
            raise DuplicateEntryError(path, lineno, f"duplicate entry for ({qid}, {iid})")
        seen.add((qid, iid))
        per_query.setdefault(qid, []).append(RunEntry(iid, score, rank))
    if system is None:
        raise ParseError(path, 0, "run file contains no entries")

    entries: dict[str, tuple[RunEntry, ...]] = {}
    for qid, lst in per_query.items():
        lst.sort(key=lambda e: e.rank)
        if [e.rank for e in lst] != list(range(1, len(lst) + 1)):
            msg = f"query {qid}: ranks are not contiguous 1..{len(lst)}"
            if strict:
                raise RankGapError(path, 0, msg)
            warnings.warn(f"{path}: {msg}", ValidationWarning)
        for prev, cur in zip(lst, lst[1:]):
            if cur.score > prev.score:
                warnings.warn(
                    f"{path}: query {qid}: score increases from rank {prev.rank} to {cur.rank}",
                    ValidationWarning,
                )
                break
        entries[qid] = tuple(lst)
    return RankedRun(system=system, entries=entries)


def parse_judgments(path: str | Path, tag: str | None = None) -> JudgmentSet:
    """Parse a judgment file. Conflicting labels for one pair abort;
    repeated identical lines are tolerated (first occurrence wins)."""
    path = Path(path)
    labels: dict[Pair, str] = {}
    sources: dict[Pair, str] = {}
    for lineno, line in _data_lines(path):
        parts = line.split()
        if len(parts) != 4:
            raise ParseError(path, lineno, f"expected 4 fields, got {len(parts)}")
        qid, iid, label_s, source = parts
        if label_s not in ("0", "1"):
            raise ParseError(path, lineno, f"label must be 0 or 1, got {label_s!r}")
        label = RELEVANT if label_s == "1" else IRRELEVANT
        pair = (qid, iid)
        if pair in labels:
            if labels[pair] != label:
                raise ConflictingLabelError(
                    path, lineno, f"pair ({qid}, {iid}) labeled both relevant and irrelevant"
                )
            continue
        labels[pair] = label
        sources[pair] = source
    return JudgmentSet(labels=labels, sources=sources, tag=tag or path.stem)


def parse_queries(path: str | Path) -> dict[str, Query]:
    """Parse a tab-separated query file into an id-keyed mapping.

    The caption field may be empty; such queries are excluded from length
    analyses downstream.
    """
    path = Path(path)
    queries: dict[str, Query] = {}
    for lineno, line in _data_lines(path):
        parts = line.split("\t", 2)
        if len(parts) < 2:
            raise ParseError(path, lineno, "expected query_id<TAB>split<TAB>caption")
        qid, split = parts[0], parts[1]
        text = parts[2] if len(parts) == 3 else ""
        if qid in queries:
            raise DuplicateEntryError(path, lineno, f"duplicate query id {qid}")
        try:
            queries[qid] = Query(id=qid, text=text, split=split)
        except CorpusError as exc:
            raise ParseError(path, lineno, str(exc)) from None
    return queries


def serialize_run(run: RankedRun) -> str:
    """Canonical run-file text: sorted by query then rank, shortest float repr."""
    lines = []
    for qid in sorted(run.entries):
        for e in run.entries[qid]:
            lines.append(f"{qid} {e.item_id} {e.rank} {e.score!r} {run.system}")
    return "\n".join(lines) + "\n"


def serialize_judgments(judgments: JudgmentSet) -> str:
    lines = []
    for pair in sorted(judgments.labels):
        qid, iid = pair
        bit = "1" if judgments.labels[pair] == RELEVANT else "0"
        lines.append(f"{qid} {iid} {bit} {judgments.sources[pair]}")
    return "\n".join(lines) + "\n"


def serialize_queries(queries: Mapping[str, Query]) -> str:
    lines = [f"{q.id}\t{q.split}\t{q.text}" for q in (queries[k] for k in sorted(queries))]
    return "\n".join(lines) + "\n"


def write_run(path: str | Path, run: RankedRun) -> None:
    Path(path).write_text(serialize_run(run), encoding="utf-8")


def write_judgments(path: str | Path, judgments: JudgmentSet) -> None:
    Path(path).write_text(serialize_judgments(judgments), encoding="utf-8")


def write_queries(path: str | Path, queries: Mapping[str, Query]) -> None:
    Path(path).write_text(serialize_queries(queries), encoding="utf-8")


def merge_judgments(
    a: JudgmentSet, b: JudgmentSet, policy: str = POLICY_RELEVANT_WINS
) -> JudgmentSet:
    """Union two judgment sets.

    Under relevant-wins a pair labeled relevant in either input comes out
    relevant; under error-on-conflict a disagreement raises
    :class:`MergeConflictError`. Pairs present in both inputs get source
    "merged"; single-origin pairs keep their provenance so that ablation and
    rank-histogram analyses can still attribute labels.
    """
    if policy not in (POLICY_RELEVANT_WINS, POLICY_ERROR_ON_CONFLICT):
        raise ValueError(f"unknown merge policy {policy!r}")
    labels = dict(a.labels)
    sources = dict(a.sources)
    for pair, label_b in b.labels.items():
        if pair not in labels:
            labels[pair] = label_b
            sources[pair] = b.sources[pair]
            continue
        label_a = labels[pair]
        if label_a != label_b and policy == POLICY_ERROR_ON_CONFLICT:
            raise MergeConflictError(
                f"pair {pair} labeled {label_a} in {a.tag!r} but {label_b} in {b.tag!r}"
            )
        labels[pair] = RELEVANT if RELEVANT in (label_a, label_b) else IRRELEVANT
        sources[pair] = SOURCE_MERGED
    tag = "+".join(t for t in (a.tag, b.tag) if t)
    return JudgmentSet(labels=labels, sources=sources, tag=tag)
