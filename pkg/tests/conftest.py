"""Shared test helpers: fixture paths, random-corpus builders, and the
acceptance-criterion result board printed in the terminal summary."""

from __future__ import annotations

import random
from pathlib import Path

import pytest

from pooleval.corpus import IRRELEVANT, RELEVANT, JudgmentSet, RankedRun, RunEntry

FIXTURES = Path(__file__).parent / "fixtures"

_ACCEPTANCE_RESULTS: list[tuple[str, bool]] = []


def record_criterion(name: str, passed: bool) -> None:
    _ACCEPTANCE_RESULTS.append((name, passed))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed in _ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}: {name}")


def make_run(system: str, lists: dict[str, list[str]], start_score: float = 1.0) -> RankedRun:
    """Build a RankedRun from plain ranked item lists (descending scores)."""
    entries = {}
    for qid, items in lists.items():
        entries[qid] = tuple(
            RunEntry(item, start_score - 0.001 * r, r)
            for r, item in enumerate(items, start=1)
        )
    return RankedRun(system=system, entries=entries)


def make_judgments(
    positives: dict[str, set[str]],
    negatives: dict[str, set[str]] | None = None,
    source: str = "original",
    tag: str = "test",
) -> JudgmentSet:
    labels = {}
    sources = {}
    for qid, items in positives.items():
        for iid in items:
            labels[(qid, iid)] = RELEVANT
            sources[(qid, iid)] = source
    for qid, items in (negatives or {}).items():
        for iid in items:
            labels[(qid, iid)] = IRRELEVANT
            sources[(qid, iid)] = source
    return JudgmentSet(labels=labels, sources=sources, tag=tag)


def random_corpus(rng: random.Random, max_queries: int = 20, max_items: int = 50):
    """A random run plus random binary judgments over a small collection.

    Returns (run_lists, relevant_sets, judgments, run). Run lists are random
    truncated permutations, so judged positives can be missing from them; a
    query may have zero positives or no labels at all.
    """
    n_q = rng.randint(1, max_queries)
    n_i = rng.randint(2, max_items)
    items = [f"i{j:02d}" for j in range(n_i)]
    run_lists: dict[str, list[str]] = {}
    positives: dict[str, set[str]] = {}
    negatives: dict[str, set[str]] = {}
    for qi in range(n_q):
        qid = f"q{qi:02d}"
        perm = items[:]
        rng.shuffle(perm)
        run_lists[qid] = perm[: rng.randint(1, n_i)]
        pos, neg = set(), set()
        for item in items:
            u = rng.random()
            if u < 0.25:
                pos.add(item)
            elif u < 0.60:
                neg.add(item)
        positives[qid] = pos
        negatives[qid] = neg
    judgments = make_judgments(positives, negatives)
    run = make_run("fuzz", run_lists)
    relevant = {q: positives[q] for q in positives}
    return run_lists, relevant, judgments, run


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES
