import json
import random

import pytest

from pooleval.corpus import RELEVANT, ValidationWarning, parse_run
from pooleval.pooling import (
    ESCALATED,
    LabelRecord,
    Pool,
    assignment_plan,
    build_pool,
    export_pool_run,
    load_pool,
    make_job,
    read_label_log,
    resolve_labels,
    save_pool,
    write_label_log,
)

from conftest import FIXTURES, make_judgments, make_run


def rec(q, v, rater, label, ts="2024-01-01T00:00:00Z"):
    return LabelRecord(query_id=q, item_id=v, rater_id=rater, label=label, ts=ts)


def random_lists(rng, n_queries, n_items, length):
    items = [f"v{j:03d}" for j in range(n_items)]
    out = {}
    for qi in range(n_queries):
        pool = items[:]
        rng.shuffle(pool)
        out[f"q{qi:03d}"] = pool[:length]
    return out


class TestBuildPool:
    def test_one_run_two_queries_depth_ten(self):
        rng = random.Random(0)
        run = make_run("s", random_lists(rng, 2, 30, 15))
        pool = build_pool([run], depth=10)
        assert len(pool) == 20
        assert pool.excluded == 0
        assert pool.contributing_systems == ("s",)

    def test_identical_runs_dedupe(self):
        rng = random.Random(1)
        lists = random_lists(rng, 3, 30, 12)
        a = make_run("a", lists)
        b = make_run("b", lists)
        single = build_pool([a], depth=10)
        double = build_pool([a, b], depth=10)
        assert len(double) == len(single)
        assert set(double.pairs) == set(single.pairs)

    def test_matches_naive_union_and_contributors(self):
        for seed in range(30):
            rng = random.Random(seed)
            runs = [
                make_run(sys, random_lists(rng, rng.randint(1, 6), 25, rng.randint(5, 20)))
                for sys in ("a", "b", "c")
            ]
            depth = rng.randint(1, 12)
            seed_js = make_judgments(
                {q: {f"v{j:03d}" for j in rng.sample(range(25), 3)} for q in runs[0].entries}
            )
            with pytest.warns(ValidationWarning) if _runs_miss_queries(runs, seed_js) else _nullcontext():
                pool = build_pool(runs, seed_js, depth)
            expected = {}
            for run in runs:
                for qid in run.entries:
                    for item in run.ranking(qid)[:depth]:
                        expected.setdefault((qid, item), set()).add(run.system)
            kept = {p for p in expected if p not in seed_js.labels}
            assert set(pool.pairs) == kept
            assert pool.excluded == len(expected) - len(kept)
            for pair in pool.pairs:
                assert set(pool.contributors[pair]) == expected[pair]
            assert list(pool.pairs) == sorted(pool.pairs)

    def test_monotone_in_depth_and_disjoint_from_seed(self):
        rng = random.Random(9)
        runs = [make_run(s, random_lists(rng, 4, 30, 20)) for s in ("x", "y")]
        seed_js = make_judgments({"q000": {"v001", "v002"}})
        smaller = build_pool(runs, seed_js, depth=5)
        larger = build_pool(runs, seed_js, depth=9)
        assert set(smaller.pairs) <= set(larger.pairs)
        assert not set(larger.pairs) & set(seed_js.labels)
        unseeded = build_pool(runs, None, depth=5)
        assert set(smaller.pairs) <= set(unseeded.pairs)

    def test_validation(self):
        run = make_run("s", {"q": ["a"]})
        with pytest.raises(ValueError):
            build_pool([], depth=10)
        with pytest.raises(ValueError):
            build_pool([run], depth=0)

    def test_missing_seed_queries_warn(self):
        run = make_run("s", {"q1": ["a", "b"]})
        seed_js = make_judgments({"q1": {"z"}, "q2": {"z"}})
        with pytest.warns(ValidationWarning, match="missing"):
            build_pool([run], seed_js, depth=2)

    def test_export_and_json_round_trip(self, tmp_path):
        rng = random.Random(3)
        run = make_run("s", random_lists(rng, 3, 20, 12))
        pool = build_pool([run], depth=10)

        run_text = export_pool_run(pool)
        path = tmp_path / "pool.run"
        path.write_text(run_text, encoding="utf-8")
        reparsed = parse_run(path)
        assert reparsed.system == "POOL"
        assert {(q, i) for q in reparsed.entries for i in reparsed.ranking(q)} == set(pool.pairs)

        save_pool(tmp_path / "pool.json", pool)
        assert load_pool(tmp_path / "pool.json") == pool


def _runs_miss_queries(runs, seed_js):
    seed_queries = seed_js.queries()
    return any(seed_queries - r.queries() for r in runs)


class _nullcontext:
    def __enter__(self):
        return None

    def __exit__(self, *exc):
        return False


class TestAssignmentPlan:
    def _pool(self, n):
        pairs = tuple((f"q{i:05d}", "v1") for i in range(n))
        return Pool(
            depth=10,
            pairs=pairs,
            contributors={p: ("s",) for p in pairs},
            contributing_systems=("s",),
            excluded=0,
        )

    def test_fraction_zero(self):
        jobs = assignment_plan(self._pool(25), 0.0, rng_seed=1)
        assert len(jobs) == 25
        assert all(j.pass_no == 1 for j in jobs)

    def test_fraction_one(self):
        jobs = assignment_plan(self._pool(25), 1.0, rng_seed=1)
        assert len(jobs) == 50
        assert sum(j.pass_no == 2 for j in jobs) == 25

    def test_ten_percent_of_ten_thousand_is_exact(self):
        jobs = assignment_plan(self._pool(10_000), 0.1, rng_seed=42)
        assert len(jobs) == 11_000
        assert sum(j.pass_no == 2 for j in jobs) == 1_000

    def test_deterministic_for_seed(self):
        pool = self._pool(200)
        assert assignment_plan(pool, 0.3, 7) == assignment_plan(pool, 0.3, 7)
        other = assignment_plan(pool, 0.3, 8)
        assert {j.pair for j in other if j.pass_no == 2} != {
            j.pair for j in assignment_plan(pool, 0.3, 7) if j.pass_no == 2
        }

    def test_fraction_bounds(self):
        with pytest.raises(ValueError):
            assignment_plan(self._pool(5), -0.1, 0)
        with pytest.raises(ValueError):
            assignment_plan(self._pool(5), 1.5, 0)


class TestResolveLabels:
    def test_single_label_resolves(self):
        result = resolve_labels([rec("q", "v", "r1", RELEVANT)])
        assert result.judgments.is_relevant("q", "v")
        assert result.outcomes[0].status == "resolved"
        assert result.outcomes[0].labels_used == 1
        assert result.pending == ()

    def test_two_disagreeing_request_third(self):
        result = resolve_labels(
            [rec("q", "v", "r1", "relevant"), rec("q", "v", "r2", "irrelevant")]
        )
        assert result.outcomes[0].status == "unresolved"
        assert len(result.pending) == 1
        assert result.pending[0].pass_no == 3
        assert ("q", "v") not in result.judgments.labels

    def test_majority_of_three(self):
        result = resolve_labels(
            [
                rec("q", "v", "r1", "relevant"),
                rec("q", "v", "r2", "irrelevant"),
                rec("q", "v", "r3", "relevant"),
            ]
        )
        assert result.judgments.is_relevant("q", "v")
        assert result.outcomes[0].labels_used == 3

    def test_escalations_excluded_from_majority(self):
        result = resolve_labels(
            [rec("q", "v", "r1", RELEVANT), rec("q", "v", "r2", ESCALATED)]
        )
        out = result.outcomes[0]
        assert out.status == "resolved" and out.label == RELEVANT and out.labels_used == 1

    def test_escalated_only_pair(self):
        result = resolve_labels([rec("q", "v", "r1", ESCALATED)])
        assert result.outcomes[0].status == "escalated"
        assert ("q", "v") not in result.judgments.labels
        assert result.pending == ()

    def test_more_than_three_labels_majority_with_warning(self):
        records = [rec("q", "v", f"r{i}", "relevant") for i in range(3)]
        records.append(rec("q", "v", "r9", "irrelevant"))
        with pytest.warns(ValidationWarning, match="more than three"):
            result = resolve_labels(records)
        assert result.judgments.is_relevant("q", "v")

    def test_even_tie_of_four_unresolved_without_new_job(self):
        records = [
            rec("q", "v", "r1", "relevant"),
            rec("q", "v", "r2", "relevant"),
            rec("q", "v", "r3", "irrelevant"),
            rec("q", "v", "r4", "irrelevant"),
        ]
        with pytest.warns(ValidationWarning):
            result = resolve_labels(records)
        assert result.outcomes[0].status == "unresolved"
        assert result.pending == ()

    def test_permutation_invariance(self):
        rng = random.Random(13)
        labels = ["relevant", "irrelevant", ESCALATED]
        for _ in range(40):
            records = []
            for p in range(rng.randint(1, 8)):
                for j in range(rng.randint(1, 4)):
                    records.append(
                        rec(f"q{p}", "v", f"r{j}", rng.choice(labels), ts=f"t{j}")
                    )
            import warnings as _w

            with _w.catch_warnings():
                _w.simplefilter("ignore", ValidationWarning)
                base = resolve_labels(records)
                shuffled = records[:]
                rng.shuffle(shuffled)
                again = resolve_labels(shuffled)
            assert base.judgments.labels == again.judgments.labels
            assert base.outcomes == again.outcomes
            assert base.pending == again.pending

    def test_resolved_labels_have_support_and_unresolved_stay_out(self):
        rng = random.Random(17)
        for _ in range(40):
            records = []
            for p in range(rng.randint(1, 10)):
                for j in range(rng.randint(1, 3)):
                    records.append(
                        rec(f"q{p}", f"v{p}", f"r{j}", rng.choice(["relevant", "irrelevant"]))
                    )
            result = resolve_labels(records)
            recorded_pairs = {r.pair for r in records}
            for pair in result.judgments.labels:
                assert pair in recorded_pairs
            for out in result.outcomes:
                if out.status != "resolved":
                    assert out.pair not in result.judgments.labels

    def test_provenance_sources(self):
        provenance = {("q", "v"): ("alpha", "beta")}
        result = resolve_labels([rec("q", "v", "r1", RELEVANT)], provenance=provenance)
        assert result.judgments.sources[("q", "v")] == "pooled:alpha+beta"

    def test_provenance_missing_pair_warns_and_defaults(self):
        with pytest.warns(ValidationWarning, match="provenance"):
            result = resolve_labels([rec("q", "v", "r1", RELEVANT)], provenance={})
        assert result.judgments.sources[("q", "v")] == "pooled"

    def test_outcomes_csv_shape(self):
        result = resolve_labels([rec("q", "v", "r1", RELEVANT)])
        lines = result.outcomes_csv().strip().splitlines()
        assert lines[0] == "query_id,item_id,status,label,labels_used"
        assert lines[1] == "q,v,resolved,relevant,1"


class TestScriptedResolutionFixture:
    """The committed 100-pair log with a hand-computed outcome breakdown."""

    def test_counts_and_rate(self):
        records = read_label_log(FIXTURES / "resolution_labels.jsonl")
        result = resolve_labels(records)
        assert len(result.outcomes) == 100
        assert result.n_resolved == 92
        assert result.n_unresolved == 4
        assert result.n_escalated == 4
        assert result.resolution_rate == 0.92
        assert len(result.pending) == 4
        assert all(j.pass_no == 3 for j in result.pending)


class TestLabelLog:
    def test_round_trip(self, tmp_path):
        records = [
            rec("q1", "v1", "r1", "relevant", ts="2024-01-01T10:00:00Z"),
            rec("q1", "v2", "r2", ESCALATED, ts="2024-01-01T10:00:05Z"),
        ]
        path = tmp_path / "log.jsonl"
        write_label_log(path, records)
        assert read_label_log(path) == records
        doc = json.loads(path.read_text().splitlines()[0])
        assert doc["pair_id"] == "q1 v1"

    def test_bad_record_reports_line(self, tmp_path):
        path = tmp_path / "log.jsonl"
        path.write_text('{"query_id": "q"}\n', encoding="utf-8")
        with pytest.raises(ValueError, match=":1:"):
            read_label_log(path)

    def test_bad_label_value_rejected(self):
        with pytest.raises(ValueError):
            rec("q", "v", "r1", "maybe")
        with pytest.raises(ValueError):
            LabelRecord("q", "v", "", "relevant", "t")

    def test_job_ids(self):
        job = make_job("q1", "v7", 2)
        assert job.job_id == "q1 v7#p2"
        assert job.pair == ("q1", "v7")
