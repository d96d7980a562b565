import random

import pytest

from pooleval.corpus import ValidationWarning
from pooleval.metrics import (
    EvaluationError,
    NoKnownPositiveError,
    PositiveMissingWarning,
    average_precision,
    correct_at_k,
    delta_report,
    evaluate,
    first_positive_rank,
    format_percent,
    recall_at_k,
)

from conftest import make_judgments, make_run, random_corpus


# ---------------------------------------------------------------------------
# Independent brute-force oracle. Kept deliberately naive; the acceptance
# suite reuses it over a thousand random corpora.
# ---------------------------------------------------------------------------

def oracle_query_metrics(run_list, relevant, ks):
    correct = {
        k: (1 if any(item in relevant for item in run_list[:k]) else 0) for k in ks
    }
    recall = {
        k: len([item for item in run_list[:k] if item in relevant]) / len(relevant)
        for k in ks
    }
    precisions = []
    hits = 0
    for idx, item in enumerate(run_list, start=1):
        if item in relevant:
            hits += 1
            precisions.append(hits / idx)
    ap = sum(precisions) / len(relevant)
    rank = None
    for idx, item in enumerate(run_list, start=1):
        if item in relevant:
            rank = idx
            break
    return correct, recall, ap, rank


def oracle_aggregates(run_lists, relevant_sets, ks):
    per = {}
    for qid in sorted(run_lists):
        rel = relevant_sets.get(qid) or set()
        if not rel:
            continue
        per[qid] = oracle_query_metrics(run_lists[qid], rel, ks)
    qids = sorted(per)
    n = len(qids)
    agg_correct = {k: sum(per[q][0][k] for q in qids) / n for k in ks}
    agg_recall = {k: sum(per[q][1][k] for q in qids) / n for k in ks}
    agg_ap = sum(per[q][2] for q in qids) / n
    return per, agg_correct, agg_recall, agg_ap


class TestCorrectAtK:
    def test_positive_at_rank_two(self):
        js = make_judgments({"q": {"v1"}})
        assert correct_at_k(["v2", "v1", "v3"], js, "q", 1) == 0
        assert correct_at_k(["v2", "v1", "v3"], js, "q", 2) == 1

    @pytest.mark.parametrize("k", [1, 2, 5, 100])
    def test_positive_at_rank_one(self, k):
        js = make_judgments({"q": {"v1"}})
        assert correct_at_k(["v1", "v2"], js, "q", k) == 1

    def test_no_known_positive(self):
        js = make_judgments({}, negatives={"q": {"v1"}})
        with pytest.raises(NoKnownPositiveError):
            correct_at_k(["v1"], js, "q", 1)

    def test_k_validation(self):
        js = make_judgments({"q": {"v1"}})
        with pytest.raises(ValueError):
            correct_at_k(["v1"], js, "q", 0)


class TestRecallAtK:
    def test_half_found(self):
        js = make_judgments({"q": {"a", "c"}})
        assert recall_at_k(["a", "b", "c", "d"], js, "q", 2) == 0.5

    def test_all_found(self):
        js = make_judgments({"q": {"a", "c"}})
        assert recall_at_k(["a", "c", "b", "d"], js, "q", 2) == 1.0

    def test_denominator_counts_unranked_positives(self):
        js = make_judgments({"q": {"a", "z"}})  # z never retrieved
        assert recall_at_k(["a", "b"], js, "q", 2) == 0.5


class TestAveragePrecision:
    def test_two_positives(self):
        js = make_judgments({"q": {"a", "c"}})
        expected = (1 / 1 + 2 / 3) / 2  # from exhaustive prefix precisions
        assert average_precision(["a", "b", "c", "d"], js, "q") == expected

    def test_three_positives_shifted(self):
        js = make_judgments({"q": {"a", "c", "d"}})
        expected = (1 / 2 + 2 / 3 + 3 / 4) / 3
        assert average_precision(["b", "a", "c", "d"], js, "q") == expected

    def test_perfect_ranking(self):
        js = make_judgments({"q": {"a", "b"}})
        assert average_precision(["a", "b", "c"], js, "q") == 1.0

    def test_missing_positive_warns_and_stays_in_denominator(self):
        js = make_judgments({"q": {"a", "z"}})
        with pytest.warns(PositiveMissingWarning):
            ap = average_precision(["a", "b"], js, "q")
        assert ap == (1 / 1) / 2


class TestFirstPositiveRank:
    def test_rank_two(self):
        js = make_judgments({"q": {"p"}})
        assert first_positive_rank(["n", "p", "x"], js, "q") == 2

    def test_absent_is_none(self):
        js = make_judgments({"q": {"zz"}})
        assert first_positive_rank(["a", "b"], js, "q") is None
        assert first_positive_rank(["a"], make_judgments({}), "q") is None

    def test_adding_positives_never_increases_rank(self):
        rng = random.Random(7)
        for _ in range(300):
            n = rng.randint(1, 12)
            items = [f"i{j}" for j in range(n)]
            lst = items[:]
            rng.shuffle(lst)
            base = {i for i in items if rng.random() < 0.3}
            extra = base | {i for i in items if rng.random() < 0.3}
            r1 = first_positive_rank(lst, make_judgments({"q": base}), "q")
            r2 = first_positive_rank(lst, make_judgments({"q": extra}), "q")
            if r1 is not None:
                assert r2 is not None and r2 <= r1


class TestEvaluate:
    def test_mean_of_two_queries(self):
        run = make_run("s", {"q1": ["a", "b"], "q2": ["b", "a"]})
        js = make_judgments({"q1": {"a"}, "q2": {"a"}})
        report = evaluate(run, js, ks=(1,))
        assert report.aggregate.correct_at[1] == 0.5

    def test_no_overlap_raises(self):
        run = make_run("s", {"q1": ["a"]})
        js = make_judgments({"q9": {"a"}})
        with pytest.raises(EvaluationError):
            evaluate(run, js, ks=(1,))

    def test_no_positive_queries_listed_and_excluded(self):
        run = make_run("s", {"q1": ["a"], "q2": ["a"]})
        js = make_judgments({"q1": {"a"}}, negatives={"q2": {"a"}})
        report = evaluate(run, js, ks=(1,))
        assert report.no_positive_queries == ("q2",)
        assert report.aggregate.n_evaluated == 1
        assert report.aggregate.correct_at[1] == 1.0

    def test_zero_policy_scores_zero(self):
        run = make_run("s", {"q1": ["a"], "q2": ["a"]})
        js = make_judgments({"q1": {"a"}}, negatives={"q2": {"a"}})
        report = evaluate(run, js, ks=(1,), no_positive_policy="zero")
        assert report.aggregate.n_evaluated == 2
        assert report.aggregate.correct_at[1] == 0.5

    def test_median_and_mean_rank(self):
        run = make_run("s", {"q1": ["a", "b"], "q2": ["b", "a"], "q3": ["b", "c", "a"]})
        js = make_judgments({"q1": {"a"}, "q2": {"a"}, "q3": {"a"}})
        agg = evaluate(run, js, ks=(1,)).aggregate
        assert agg.mean_first_pos_rank == (1 + 2 + 3) / 3
        assert agg.median_first_pos_rank == 2.0
        assert agg.n_ranked == 3

    def test_matches_oracle_on_random_corpora(self):
        for seed in range(100):
            rng = random.Random(seed)
            run_lists, relevant, js, run = random_corpus(rng)
            if not any(relevant.values()):
                continue
            ks = (1, 5, 10, 50)
            report = evaluate(run, js, ks=ks)
            per, agg_c, agg_r, agg_ap = oracle_aggregates(run_lists, relevant, ks)
            assert set(report.per_query) == set(per)
            for qid, (oc, orx, oap, orank) in per.items():
                qm = report.per_query[qid]
                assert dict(qm.correct_at) == oc
                assert dict(qm.recall_at) == orx
                assert qm.avg_prec == oap
                assert qm.first_pos_rank == orank
            assert dict(report.aggregate.correct_at) == agg_c
            assert dict(report.aggregate.recall_at) == agg_r
            assert report.aggregate.avg_prec == agg_ap

    def test_bounds_and_k_monotonicity(self):
        rng = random.Random(11)
        for _ in range(60):
            run_lists, relevant, js, run = random_corpus(rng, max_queries=8, max_items=15)
            if not any(relevant.values()):
                continue
            ks = (1, 2, 3, 5, 8, 15)
            report = evaluate(run, js, ks=ks)
            for qid, qm in report.per_query.items():
                assert 0.0 <= qm.avg_prec <= 1.0
                series = [qm.correct_at[k] for k in ks]
                assert series == sorted(series)
                # with the full collection ranked, any positive in the list
                # forces correct at the largest cutoff
                in_list = any(i in relevant[qid] for i in run_lists[qid])
                assert qm.correct_at[15] == (1 if in_list else 0)

    def test_single_positive_reduction_to_correct(self):
        rng = random.Random(23)
        for _ in range(60):
            n = rng.randint(2, 20)
            items = [f"i{j}" for j in range(n)]
            lst = items[:]
            rng.shuffle(lst)
            js = make_judgments({"q": {rng.choice(items)}})
            for k in range(1, n + 1):
                assert recall_at_k(lst, js, "q", k) == correct_at_k(lst, js, "q", k)

    def test_judgment_enlargement_monotonicity(self):
        rng = random.Random(31)
        for _ in range(100):
            run_lists, relevant, js, run = random_corpus(rng, max_queries=6, max_items=12)
            bigger = {
                q: rel | {i for i in run_lists[q] if rng.random() < 0.3}
                for q, rel in relevant.items()
            }
            js_big = make_judgments(bigger)
            ks = (1, 3, 6)
            for qid in run_lists:
                if not relevant.get(qid):
                    continue
                for k in ks:
                    small = correct_at_k(run_lists[qid], js, qid, k)
                    big = correct_at_k(run_lists[qid], js_big, qid, k)
                    assert big >= small


class TestDeltaReport:
    def test_identical_sets_zero_deltas(self):
        run = make_run("s", {"q1": ["a", "b"]})
        js = make_judgments({"q1": {"a"}})
        report = delta_report(run, js, js, ks=(1, 2))
        for e in report.entries:
            if e.delta is not None:
                assert e.delta == 0.0

    def test_added_positive_at_rank_one_for_half_the_queries(self):
        # corrected adds a rank-1 positive for q2, q4 out of four queries
        lists = {f"q{i}": [f"top{i}", f"orig{i}"] for i in range(1, 5)}
        run = make_run("s", lists)
        original = make_judgments({f"q{i}": {f"orig{i}"} for i in range(1, 5)}, tag="orig")
        corrected_pos = {f"q{i}": {f"orig{i}"} for i in range(1, 5)}
        corrected_pos["q2"].add("top2")
        corrected_pos["q4"].add("top4")
        corrected = make_judgments(corrected_pos, tag="extra")
        report = delta_report(run, original, corrected, ks=(1,))
        entry = next(e for e in report.entries if e.metric == "correct_at" and e.k == 1)
        assert entry.original == 0.0
        assert entry.corrected == 0.5
        assert entry.delta == 0.5

    def test_a_equals_b_plus_c(self):
        import warnings as _warnings

        rng = random.Random(5)
        for _ in range(50):
            run_lists, relevant, js, run = random_corpus(rng, max_queries=8, max_items=12)
            if not any(relevant.values()):
                continue
            bigger = {
                q: rel | {i for i in run_lists[q] if rng.random() < 0.25}
                for q, rel in relevant.items()
            }
            # random corrected sets drop the original negatives, so the
            # superset warning fires by design; silence it here
            corrected = make_judgments(bigger, tag="big")
            with _warnings.catch_warnings():
                _warnings.simplefilter("ignore", ValidationWarning)
                report = delta_report(run, js, corrected, ks=(1, 3))
            for e in report.entries:
                if e.delta is not None:
                    # delta is the IEEE difference by definition; adding it
                    # back reconstructs the corrected value to <= 1 ulp
                    assert e.delta == e.corrected - e.original
                    assert abs((e.original + e.delta) - e.corrected) <= 2**-50

    def test_non_superset_warns(self):
        run = make_run("s", {"q1": ["a", "b"]})
        original = make_judgments({"q1": {"a", "b"}})
        corrected = make_judgments({"q1": {"a"}})
        with pytest.warns(ValidationWarning, match="superset"):
            delta_report(run, original, corrected, ks=(1,))

    def test_negative_ap_delta_flagged_not_forbidden(self):
        # truncated list: the added positive never appears, diluting AP
        run = make_run("s", {"q1": ["a", "b"]})
        original = make_judgments({"q1": {"a"}}, tag="orig")
        corrected = make_judgments({"q1": {"a", "zz"}}, tag="plus")
        with pytest.warns(ValidationWarning, match="average precision decreased"):
            report = delta_report(run, original, corrected, ks=(1,))
        assert report.ap_delta_negative
        entry = next(e for e in report.entries if e.metric == "avg_prec")
        assert entry.delta < 0

    def test_table_formatting(self):
        run = make_run("s", {"q1": ["a", "x"], "q2": ["b", "y"]})
        original = make_judgments({"q1": {"x"}, "q2": {"y"}}, tag="orig")
        corrected = make_judgments({"q1": {"a", "x"}, "q2": {"y"}}, tag="extra")
        table = delta_report(run, original, corrected, ks=(1,)).format_table()
        assert "C@1" in table and "(" in table and "%" in table


class TestFormatPercent:
    @pytest.mark.parametrize(
        "value,expected",
        [
            (0.674, "67.4"),
            (0.424, "42.4"),
            (0.25, "25.0"),
            (0.008, "0.800"),
            (0.023, "2.30"),
            (0.000374, "0.0374"),
            (1.0, "100"),
            (None, "na"),
        ],
    )
    def test_three_significant_figures(self, value, expected):
        assert format_percent(value) == expected
