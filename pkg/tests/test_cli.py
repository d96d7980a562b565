import json
import shutil

import pytest

from pooleval.cli import run_cli

from conftest import FIXTURES


@pytest.fixture
def workdir(tmp_path):
    for name in (
        "alpha.run", "beta.run", "gamma.run", "original.qrels", "pooled.qrels",
        "queries.tsv", "resolution_labels.jsonl", "pool.json",
    ):
        shutil.copy(FIXTURES / name, tmp_path / name)
    return tmp_path


def run_in(workdir, *argv, expect=0, capsys=None):
    code = run_cli([str(a) for a in argv])
    assert code == expect, f"exit {code} != {expect} for {argv}"
    return code


class TestEvalCommand:
    def test_writes_reports(self, workdir, capsys):
        run_in(workdir, "eval", "--run", workdir / "alpha.run",
               "--qrels", workdir / "original.qrels", "--k", "1,5,10")
        out = capsys.readouterr().out
        assert "C@1" in out
        assert (workdir / "alpha.eval.csv").exists()
        doc = json.loads((workdir / "alpha.eval.json").read_text())
        assert doc["report"] == "eval"
        assert doc["n_evaluated"] == 40

    def test_per_query_and_merge(self, workdir):
        run_in(workdir, "eval", "--run", workdir / "alpha.run",
               "--qrels", workdir / "original.qrels",
               "--merge", workdir / "pooled.qrels", "--per-query")
        per_query = (workdir / "alpha.eval.per_query.csv").read_text().splitlines()
        assert len(per_query) == 41

    def test_json_stdout_format(self, workdir, capsys):
        run_in(workdir, "eval", "--run", workdir / "alpha.run",
               "--qrels", workdir / "original.qrels", "--format", "json")
        doc = json.loads(capsys.readouterr().out)
        assert doc["run"] == "alpha"

    def test_missing_file_exit_2(self, workdir, capsys):
        run_in(workdir, "eval", "--run", workdir / "nope.run",
               "--qrels", workdir / "original.qrels", expect=2)

    def test_bad_flag_exit_1(self, workdir):
        run_in(workdir, "eval", "--run", workdir / "alpha.run",
               "--qrels", workdir / "original.qrels", "--bogus", expect=1)

    def test_bad_k_exit_1(self, workdir):
        run_in(workdir, "eval", "--run", workdir / "alpha.run",
               "--qrels", workdir / "original.qrels", "--k", "0", expect=1)

    def test_malformed_run_exit_1(self, workdir):
        (workdir / "bad.run").write_text("only three fields\n", encoding="utf-8")
        run_in(workdir, "eval", "--run", workdir / "bad.run",
               "--qrels", workdir / "original.qrels", expect=1)

    def test_help_exit_0(self, workdir):
        run_in(workdir, "eval", "--help", expect=0)


class TestDeltaCommand:
    def test_table_lines(self, workdir, capsys):
        run_in(workdir, "delta", "--run", workdir / "alpha.run",
               "--original", workdir / "original.qrels",
               "--corrected", workdir / "pooled.qrels", "--k", "1,5,10")
        out = capsys.readouterr().out
        assert "C@1" in out and "+" in out and "%" in out
        doc = json.loads((workdir / "alpha.delta.json").read_text())
        entry = next(e for e in doc["entries"] if e["metric"] == "correct_at" and e["k"] == 1)
        assert entry["corrected"] == pytest.approx(entry["original"] + entry["delta"])


class TestPoolPlanResolve:
    def test_pipeline(self, workdir, capsys):
        run_in(workdir, "pool", "--runs", workdir / "alpha.run", workdir / "beta.run",
               workdir / "gamma.run", "--seed-qrels", workdir / "original.qrels",
               "--depth", "10", "--out", workdir / "mine")
        pool_doc = json.loads((workdir / "mine.pool.json").read_text())
        fixture_doc = json.loads((workdir / "pool.json").read_text())
        assert pool_doc == fixture_doc  # library pool matches the committed artifact

        run_in(workdir, "plan", "--pool", workdir / "mine.pool.json",
               "--fraction", "0.1", "--seed", "7")
        plan_lines = (workdir / "mine.pool.plan.jsonl").read_text().splitlines()
        n = len(fixture_doc["pairs"])
        assert len(plan_lines) == n + n // 10

        run_in(workdir, "resolve", "--labels", workdir / "resolution_labels.jsonl")
        out = capsys.readouterr().out
        assert "92 resolved" in out
        resolved = (workdir / "resolution_labels.resolved.qrels").read_text().splitlines()
        assert len(resolved) == 92
        pending = (workdir / "resolution_labels.pending.jsonl").read_text().splitlines()
        assert len(pending) == 4

    def test_resolve_with_pool_provenance(self, workdir):
        # labels over actual pool pairs, resolved with provenance sources
        pool_doc = json.loads((workdir / "pool.json").read_text())
        first = pool_doc["pairs"][0]
        log_line = json.dumps({
            "pair_id": f"{first['query_id']} {first['item_id']}",
            "query_id": first["query_id"], "item_id": first["item_id"],
            "rater_id": "r1", "label": "relevant", "ts": "2024-01-01T00:00:00Z",
        })
        (workdir / "one.jsonl").write_text(log_line + "\n", encoding="utf-8")
        run_in(workdir, "resolve", "--labels", workdir / "one.jsonl",
               "--pool", workdir / "pool.json")
        qrels = (workdir / "one.resolved.qrels").read_text()
        assert "pooled:" + "+".join(first["systems"]) in qrels


class TestAnalysisCommands:
    def test_agreement(self, workdir, capsys):
        run_in(workdir, "agreement", "--labels", workdir / "resolution_labels.jsonl")
        out = capsys.readouterr().out
        assert "krippendorff alpha" in out
        assert (workdir / "resolution_labels.agreement.json").exists()

    def test_overlap(self, workdir):
        run_in(workdir, "overlap", "--runs", workdir / "alpha.run", workdir / "beta.run",
               "--p", "0.9", "--depth", "10")
        doc = json.loads((workdir / "alpha.overlap.json").read_text())
        assert doc["pairs"][0]["system_a"] == "alpha"

    def test_ablate(self, workdir):
        run_in(workdir, "ablate", "--runs", workdir / "alpha.run", workdir / "beta.run",
               workdir / "gamma.run", "--original", workdir / "original.qrels",
               "--pooled", workdir / "pooled.qrels", "--target", "alpha",
               "--target", "beta", "--k", "1,5")
        doc = json.loads((workdir / "original.ablate.json").read_text())
        assert [t["target"] for t in doc["targets"]] == ["alpha", "beta"]
        csv_text = (workdir / "original.ablate.csv").read_text()
        assert csv_text.count("alpha,correct_at,1") == 1

    def test_dist_with_figures(self, workdir):
        run_in(workdir, "dist", "--runs", workdir / "alpha.run",
               "--qrels", workdir / "original.qrels", "--merge", workdir / "pooled.qrels",
               "--queries", workdir / "queries.tsv", "--figures")
        assert (workdir / "original.dist.csv").exists()
        assert (workdir / "original.positives_per_query.png").exists()
        assert (workdir / "original.joint_density.png").exists()

    def test_textsim(self, workdir):
        run_in(workdir, "textsim", "--queries", workdir / "queries.tsv",
               "--n", "4", "--top-k", "5")
        rows = (workdir / "queries.textsim.csv").read_text().splitlines()
        assert rows[0] == "query_id,mean_top_k_sim,word_len,char_len"
        assert len(rows) == 41
        doc = json.loads((workdir / "queries.textsim.json").read_text())
        assert doc["spearman_word"] < 0


class TestBootstrapCommand:
    def _scores(self, workdir):
        text = "\n".join(f"q{i} {float(i % 2)!r}" for i in range(100)) + "\n"
        (workdir / "scores.txt").write_text(text, encoding="utf-8")
        return workdir / "scores.txt"

    def test_reports_per_n(self, workdir, capsys):
        scores = self._scores(workdir)
        run_in(workdir, "bootstrap", "--scores", scores, "--n", "10,20",
               "--b", "300", "--seed", "7")
        out = capsys.readouterr().out
        assert "N=10" in out and "N=20" in out
        doc = json.loads((workdir / "scores.bootstrap.json").read_text())
        assert [r["sample_size"] for r in doc["results"]] == [10, 20]

    def test_byte_identical_reruns(self, workdir):
        scores = self._scores(workdir)
        run_in(workdir, "bootstrap", "--scores", scores, "--n", "15",
               "--b", "200", "--seed", "3", "--out", workdir / "a")
        run_in(workdir, "bootstrap", "--scores", scores, "--n", "15",
               "--b", "200", "--seed", "3", "--out", workdir / "b")
        assert (workdir / "a.bootstrap.json").read_bytes() == (workdir / "b.bootstrap.json").read_bytes()
        assert (workdir / "a.bootstrap.csv").read_bytes() == (workdir / "b.bootstrap.csv").read_bytes()

    def test_bad_scores_exit_1(self, workdir):
        (workdir / "bad.txt").write_text("q1 not-a-number\n", encoding="utf-8")
        run_in(workdir, "bootstrap", "--scores", workdir / "bad.txt", expect=1)


class TestDeterminism:
    def test_eval_outputs_byte_identical(self, workdir):
        for prefix in ("x", "y"):
            run_in(workdir, "eval", "--run", workdir / "alpha.run",
                   "--qrels", workdir / "original.qrels", "--out", workdir / prefix)
        assert (workdir / "x.eval.json").read_bytes() == (workdir / "y.eval.json").read_bytes()
        assert (workdir / "x.eval.csv").read_bytes() == (workdir / "y.eval.csv").read_bytes()

    def test_pool_outputs_byte_identical(self, workdir):
        for prefix in ("p1", "p2"):
            run_in(workdir, "pool", "--runs", workdir / "alpha.run", workdir / "beta.run",
                   "--depth", "10", "--out", workdir / prefix)
        assert (workdir / "p1.pool.json").read_bytes() == (workdir / "p2.pool.json").read_bytes()
