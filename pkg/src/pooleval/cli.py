"""Command-line entry point.

One subcommand per operation:

  eval | delta | pool | plan | resolve | agreement | overlap | ablate |
  dist | bootstrap | textsim | serve

Report commands write a CSV and a JSON file next to their primary input
(``<input stem>.<report>.csv/json``), print a human-readable summary, and
exit 0. Validation problems exit 1, IO problems exit 2. All randomness is
seeded, so identical inputs and flags produce byte-identical output files.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from pathlib import Path

from . import agreement as agreement_mod
from . import analysis, metrics, pooling, stats, textsim
from .corpus import (
    CorpusError,
    merge_judgments,
    parse_judgments,
    parse_queries,
    parse_run,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2


class CliError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # keep exit-code policy in run_cli
        raise CliError(message)


def _ks(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.split(",") if tok)
    except ValueError:
        raise CliError(f"bad cutoff list {text!r}; expected e.g. 1,5,10,50") from None


def _out_prefix(args, primary_input: str | Path) -> Path:
    if args.out:
        return Path(args.out)
    primary = Path(primary_input)
    return primary.parent / primary.stem


def _write(path: Path, text: str, written: list[Path]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    written.append(path)


def _json_text(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _emit(args, summary: str, csv_text: str, json_text: str) -> None:
    if args.format == "csv":
        print(csv_text, end="")
    elif args.format == "json":
        print(json_text, end="")
    else:
        print(summary)


def _print_written(written: list[Path]) -> None:
    for path in written:
        print(f"wrote {path}", file=sys.stderr)


def _add_common(parser, ks_default="1,5,10,50"):
    parser.add_argument("--k", type=_ks, default=_ks(ks_default), dest="ks",
                        help=f"comparison cutoffs (default {ks_default})")
    parser.add_argument("--out", help="output path prefix (default: input stem)")
    parser.add_argument("--format", choices=("table", "csv", "json"), default="table",
                        help="stdout rendering; files are always csv+json")


def _add_strict(parser):
    parser.add_argument("--lenient", action="store_true",
                        help="warn instead of aborting on rank gaps")


RUN_GRAMMAR = "run file: 'query_id item_id rank score run_tag' per line ('#' comments ok)"
QRELS_GRAMMAR = "judgment file: 'query_id item_id label source' with label 0 or 1"
QUERIES_GRAMMAR = "query file: 'query_id<TAB>split<TAB>caption text', split train|test"
LOG_GRAMMAR = ("label log: JSON lines "
               "{pair_id, query_id, item_id, rater_id, label, ts}")


def build_parser() -> _Parser:
    parser = _Parser(prog="pooleval",
                     description="Pooled-judgment retrieval evaluation toolkit")
    parser.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                        help="worker threads where supported (results are "
                             "independent of this)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="score one run under one judgment set", epilog=RUN_GRAMMAR + '; ' + QRELS_GRAMMAR)
    p.add_argument("--run", required=True)
    p.add_argument("--qrels", required=True)
    p.add_argument("--merge", action="append", default=[],
                   help="additional judgment file(s) merged in, relevant-wins")
    p.add_argument("--per-query", action="store_true",
                   help="also write per-query metric rows")
    p.add_argument("--zero-missing", action="store_true",
                   help="score queries without positives as 0 instead of "
                        "excluding them")
    _add_strict(p)
    _add_common(p)

    p = sub.add_parser("delta", help="corrected vs original metric deltas", epilog=RUN_GRAMMAR + '; ' + QRELS_GRAMMAR)
    p.add_argument("--run", required=True)
    p.add_argument("--original", required=True)
    p.add_argument("--corrected", required=True)
    _add_strict(p)
    _add_common(p)

    p = sub.add_parser("pool", help="build an annotation pool from run top-K unions", epilog=RUN_GRAMMAR + '; ' + QRELS_GRAMMAR)
    p.add_argument("--runs", nargs="+", required=True)
    p.add_argument("--seed-qrels", help="already-judged pairs to exclude")
    p.add_argument("--depth", type=int, default=10)
    _add_strict(p)
    p.add_argument("--out", help="output path prefix (default: first run stem)")
    p.add_argument("--format", choices=("table", "csv", "json"), default="table")

    p = sub.add_parser("plan", help="plan pass-1/pass-2 annotation jobs for a pool", epilog='pool file: JSON artifact written by the pool subcommand')
    p.add_argument("--pool", required=True, help="pool JSON artifact")
    p.add_argument("--fraction", type=float, default=0.1,
                   help="double-label fraction (default 0.10)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--format", choices=("table", "csv", "json"), default="table")

    p = sub.add_parser("resolve", help="fold a label log into resolved judgments", epilog=LOG_GRAMMAR)
    p.add_argument("--labels", required=True, help="JSONL label log")
    p.add_argument("--pool", help="pool JSON for per-system provenance")
    p.add_argument("--out")
    p.add_argument("--format", choices=("table", "csv", "json"), default="table")

    p = sub.add_parser("agreement", help="inter-annotator agreement statistics", epilog=LOG_GRAMMAR)
    p.add_argument("--labels", required=True)
    p.add_argument("--figures", action="store_true")
    p.add_argument("--out")
    p.add_argument("--format", choices=("table", "csv", "json"), default="table")

    p = sub.add_parser("overlap", help="pairwise prediction overlap and RBO", epilog=RUN_GRAMMAR)
    p.add_argument("--runs", nargs="+", required=True)
    p.add_argument("--p", type=float, default=0.9, help="RBO persistence (default 0.9)")
    p.add_argument("--depth", type=int, default=10)
    p.add_argument("--rbo-variant", choices=("extrapolated", "truncated"),
                   default="extrapolated")
    _add_strict(p)
    p.add_argument("--out")
    p.add_argument("--format", choices=("table", "csv", "json"), default="table")

    p = sub.add_parser("ablate", help="leave-one-system-out pooling bias", epilog=RUN_GRAMMAR + '; ' + QRELS_GRAMMAR + " (pooled sources must be pooled:<sys>+<sys>)")
    p.add_argument("--runs", nargs="+", required=True)
    p.add_argument("--original", required=True)
    p.add_argument("--pooled", required=True,
                   help="pooled judgments with pooled:<sys>+<sys> sources")
    p.add_argument("--target", action="append", required=True,
                   help="system tag to ablate (repeatable)")
    _add_strict(p)
    _add_common(p)

    p = sub.add_parser("dist", help="positives, rank, and caption-length distributions", epilog=QRELS_GRAMMAR + '; ' + QUERIES_GRAMMAR)
    p.add_argument("--runs", nargs="*", default=[])
    p.add_argument("--qrels", required=True)
    p.add_argument("--merge", action="append", default=[],
                   help="additional judgment file(s) merged in, relevant-wins")
    p.add_argument("--queries", required=True)
    p.add_argument("--split", choices=("test", "train", "all"), default="test")
    p.add_argument("--figures", action="store_true",
                   help="render PNG figures alongside the delimited output")
    _add_strict(p)
    p.add_argument("--out")
    p.add_argument("--format", choices=("table", "csv", "json"), default="table")

    p = sub.add_parser("bootstrap", help="resample deviation percentiles per budget N", epilog="scores file: '<score>' or '<query_id> <score>' per line")
    p.add_argument("--scores", required=True,
                   help="per-query scores: '<score>' or '<query_id> <score>' lines")
    p.add_argument("--n", type=_ks, default=stats.DEFAULT_N_GRID, dest="n_grid",
                   help="sample-size grid (default 500,1000,3000)")
    p.add_argument("--b", type=int, default=stats.DEFAULT_RESAMPLES,
                   help="resample count (default 10000)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--figures", action="store_true")
    p.add_argument("--out")
    p.add_argument("--format", choices=("table", "csv", "json"), default="table")

    p = sub.add_parser("textsim", help="train-test caption similarity profile", epilog=QUERIES_GRAMMAR)
    p.add_argument("--queries", required=True, help="query file with train+test splits")
    p.add_argument("--n", type=int, default=5, help="character n-gram size (default 5)")
    p.add_argument("--top-k", type=int, default=10,
                   help="train captions averaged per test caption (default 10)")
    p.add_argument("--figures", action="store_true")
    p.add_argument("--out")
    p.add_argument("--format", choices=("table", "csv", "json"), default="table")

    p = sub.add_parser("serve", help="run the HTTP annotation service", epilog=QUERIES_GRAMMAR + '; ' + QRELS_GRAMMAR + '; ' + LOG_GRAMMAR)
    p.add_argument("--pool", required=True, help="pool JSON artifact")
    p.add_argument("--queries", required=True)
    p.add_argument("--original", required=True)
    p.add_argument("--runs", nargs="*", default=[])
    p.add_argument("--log", help="label log path (default: <pool stem>.labels.jsonl)")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8321)
    p.add_argument("--lease-timeout", type=float, default=600.0)
    p.add_argument("--fraction", type=float, default=0.1)
    p.add_argument("--plan-seed", type=int, default=0)
    p.add_argument("--media-template", default="media/{item_id}")
    p.add_argument("--static", help="directory of UI assets to serve at /")
    return parser


def cmd_eval(args) -> int:
    run = parse_run(args.run, strict=not args.lenient)
    judgments = parse_judgments(args.qrels)
    for extra in args.merge:
        judgments = merge_judgments(judgments, parse_judgments(extra))
    policy = metrics.NO_POSITIVE_ZERO if args.zero_missing else metrics.NO_POSITIVE_EXCLUDE
    report = metrics.evaluate(run, judgments, ks=args.ks, no_positive_policy=policy)
    prefix = _out_prefix(args, args.run)
    written: list[Path] = []
    _write(prefix.with_name(prefix.name + ".eval.csv"), report.to_csv(), written)
    _write(prefix.with_name(prefix.name + ".eval.json"), _json_text(report.to_dict()), written)
    if args.per_query:
        _write(prefix.with_name(prefix.name + ".eval.per_query.csv"),
               report.per_query_csv(), written)

    agg = report.aggregate
    lines = [
        f"run {run.system} under {judgments.tag}: {agg.n_evaluated} queries evaluated, "
        f"{len(report.no_positive_queries)} without a known positive",
    ]
    for k in report.ks:
        lines.append(f"  C@{k:<4} {metrics.format_percent(agg.correct_at[k])}%"
                     f"   R@{k:<4} {metrics.format_percent(agg.recall_at[k])}%")
    lines.append(f"  AP    {metrics.format_percent(agg.avg_prec)}%")
    if agg.median_first_pos_rank is not None:
        lines.append(f"  first positive rank: mean {agg.mean_first_pos_rank:.2f}, "
                     f"median {agg.median_first_pos_rank:g}")
    _emit(args, "\n".join(lines), report.to_csv(), _json_text(report.to_dict()))
    _print_written(written)
    return EXIT_OK


def cmd_delta(args) -> int:
    run = parse_run(args.run, strict=not args.lenient)
    original = parse_judgments(args.original)
    extra = parse_judgments(args.corrected)
    # scoring set A is always original + corrections; idempotent when the
    # corrected file is already a superset
    corrected = merge_judgments(original, extra)
    report = metrics.delta_report(run, original, corrected, ks=args.ks)
    prefix = _out_prefix(args, args.run)
    written: list[Path] = []
    _write(prefix.with_name(prefix.name + ".delta.csv"), report.to_csv(), written)
    _write(prefix.with_name(prefix.name + ".delta.json"), _json_text(report.to_dict()), written)
    summary = (
        f"run {run.system}: corrected ({corrected.tag}) vs original ({original.tag})\n"
        + report.format_table()
    )
    _emit(args, summary, report.to_csv(), _json_text(report.to_dict()))
    _print_written(written)
    return EXIT_OK


def cmd_pool(args) -> int:
    runs = [parse_run(path, strict=not args.lenient) for path in args.runs]
    seed = parse_judgments(args.seed_qrels) if args.seed_qrels else None
    pool = pooling.build_pool(runs, seed, depth=args.depth)
    prefix = _out_prefix(args, args.runs[0])
    written: list[Path] = []
    _write(prefix.with_name(prefix.name + ".pool.json"),
           _json_text(pool.to_dict()), written)
    _write(prefix.with_name(prefix.name + ".pool.run"),
           pooling.export_pool_run(pool), written)
    summary = (
        f"pool of {len(pool)} pairs at depth {pool.depth} from "
        f"{', '.join(pool.contributing_systems)}; {pool.excluded} already-judged "
        "pair(s) excluded"
    )
    _emit(args, summary, pooling.export_pool_run(pool), _json_text(pool.to_dict()))
    _print_written(written)
    return EXIT_OK


def cmd_plan(args) -> int:
    pool = pooling.load_pool(args.pool)
    jobs = pooling.assignment_plan(pool, args.fraction, args.seed)
    prefix = _out_prefix(args, args.pool)
    written: list[Path] = []
    jobs_text = "".join(json.dumps(j.to_dict()) + "\n" for j in jobs)
    _write(prefix.with_name(prefix.name + ".plan.jsonl"), jobs_text, written)
    n_second = sum(1 for j in jobs if j.pass_no == 2)
    summary = (
        f"{len(jobs)} jobs planned for {len(pool)} pairs "
        f"({n_second} double-label jobs at fraction {args.fraction}, seed {args.seed})"
    )
    _emit(args, summary, jobs_text, jobs_text)
    _print_written(written)
    return EXIT_OK


def cmd_resolve(args) -> int:
    records = pooling.read_label_log(args.labels)
    provenance = None
    if args.pool:
        provenance = dict(pooling.load_pool(args.pool).contributors)
    result = pooling.resolve_labels(records, provenance=provenance)
    prefix = _out_prefix(args, args.labels)
    written: list[Path] = []
    from .corpus import serialize_judgments

    _write(prefix.with_name(prefix.name + ".resolved.qrels"),
           serialize_judgments(result.judgments), written)
    _write(prefix.with_name(prefix.name + ".outcomes.csv"),
           result.outcomes_csv(), written)
    pending_text = "".join(json.dumps(j.to_dict()) + "\n" for j in result.pending)
    _write(prefix.with_name(prefix.name + ".pending.jsonl"), pending_text, written)
    rate = result.resolution_rate
    summary = (
        f"{len(result.outcomes)} labeled pairs: {result.n_resolved} resolved, "
        f"{result.n_unresolved} unresolved, {result.n_escalated} escalated "
        f"(resolution rate {'n/a' if rate is None else format(rate, '.3f')}); "
        f"{len(result.pending)} third-label job(s) pending"
    )
    _emit(args, summary, result.outcomes_csv(), _json_text({
        "format_version": 1,
        "report": "resolve",
        "n_pairs": len(result.outcomes),
        "n_resolved": result.n_resolved,
        "n_unresolved": result.n_unresolved,
        "n_escalated": result.n_escalated,
        "resolution_rate": rate,
        "pending_third_labels": len(result.pending),
    }))
    _print_written(written)
    return EXIT_OK


def cmd_agreement(args) -> int:
    records = pooling.read_label_log(args.labels)
    report = agreement_mod.compute_agreement(records)
    prefix = _out_prefix(args, args.labels)
    written: list[Path] = []
    _write(prefix.with_name(prefix.name + ".agreement.csv"), report.to_csv(), written)
    _write(prefix.with_name(prefix.name + ".agreement.json"),
           _json_text(report.to_dict()), written)
    if args.figures and report.by_label_count:
        from . import plots

        written += plots.save_agreement_figure(
            report, prefix.with_name(prefix.name + ".agreement.png")
        )
    _emit(args, report.format_table(), report.to_csv(), _json_text(report.to_dict()))
    _print_written(written)
    return EXIT_OK


def cmd_overlap(args) -> int:
    runs = [parse_run(path, strict=not args.lenient) for path in args.runs]
    report = analysis.overlap_report(runs, p=args.p, depth=args.depth,
                                     variant=args.rbo_variant)
    prefix = _out_prefix(args, args.runs[0])
    written: list[Path] = []
    _write(prefix.with_name(prefix.name + ".overlap.csv"), report.to_csv(), written)
    _write(prefix.with_name(prefix.name + ".overlap.json"),
           _json_text(report.to_dict()), written)
    _emit(args, report.format_table(), report.to_csv(), _json_text(report.to_dict()))
    _print_written(written)
    return EXIT_OK


def cmd_ablate(args) -> int:
    runs = [parse_run(path, strict=not args.lenient) for path in args.runs]
    original = parse_judgments(args.original)
    pooled = parse_judgments(args.pooled)
    prefix = _out_prefix(args, args.original)
    written: list[Path] = []
    summaries = []
    docs = []
    csv_parts = []
    for target in args.target:
        report = analysis.leave_one_out(runs, original, pooled, target, ks=args.ks)
        docs.append(report.to_dict())
        csv_parts.append(report.to_csv())
        summaries.append(f"target {target}\n{report.format_table()}")
    csv_text = csv_parts[0] + "".join(
        "\n".join(part.splitlines()[1:]) + "\n" for part in csv_parts[1:]
    )
    json_text = _json_text({"format_version": 1, "report": "ablate", "targets": docs})
    _write(prefix.with_name(prefix.name + ".ablate.csv"), csv_text, written)
    _write(prefix.with_name(prefix.name + ".ablate.json"), json_text, written)
    _emit(args, "\n\n".join(summaries), csv_text, json_text)
    _print_written(written)
    return EXIT_OK


def cmd_dist(args) -> int:
    runs = [parse_run(path, strict=not args.lenient) for path in args.runs]
    judgments = parse_judgments(args.qrels)
    for extra in args.merge:
        judgments = merge_judgments(judgments, parse_judgments(extra))
    queries = parse_queries(args.queries)
    if args.split != "all":
        queries = {qid: q for qid, q in queries.items() if q.split == args.split}
    if not queries:
        raise CliError(f"no {args.split} queries in {args.queries}")
    report = analysis.distributions(runs, judgments, queries)
    prefix = _out_prefix(args, args.qrels)
    written: list[Path] = []
    _write(prefix.with_name(prefix.name + ".dist.csv"), report.to_csv(), written)
    _write(prefix.with_name(prefix.name + ".dist.json"),
           _json_text(report.to_dict()), written)
    if args.figures:
        from . import plots

        written += plots.save_distribution_figures(report, prefix.parent, prefix.name)
    pos = report.positives_per_query
    single = pos.counts[1] if len(pos.counts) > 1 else 0
    summary = (
        f"{pos.population} queries; {single} with exactly one known positive; "
        f"caption lengths over {report.caption_words.population} captioned queries"
    )
    _emit(args, summary, report.to_csv(), _json_text(report.to_dict()))
    _print_written(written)
    return EXIT_OK


def _parse_scores(path: str) -> list[float]:
    scores = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            token = parts[0] if len(parts) == 1 else parts[1]
            try:
                scores.append(float(token))
            except ValueError:
                raise CliError(f"{path}:{lineno}: bad score {token!r}") from None
    if not scores:
        raise CliError(f"{path}: no scores found")
    return scores


def cmd_bootstrap(args) -> int:
    scores = _parse_scores(args.scores)
    results = [
        stats.bootstrap_deviation(scores, n=n, b=args.b, seed=args.seed,
                                  threads=max(1, args.threads))
        for n in args.n_grid
    ]
    prefix = _out_prefix(args, args.scores)
    written: list[Path] = []
    doc = {
        "format_version": 1,
        "report": "bootstrap",
        "n_scores": len(scores),
        "results": [r.to_dict() for r in results],
    }
    csv_rows = ["sample_size,resamples,seed,percentile_95"]
    csv_rows += [
        f"{r.sample_size},{r.resamples},{r.rng_seed},{r.percentile_95!r}"
        for r in results
    ]
    csv_text = "\n".join(csv_rows) + "\n"
    _write(prefix.with_name(prefix.name + ".bootstrap.csv"), csv_text, written)
    _write(prefix.with_name(prefix.name + ".bootstrap.json"), _json_text(doc), written)
    if args.figures:
        from . import plots

        written += plots.save_bootstrap_figure(
            results, prefix.with_name(prefix.name + ".bootstrap.png")
        )
    lines = [f"{len(scores)} per-query scores, {args.b} resamples, seed {args.seed}"]
    lines += [
        f"  N={r.sample_size:<6} detectable difference at 95%: {r.percentile_95:.4f}"
        for r in results
    ]
    _emit(args, "\n".join(lines), csv_text, _json_text(doc))
    _print_written(written)
    return EXIT_OK


def cmd_textsim(args) -> int:
    queries = parse_queries(args.queries)
    test = {qid: q.text for qid, q in queries.items() if q.split == "test"}
    train = [q.text for qid, q in sorted(queries.items()) if q.split == "train"]
    if not test or not train:
        raise CliError("query file must contain both test and train captions")
    encoder = textsim.fit_encoder(sorted(test.values()), n=args.n)
    profile = textsim.similarity_profile(
        encoder, test, train, k=args.top_k, threads=max(1, args.threads)
    )
    correlation = textsim.length_similarity_correlation(profile, queries)
    prefix = _out_prefix(args, args.queries)
    written: list[Path] = []
    csv_text = profile.to_csv(queries)
    _write(prefix.with_name(prefix.name + ".textsim.csv"), csv_text, written)
    _write(prefix.with_name(prefix.name + ".textsim.json"),
           _json_text(correlation.to_dict()), written)
    if args.figures:
        from . import plots

        rows = [
            (profile.values[qid], queries[qid].word_length)
            for qid in sorted(profile.values)
        ]
        written += plots.save_textsim_figure(
            rows, prefix.with_name(prefix.name + ".textsim.png")
        )

    def fmt(v):
        return "undefined" if v is None else f"{v:+.3f}"

    summary = (
        f"{len(test)} test vs {len(train)} train captions "
        f"({args.n}-gram encoder, top-{args.top_k} mean)\n"
        f"  similarity vs word length:  spearman {fmt(correlation.spearman_word)}, "
        f"kendall {fmt(correlation.kendall_word)}\n"
        f"  similarity vs char length:  spearman {fmt(correlation.spearman_char)}, "
        f"kendall {fmt(correlation.kendall_char)}"
    )
    _emit(args, summary, csv_text, _json_text(correlation.to_dict()))
    _print_written(written)
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import ServiceConfig, create_app

    pool = pooling.load_pool(args.pool)
    queries = parse_queries(args.queries)
    original = parse_judgments(args.original)
    runs = {}
    for path in args.runs:
        run = parse_run(path)
        runs[run.system] = run
    log_path = Path(args.log) if args.log else Path(args.pool).with_suffix(".labels.jsonl")
    config = ServiceConfig(
        pool=pool,
        queries=queries,
        original=original,
        runs=runs,
        log_path=log_path,
        lease_seconds=args.lease_timeout,
        double_label_fraction=args.fraction,
        plan_seed=args.plan_seed,
        media_uri_template=args.media_template,
    )
    app = create_app(config, static_dir=args.static)
    print(f"serving {len(pool)} pool pairs on http://{args.host}:{args.port} "
          f"(log: {log_path})")
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


HANDLERS = {
    "eval": cmd_eval,
    "delta": cmd_delta,
    "pool": cmd_pool,
    "plan": cmd_plan,
    "resolve": cmd_resolve,
    "agreement": cmd_agreement,
    "overlap": cmd_overlap,
    "ablate": cmd_ablate,
    "dist": cmd_dist,
    "bootstrap": cmd_bootstrap,
    "textsim": cmd_textsim,
    "serve": cmd_serve,
}


def run_cli(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            return HANDLERS[args.command](args)
    except SystemExit as exc:  # argparse --help
        return int(exc.code or 0)
    except (CliError, CorpusError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
