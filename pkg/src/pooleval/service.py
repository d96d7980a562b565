"""HTTP annotation service: serves judging jobs, persists labels, resolves.

The append-only JSONL label log is the source of truth; all in-memory state
is a deterministic fold of it, rebuilt on startup, so an acknowledged POST
survives a restart. Jobs are leased to raters with a timeout and return to
the queue on expiry. A rater never receives a pair they already labeled or
currently hold, and job payloads never reveal which systems contributed a
pair.
"""

from __future__ import annotations

import os
import threading
import time
import warnings
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Mapping

from fastapi import FastAPI, HTTPException, Response
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from .agreement import agreement_rate
from .corpus import JudgmentSet, Pair, Query, RankedRun, merge_judgments
from .metrics import evaluate
from .pooling import (
    ESCALATED,
    LABEL_VALUES,
    Job,
    LabelRecord,
    Pool,
    assignment_plan,
    format_label_record,
    make_job,
    read_label_log,
)

DEFAULT_LEASE_SECONDS = 600.0

DEFAULT_GUIDELINES = {
    "criterion": (
        "Mark the pair relevant only when every element mentioned in the "
        "query is reasonably present in the video: people, objects, "
        "locations, and activities, as well as counts, qualifiers, and "
        "descriptive details. Some interpretation and inference is fine, but "
        "if the query is ambiguous or vague, or anything it mentions is "
        "missing, mark the pair irrelevant. Use escalate only when the pair "
        "cannot be judged at all, for example when the media will not load."
    ),
    "sensitive_categories": (
        "Accept what the query says about people unless the video plainly "
        "contradicts it, and do not attempt finer-grained distinctions. In "
        "particular, make no assumptions about gender: accept the gender the "
        "query describes."
    ),
}


class LeaseError(Exception):
    """Submission without a live lease: unknown, finished, expired, or held
    by someone else."""


@dataclass
class ServiceConfig:
    pool: Pool
    queries: Mapping[str, Query]
    original: JudgmentSet
    log_path: Path
    runs: Mapping[str, RankedRun] = field(default_factory=dict)
    lease_seconds: float = DEFAULT_LEASE_SECONDS
    double_label_fraction: float = 0.1
    plan_seed: int = 0
    ks: tuple[int, ...] = (1, 5, 10, 50)
    media_uri_template: str = "media/{item_id}"
    guidelines: Mapping[str, str] = field(default_factory=lambda: dict(DEFAULT_GUIDELINES))


@dataclass
class _JobState:
    job: Job
    done: bool = False


class AnnotationState:
    """Queue, lease table, and label log behind the HTTP surface.

    All public methods take the lock; the label log has a single logical
    writer (appends happen inside the lock, flushed and fsynced before the
    submission is acknowledged).
    """

    def __init__(self, config: ServiceConfig, now: Callable[[], float] = time.monotonic):
        self._config = config
        self._now = now
        self._lock = threading.Lock()
        self._jobs: dict[str, _JobState] = {}
        self._order: list[str] = []
        self._pair_jobs: dict[Pair, list[_JobState]] = {}
        self._leases: dict[str, tuple[str, float]] = {}
        self._records: list[LabelRecord] = []
        self._by_pair: dict[Pair, list[LabelRecord]] = {}

        for job in assignment_plan(
            config.pool, config.double_label_fraction, config.plan_seed
        ):
            self._add_job(job)
        if Path(config.log_path).exists():
            for record in read_label_log(config.log_path):
                self._ingest(record)
        self._log_file = open(config.log_path, "a", encoding="utf-8")

    def close(self) -> None:
        self._log_file.close()

    # -- internal state transitions (caller holds the lock or is __init__) --

    def _add_job(self, job: Job) -> None:
        state = _JobState(job=job)
        self._jobs[job.job_id] = state
        self._order.append(job.job_id)
        self._pair_jobs.setdefault(job.pair, []).append(state)

    def _ingest(self, record: LabelRecord) -> None:
        """Fold one record into the state: close one open job for the pair
        and open a third-pass job when two substantive labels disagree."""
        self._records.append(record)
        self._by_pair.setdefault(record.pair, []).append(record)
        for job_state in self._pair_jobs.get(record.pair, []):
            if not job_state.done:
                job_state.done = True
                break
        self._maybe_open_third(record.pair)

    def _maybe_open_third(self, pair: Pair) -> None:
        votes = [r.label for r in self._by_pair[pair] if r.label != ESCALATED]
        if len(votes) != 2 or votes[0] == votes[1]:
            return
        job = make_job(pair[0], pair[1], 3)
        if job.job_id not in self._jobs:
            self._add_job(job)

    def _pair_raters(self, pair: Pair) -> set[str]:
        raters = {r.rater_id for r in self._by_pair.get(pair, [])}
        for job_id, (rater, _) in self._leases.items():
            if self._jobs[job_id].job.pair == pair:
                raters.add(rater)
        return raters

    def _expire_leases(self, now: float) -> None:
        for job_id, (_, expiry) in list(self._leases.items()):
            if expiry <= now:
                del self._leases[job_id]

    def _job_payload(self, job: Job) -> dict:
        query = self._config.queries.get(job.query_id)
        return {
            "job_id": job.job_id,
            "query_id": job.query_id,
            "item_id": job.item_id,
            "caption_text": query.text if query else "",
            "media_uri": self._config.media_uri_template.format(item_id=job.item_id),
            "pass": job.pass_no,
        }

    def _pair_status(self, pair: Pair) -> str:
        records = self._by_pair.get(pair)
        if not records:
            return "unlabeled"
        votes = [r.label for r in records if r.label != ESCALATED]
        if not votes:
            return "escalated"
        counts: dict[str, int] = {}
        for vote in votes:
            counts[vote] = counts.get(vote, 0) + 1
        if max(counts.values()) * 2 > len(votes):
            return "resolved"
        return "unresolved_pending"

    # -- public operations ---------------------------------------------------

    def next_job(self, rater_id: str) -> dict | None:
        with self._lock:
            now = self._now()
            self._expire_leases(now)
            for job_id in self._order:
                job_state = self._jobs[job_id]
                if job_state.done or job_id in self._leases:
                    continue
                if rater_id in self._pair_raters(job_state.job.pair):
                    continue
                self._leases[job_id] = (rater_id, now + self._config.lease_seconds)
                return self._job_payload(job_state.job)
            return None

    def submit(self, job_id: str, rater_id: str, label: str) -> None:
        if label not in LABEL_VALUES:
            raise ValueError(f"label must be one of {LABEL_VALUES}, got {label!r}")
        with self._lock:
            now = self._now()
            job_state = self._jobs.get(job_id)
            if job_state is None or job_state.done:
                raise LeaseError("job does not exist or is already completed")
            lease = self._leases.get(job_id)
            if lease is None or lease[0] != rater_id or lease[1] <= now:
                raise LeaseError("no live lease on this job for this rater")
            record = LabelRecord(
                query_id=job_state.job.query_id,
                item_id=job_state.job.item_id,
                rater_id=rater_id,
                label=label,
                ts=datetime.now(timezone.utc).isoformat(timespec="seconds").replace("+00:00", "Z"),
            )
            # durable before acknowledged
            self._log_file.write(format_label_record(record) + "\n")
            self._log_file.flush()
            os.fsync(self._log_file.fileno())
            del self._leases[job_id]
            self._ingest(record)

    def progress(self) -> dict:
        with self._lock:
            counts = {"resolved": 0, "unresolved_pending": 0, "escalated": 0, "unlabeled": 0}
            for pair in self._config.pool.pairs:
                counts[self._pair_status(pair)] += 1
            report = agreement_rate(self._records)
            return {
                "total_pairs": len(self._config.pool.pairs),
                "resolved": counts["resolved"],
                "unresolved_pending": counts["unresolved_pending"],
                "escalated": counts["escalated"],
                "unlabeled": counts["unlabeled"],
                "agreement_so_far": report.agreement_rate,
            }

    def resolved_judgments(self) -> JudgmentSet:
        """Original labels merged with currently-resolved pooled labels."""
        from .pooling import resolve_labels

        with self._lock:
            records = list(self._records)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            resolved = resolve_labels(
                records, provenance=dict(self._config.pool.contributors)
            )
        return merge_judgments(self._config.original, resolved.judgments)

    def live_metrics(self, run_tag: str, k: int) -> dict:
        run = self._config.runs[run_tag]
        judgments = self.resolved_judgments()
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            report = evaluate(run, judgments, ks=(k,))
        agg = report.aggregate
        return {
            "run": run_tag,
            "k": k,
            "correct_at": agg.correct_at[k],
            "recall_at": agg.recall_at[k],
            "avg_prec": agg.avg_prec,
            "mean_first_pos_rank": agg.mean_first_pos_rank,
            "n_evaluated": agg.n_evaluated,
            "n_no_positive": len(report.no_positive_queries),
        }

    def pair_info(self, pair: Pair) -> dict | None:
        with self._lock:
            if pair not in self._config.pool.contributors and pair not in self._by_pair:
                return None
            query = self._config.queries.get(pair[0])
            return {
                "query_id": pair[0],
                "item_id": pair[1],
                "caption_text": query.text if query else "",
                "media_uri": self._config.media_uri_template.format(item_id=pair[1]),
                "status": self._pair_status(pair),
                "n_labels": len(self._by_pair.get(pair, [])),
            }


class LabelSubmission(BaseModel):
    job_id: str
    rater_id: str
    label: str


def create_app(
    config: ServiceConfig,
    state: AnnotationState | None = None,
    static_dir: str | Path | None = None,
) -> FastAPI:
    state = state or AnnotationState(config)
    app = FastAPI(title="pooleval annotation service")
    app.state.annotation = state
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.get("/api/queue/next")
    def queue_next(rater_id: str = ""):
        if not rater_id:
            raise HTTPException(status_code=400, detail="rater_id is required")
        job = state.next_job(rater_id)
        if job is None:
            return Response(status_code=204)
        return job

    @app.post("/api/labels")
    def post_label(submission: LabelSubmission):
        if submission.label not in LABEL_VALUES:
            raise HTTPException(
                status_code=400,
                detail=f"label must be one of {list(LABEL_VALUES)}",
            )
        if not submission.rater_id:
            raise HTTPException(status_code=400, detail="rater_id is required")
        try:
            state.submit(submission.job_id, submission.rater_id, submission.label)
        except LeaseError as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from None
        return {"status": "ok"}

    @app.get("/api/progress")
    def progress():
        return state.progress()

    @app.get("/api/metrics")
    def metrics(run: str, k: int = 1):
        if run not in config.runs:
            raise HTTPException(status_code=404, detail=f"unknown run {run!r}")
        if k < 1:
            raise HTTPException(status_code=400, detail="k must be >= 1")
        return state.live_metrics(run, k)

    @app.get("/api/guidelines")
    def guidelines():
        return dict(config.guidelines)

    @app.get("/api/pairs/{pair_token:path}")
    def pair_detail(pair_token: str):
        parts = pair_token.split(" ")
        if len(parts) != 2:
            raise HTTPException(
                status_code=400, detail="pair id is '<query_id> <item_id>'"
            )
        info = state.pair_info((parts[0], parts[1]))
        if info is None:
            raise HTTPException(status_code=404, detail="unknown pair")
        return info

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")
    return app
