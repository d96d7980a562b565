// Judging session state machine, independent of the DOM so it can be
// driven by keyboard handlers in the browser and scripted in tests.
//
// Guarantees:
// - a decision, once accepted, is never silently dropped: network failures
//   retry with exponential backoff until the server acknowledges;
// - a 409 (lost lease) is not an error: the decision is discarded server-
//   side by design and the next job is fetched silently;
// - relevant/irrelevant are only submittable after the media element began
//   loading; escalate is always available once a job is on screen.

import { AnnotationJob, ApiClient, ApiError, Label } from "./api.js";

export type SessionState =
  | "idle"
  | "loading"
  | "judging"
  | "submitting"
  | "drained"
  | "stopped";

export interface SessionCounts {
  relevant: number;
  irrelevant: number;
  escalated: number;
}

export interface JudgeView {
  showJob(job: AnnotationJob): void;
  showDrained(): void;
  showError(message: string): void;
  clearError(): void;
  setCounts(counts: SessionCounts): void;
  setSubmittable(ready: boolean): void;
}

export interface SessionOptions {
  raterId: string;
  retryDelayMs?: number;
  maxRetryDelayMs?: number;
  sleep?: (ms: number) => Promise<void>;
}

const defaultSleep = (ms: number) => new Promise<void>((r) => setTimeout(r, ms));

export class JudgeSession {
  private currentJob: AnnotationJob | null = null;
  private mediaReady = false;
  private stateValue: SessionState = "idle";
  private stopRequested = false;
  private readonly counts: SessionCounts = {
    relevant: 0,
    irrelevant: 0,
    escalated: 0,
  };
  private readonly retryDelayMs: number;
  private readonly maxRetryDelayMs: number;
  private readonly sleep: (ms: number) => Promise<void>;

  constructor(
    private readonly client: ApiClient,
    private readonly view: JudgeView,
    private readonly options: SessionOptions,
  ) {
    this.retryDelayMs = options.retryDelayMs ?? 500;
    this.maxRetryDelayMs = options.maxRetryDelayMs ?? 8000;
    this.sleep = options.sleep ?? defaultSleep;
  }

  get state(): SessionState {
    return this.stateValue;
  }

  get job(): AnnotationJob | null {
    return this.currentJob;
  }

  get sessionCounts(): SessionCounts {
    return { ...this.counts };
  }

  /** Fetch and display the first job. */
  async start(): Promise<void> {
    await this.advance();
  }

  stop(): void {
    this.stopRequested = true;
    this.stateValue = "stopped";
  }

  /** The media element fired loadstart; relevant/irrelevant unlock. */
  mediaStarted(): void {
    if (this.currentJob) {
      this.mediaReady = true;
      this.view.setSubmittable(true);
    }
  }

  /**
   * Submit a decision for the job on screen. Returns false when nothing is
   * submittable (no job, media not started for a relevance call, or a
   * submission already in flight).
   */
  async decide(label: Label): Promise<boolean> {
    if (this.stateValue !== "judging" || !this.currentJob) return false;
    if (!this.mediaReady && label !== "escalated") return false;
    const job = this.currentJob;
    this.stateValue = "submitting";
    this.view.setSubmittable(false);

    let delay = this.retryDelayMs;
    // pending decision is held until the server acknowledges or voids it
    for (;;) {
      if (this.stopRequested) return false;
      try {
        await this.client.submitLabel(job.job_id, this.options.raterId, label);
        this.counts[label] += 1;
        this.view.setCounts(this.sessionCounts);
        this.view.clearError();
        break;
      } catch (error) {
        if (error instanceof ApiError && error.status === 409) {
          // lease expired or duplicate: the decision is void, move on
          this.view.clearError();
          break;
        }
        if (error instanceof ApiError) {
          this.view.showError(`submission rejected: ${error.message}`);
          this.stateValue = "judging";
          this.view.setSubmittable(this.mediaReady);
          return false;
        }
        this.view.showError("network failure, retrying");
        await this.sleep(delay);
        delay = Math.min(delay * 2, this.maxRetryDelayMs);
      }
    }
    await this.advance();
    return true;
  }

  private async advance(): Promise<void> {
    this.currentJob = null;
    this.mediaReady = false;
    this.view.setSubmittable(false);
    this.stateValue = "loading";
    let delay = this.retryDelayMs;
    for (;;) {
      if (this.stopRequested) return;
      try {
        const job = await this.client.nextJob(this.options.raterId);
        this.view.clearError();
        if (job === null) {
          this.stateValue = "drained";
          this.view.showDrained();
          return;
        }
        this.currentJob = job;
        this.stateValue = "judging";
        this.view.showJob(job);
        return;
      } catch (error) {
        if (error instanceof ApiError) {
          this.view.showError(`queue error: ${error.message}`);
          this.stateValue = "idle";
          return;
        }
        this.view.showError("network failure, retrying");
        await this.sleep(delay);
        delay = Math.min(delay * 2, this.maxRetryDelayMs);
      }
    }
  }
}
