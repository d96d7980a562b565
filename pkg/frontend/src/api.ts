// Typed client for the annotation service HTTP API.

export type Label = "relevant" | "irrelevant" | "escalated";

export interface AnnotationJob {
  job_id: string;
  query_id: string;
  item_id: string;
  caption_text: string;
  media_uri: string;
  pass: number;
}

export interface Progress {
  total_pairs: number;
  resolved: number;
  unresolved_pending: number;
  escalated: number;
  unlabeled: number;
  agreement_so_far: number | null;
}

export interface MetricsFragment {
  run: string;
  k: number;
  correct_at: number;
  recall_at: number;
  avg_prec: number;
  mean_first_pos_rank: number | null;
  n_evaluated: number;
  n_no_positive: number;
}

export interface Guidelines {
  criterion: string;
  sensitive_categories: string;
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Non-2xx response. status 409 means the lease is gone; refetch silently. */
export class ApiError extends Error {
  constructor(public readonly status: number, message: string) {
    super(message);
    this.name = "ApiError";
  }
}

async function expectOk(response: Response): Promise<Response> {
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = (await response.json()) as { detail?: string };
      if (body.detail) detail = body.detail;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(response.status, detail);
  }
  return response;
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/$/, "") + path;
  }

  /** Next job for this rater, or null when the queue is drained (204). */
  async nextJob(raterId: string): Promise<AnnotationJob | null> {
    const response = await this.fetchFn(
      this.url(`/api/queue/next?rater_id=${encodeURIComponent(raterId)}`),
    );
    if (response.status === 204) return null;
    await expectOk(response);
    return (await response.json()) as AnnotationJob;
  }

  async submitLabel(jobId: string, raterId: string, label: Label): Promise<void> {
    const response = await this.fetchFn(this.url("/api/labels"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ job_id: jobId, rater_id: raterId, label }),
    });
    await expectOk(response);
  }

  async progress(): Promise<Progress> {
    const response = await expectOk(await this.fetchFn(this.url("/api/progress")));
    return (await response.json()) as Progress;
  }

  async metrics(run: string, k: number): Promise<MetricsFragment> {
    const response = await expectOk(
      await this.fetchFn(
        this.url(`/api/metrics?run=${encodeURIComponent(run)}&k=${k}`),
      ),
    );
    return (await response.json()) as MetricsFragment;
  }

  async guidelines(): Promise<Guidelines> {
    const response = await expectOk(await this.fetchFn(this.url("/api/guidelines")));
    return (await response.json()) as Guidelines;
  }
}
