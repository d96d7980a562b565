// DOM wiring: binds the judge session and dashboard to index.html.
// Keyboard: R = relevant, I = irrelevant, E = escalate, G = guidelines.

import { AnnotationJob, ApiClient, Label } from "./api.js";
import { DashboardPoller, DashboardSnapshot } from "./dashboard.js";
import { JudgeSession, JudgeView, SessionCounts } from "./judge.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

function resolveMedia(base: string, uri: string): string {
  if (/^https?:/.test(uri)) return uri;
  return base.replace(/\/$/, "") + "/" + uri.replace(/^\//, "");
}

class DomView implements JudgeView {
  private readonly caption = el<HTMLElement>("caption-text");
  private readonly passBadge = el<HTMLElement>("pass-badge");
  private readonly video = el<HTMLVideoElement>("media");
  private readonly status = el<HTMLElement>("status-line");
  private readonly error = el<HTMLElement>("error-banner");
  private readonly counts = el<HTMLElement>("session-counts");
  private readonly relevantBtn = el<HTMLButtonElement>("btn-relevant");
  private readonly irrelevantBtn = el<HTMLButtonElement>("btn-irrelevant");

  constructor(private readonly baseUrl: string, private readonly onMediaStart: () => void) {
    this.video.addEventListener("loadstart", () => this.onMediaStart());
  }

  showJob(job: AnnotationJob): void {
    this.caption.textContent = job.caption_text || "(no caption text)";
    this.passBadge.textContent = `pass ${job.pass}`;
    this.status.textContent = `judging ${job.query_id} vs ${job.item_id}`;
    this.video.src = resolveMedia(this.baseUrl, job.media_uri);
    this.video.load();
  }

  showDrained(): void {
    this.caption.textContent = "Queue drained. Thank you!";
    this.passBadge.textContent = "";
    this.status.textContent = "no jobs remaining";
    this.video.removeAttribute("src");
  }

  showError(message: string): void {
    this.error.textContent = message;
    this.error.hidden = false;
  }

  clearError(): void {
    this.error.hidden = true;
  }

  setCounts(counts: SessionCounts): void {
    this.counts.textContent =
      `relevant ${counts.relevant} / irrelevant ${counts.irrelevant}` +
      ` / escalated ${counts.escalated}`;
  }

  setSubmittable(ready: boolean): void {
    this.relevantBtn.disabled = !ready;
    this.irrelevantBtn.disabled = !ready;
  }
}

function renderDashboard(snapshot: DashboardSnapshot): void {
  const progress = snapshot.progress;
  el("dash-progress").textContent =
    `${progress.resolved} resolved / ${progress.unresolved_pending} pending / ` +
    `${progress.escalated} escalated / ${progress.unlabeled} unlabeled ` +
    `of ${progress.total_pairs}`;
  const agreement = progress.agreement_so_far;
  el("dash-agreement").textContent =
    agreement === null ? "agreement: n/a" : `agreement: ${(agreement * 100).toFixed(1)}%`;
  if (snapshot.metrics) {
    el("dash-metric").textContent =
      `${snapshot.metrics.run} C@${snapshot.metrics.k}: ` +
      `${(snapshot.metrics.correct_at * 100).toFixed(1)}%`;
  }
  el("dash-stale").hidden = true;
}

async function boot(): Promise<void> {
  const baseUrl = window.location.origin;
  const raterId =
    window.localStorage.getItem("rater_id") ??
    window.prompt("rater id?", "rater-" + Math.random().toString(36).slice(2, 8)) ??
    "anonymous";
  window.localStorage.setItem("rater_id", raterId);
  el("rater-line").textContent = `rater: ${raterId}`;

  const client = new ApiClient(baseUrl);
  let session: JudgeSession;
  const view = new DomView(baseUrl, () => session.mediaStarted());
  session = new JudgeSession(client, view, { raterId });

  try {
    const guide = await client.guidelines();
    el("guidelines-body").textContent =
      guide.criterion + "\n\n" + guide.sensitive_categories;
  } catch {
    el("guidelines-body").textContent = "guidelines unavailable";
  }

  const params = new URLSearchParams(window.location.search);
  const dashboard = new DashboardPoller(client, {
    runTag: params.get("run") ?? undefined,
    k: Number(params.get("k") ?? "1"),
    onUpdate: renderDashboard,
    onStale: () => {
      el("dash-stale").hidden = false;
    },
  });
  dashboard.start();

  const act = (label: Label) => void session.decide(label);
  el<HTMLButtonElement>("btn-relevant").addEventListener("click", () => act("relevant"));
  el<HTMLButtonElement>("btn-irrelevant").addEventListener("click", () => act("irrelevant"));
  el<HTMLButtonElement>("btn-escalate").addEventListener("click", () => act("escalated"));
  el<HTMLButtonElement>("btn-guidelines").addEventListener("click", () => {
    const panel = el("guidelines-panel");
    panel.hidden = !panel.hidden;
  });

  document.addEventListener("keydown", (event) => {
    if (event.repeat || event.target instanceof HTMLInputElement) return;
    const key = event.key.toLowerCase();
    if (key === "r") act("relevant");
    else if (key === "i") act("irrelevant");
    else if (key === "e") act("escalated");
    else if (key === "g") el("guidelines-panel").hidden = !el("guidelines-panel").hidden;
  });

  await session.start();
}

boot().catch((error) => {
  document.body.textContent = `failed to start: ${error}`;
});
