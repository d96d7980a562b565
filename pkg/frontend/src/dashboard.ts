// Live progress + metric polling for the dashboard panel.

import { ApiClient, MetricsFragment, Progress } from "./api.js";

export interface DashboardSnapshot {
  progress: Progress;
  metrics: MetricsFragment | null;
}

export interface DashboardOptions {
  runTag?: string;
  k?: number;
  intervalMs?: number;
  onUpdate: (snapshot: DashboardSnapshot) => void;
  onStale: (error: unknown) => void;
}

export class DashboardPoller {
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private readonly client: ApiClient,
    private readonly options: DashboardOptions,
  ) {}

  /** One poll; throws on failure so callers can render a stale banner. */
  async refresh(): Promise<DashboardSnapshot> {
    const progress = await this.client.progress();
    let metrics: MetricsFragment | null = null;
    if (this.options.runTag) {
      metrics = await this.client.metrics(this.options.runTag, this.options.k ?? 1);
    }
    return { progress, metrics };
  }

  start(): void {
    const tick = () => {
      this.refresh()
        .then((snapshot) => this.options.onUpdate(snapshot))
        .catch((error) => this.options.onStale(error));
    };
    tick();
    this.timer = setInterval(tick, this.options.intervalMs ?? 3000);
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }
}
