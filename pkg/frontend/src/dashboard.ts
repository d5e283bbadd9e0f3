/**
 * Dashboard view model + polling loop for /api/stats.
 *
 * The service mixes conventions: consensus/escalation/workload figures are
 * fractions of 1, while the final distribution and valid-or-preferred are
 * already percentages. The model normalises everything to percent so the
 * renderer only ever formats.
 */

import { ApiClient } from './api.js';
import type { ServiceStats } from './types.js';

export interface DistributionRow {
  label: string;
  pct: number;
}

export interface DashboardModel {
  totalCases: number;
  finished: number;
  statusCounts: Record<string, number>;
  consensusPct: number;
  escalationPct: number;
  workloadReductionPct: number;
  /** share of escalated cases resolved so far; 0 < x < 100 while mid-run */
  escalationProgressPct: number;
  distribution: DistributionRow[];
  validOrPreferredPct: number;
  judgeKappa: number | null;
  humanKappa: number | null;
}

const DISTRIBUTION_LABELS: Record<string, string> = {
  ModelPreferred: 'Model preferred',
  GoldPreferred: 'Gold preferred',
  EquallyValid: 'Equally valid',
};

export function dashboardModel(stats: ServiceStats): DashboardModel {
  const distribution = Object.entries(stats.final_distribution)
    .map(([key, pct]) => ({ label: DISTRIBUTION_LABELS[key] ?? key, pct }))
    .sort((a, b) => b.pct - a.pct || a.label.localeCompare(b.label));
  return {
    totalCases: stats.total_cases,
    finished: stats.finished,
    statusCounts: stats.status_counts,
    consensusPct: stats.consensus_rate * 100,
    escalationPct: stats.escalation_rate * 100,
    workloadReductionPct: stats.workload_reduction * 100,
    escalationProgressPct: stats.escalation_progress * 100,
    distribution,
    validOrPreferredPct: stats.valid_or_preferred,
    judgeKappa: stats.judge_kappa ? stats.judge_kappa.kappa : null,
    humanKappa: stats.human_kappa ? stats.human_kappa.kappa : null,
  };
}

export function formatPct(value: number): string {
  return `${value.toFixed(2)}%`;
}

export interface DashboardView {
  model: DashboardModel | null;
  /** true when the last poll failed and `model` is older data */
  stale: boolean;
}

/**
 * Polls stats on an interval. A failed fetch keeps the previous model and
 * raises the stale flag instead of blanking the dashboard.
 */
export class StatsPoller {
  private view: DashboardView = { model: null, stale: false };
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly onUpdate: (view: DashboardView) => void,
    private readonly intervalMs = 5000,
  ) {}

  async poll(): Promise<DashboardView> {
    try {
      const stats = await this.api.stats();
      this.view = { model: dashboardModel(stats), stale: false };
    } catch {
      this.view = { model: this.view.model, stale: true };
    }
    this.onUpdate(this.view);
    return this.view;
  }

  start(): void {
    if (this.timer !== null) return;
    void this.poll();
    this.timer = setInterval(() => void this.poll(), this.intervalMs);
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }
}
