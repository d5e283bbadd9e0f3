/**
 * Review-queue session: fetch next case, submit a verdict, advance.
 *
 * Optimistic but server-authoritative: a 409 (someone else moved the case
 * first) or 404 becomes a toast plus an automatic queue refresh, never a
 * blocking failure. The UI re-renders from `onChange` snapshots.
 */

import { ApiClient, ApiError } from './api.js';
import type { BlindedCase, VerdictToken } from './types.js';

export interface Toast {
  message: string;
  // monotonically increasing id so the renderer can expire old toasts
  id: number;
}

export class ReviewSession {
  current: BlindedCase | null = null;
  queueEmpty = false;
  busy = false;
  toasts: Toast[] = [];
  private toastSeq = 0;

  constructor(
    private readonly api: ApiClient,
    readonly annotatorId: string,
    private readonly onChange: (session: ReviewSession) => void = () => {},
  ) {}

  private notify(): void {
    this.onChange(this);
  }

  private toast(message: string): void {
    this.toasts.push({ message, id: ++this.toastSeq });
    if (this.toasts.length > 4) this.toasts.shift();
    this.notify();
  }

  dismissToast(id: number): void {
    this.toasts = this.toasts.filter((t) => t.id !== id);
    this.notify();
  }

  /** Pull the next case for this annotator (or the all-done state). */
  async refresh(): Promise<void> {
    this.busy = true;
    this.notify();
    try {
      const next = await this.api.nextCase(this.annotatorId);
      this.current = next;
      this.queueEmpty = next === null;
    } catch (err) {
      this.current = null;
      this.toast(err instanceof Error ? err.message : String(err));
    } finally {
      this.busy = false;
      this.notify();
    }
  }

  /**
   * Post the chosen verdict for the current case and advance. The queue also
   * hands out PendingDiscussion cases; a verdict on one of those is the
   * discussion's joint resolution, not a third individual judgment. Conflicts
   * (another annotator or a stale case) surface as toasts and trigger a
   * refresh; the server remains the source of truth.
   */
  async submit(verdict: VerdictToken): Promise<void> {
    if (!this.current || this.busy) return;
    const caseId = this.current.case_id;
    const inDiscussion = this.current.status === 'PendingDiscussion';
    this.busy = true;
    this.notify();
    try {
      if (inDiscussion) {
        await this.api.submitResolution(caseId, verdict);
      } else {
        await this.api.submitJudgment(caseId, this.annotatorId, verdict);
      }
    } catch (err) {
      if (err instanceof ApiError && (err.status === 409 || err.status === 404)) {
        this.toast(`case ${caseId}: ${err.message}`);
      } else {
        this.toast(err instanceof Error ? err.message : String(err));
        this.busy = false;
        this.notify();
        return; // transport-level failure: keep the case on screen
      }
    } finally {
      this.busy = false;
    }
    await this.refresh();
  }
}

/** Discussion queue: cases whose two verdicts disagreed, awaiting resolution. */
export class DiscussionBoard {
  cases: BlindedCase[] = [];
  lastError: string | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly onChange: (board: DiscussionBoard) => void = () => {},
  ) {}

  async refresh(): Promise<void> {
    try {
      this.cases = await this.api.listCases('PendingDiscussion');
      this.lastError = null;
    } catch (err) {
      this.lastError = err instanceof Error ? err.message : String(err);
    }
    this.onChange(this);
  }

  async resolve(caseId: string, verdict: VerdictToken): Promise<void> {
    try {
      await this.api.submitResolution(caseId, verdict);
      await this.refresh();
    } catch (err) {
      const message = err instanceof Error ? err.message : String(err);
      // refresh the stale list, but keep the failure visible
      await this.refresh();
      this.lastError = message;
      this.onChange(this);
    }
  }
}
