/**
 * Thin client for the adjudication service API.
 *
 * Configuration is limited to a base URL and a bearer token. Every case
 * payload passes through assertBlindedCase before it reaches the rest of
 * the app. fetch is injectable for tests.
 */

import {
  assertBlindedCase,
  type BlindedCase,
  type CaseStatus,
  type JudgmentAck,
  type ServiceStats,
  type VerdictToken,
} from './types.js';

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
    readonly code: string | null = null,
  ) {
    super(message);
  }
}

async function errorFrom(response: Response): Promise<ApiError> {
  let message = `HTTP ${response.status}`;
  let code: string | null = null;
  try {
    const body = await response.json();
    if (typeof body?.error === 'string') message = body.error;
    if (typeof body?.code === 'string') code = body.code;
  } catch {
    // non-JSON error body; keep the status line
  }
  return new ApiError(response.status, message, code);
}

export class ApiClient {
  private readonly fetchFn: FetchLike;

  constructor(
    private readonly baseUrl: string,
    private readonly token: string | null = null,
    fetchFn?: FetchLike,
  ) {
    this.fetchFn = fetchFn ?? ((url, init) => globalThis.fetch(url, init));
  }

  private headers(json = false): Record<string, string> {
    const headers: Record<string, string> = {};
    if (this.token) headers['Authorization'] = `Bearer ${this.token}`;
    if (json) headers['Content-Type'] = 'application/json';
    return headers;
  }

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    if (!response.ok && response.status !== 204) throw await errorFrom(response);
    return response;
  }

  /** Next case for this annotator, or null when their queue is empty. */
  async nextCase(annotatorId: string): Promise<BlindedCase | null> {
    const response = await this.request(
      `/api/queue/next?annotator_id=${encodeURIComponent(annotatorId)}`,
      { headers: this.headers() });
    if (response.status === 204) return null;
    return assertBlindedCase(await response.json());
  }

  /** Acks are {case_id, status} only; the case itself stays blinded server-side. */
  async submitJudgment(
    caseId: string, annotatorId: string, verdict: VerdictToken,
  ): Promise<JudgmentAck> {
    const response = await this.request(
      `/api/cases/${encodeURIComponent(caseId)}/judgment`,
      {
        method: 'POST',
        headers: this.headers(true),
        body: JSON.stringify({ annotator_id: annotatorId, verdict }),
      });
    return await response.json() as JudgmentAck;
  }

  async submitResolution(caseId: string, verdict: VerdictToken): Promise<JudgmentAck> {
    const response = await this.request(
      `/api/cases/${encodeURIComponent(caseId)}/resolution`,
      {
        method: 'POST',
        headers: this.headers(true),
        body: JSON.stringify({ verdict }),
      });
    return await response.json() as JudgmentAck;
  }

  async listCases(status?: CaseStatus): Promise<BlindedCase[]> {
    const query = status ? `?status=${encodeURIComponent(status)}` : '';
    const response = await this.request(`/api/cases${query}`,
      { headers: this.headers() });
    const body = await response.json();
    if (!Array.isArray(body?.cases)) {
      throw new ApiError(200, 'malformed case listing');
    }
    return (body.cases as unknown[]).map(assertBlindedCase);
  }

  async stats(): Promise<ServiceStats> {
    const response = await this.request('/api/stats', { headers: this.headers() });
    return await response.json() as ServiceStats;
  }
}
