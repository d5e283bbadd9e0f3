/**
 * Types mirroring the adjudication service's JSON payloads.
 *
 * The case shape is deliberately narrow: the server only ever sends the five
 * blinded fields, and `assertBlindedCase` enforces that at the client
 * boundary so an accidentally-widened server response fails loudly instead
 * of silently unblinding annotators.
 */

export type CaseStatus =
  | 'PendingLLM'
  | 'ConsensusFinal'
  | 'PendingHuman'
  | 'PendingDiscussion'
  | 'Resolved';

/** The exact verdict tokens the API accepts; never re-interpreted client-side. */
export type VerdictToken = 'OPTION_A' | 'OPTION_B' | 'TIE';

export const VERDICT_TOKENS: readonly VerdictToken[] = ['OPTION_A', 'OPTION_B', 'TIE'];

export interface BlindedCase {
  case_id: string;
  source: string;
  option_a: string;
  option_b: string;
  status: CaseStatus;
}

export const BLINDED_FIELDS: readonly string[] = [
  'case_id', 'source', 'option_a', 'option_b', 'status',
];

/** What judgment/resolution POSTs return: the case's new status, nothing more. */
export interface JudgmentAck {
  case_id: string;
  status: CaseStatus;
}

export interface AgreementStats {
  kappa: number;
  observed_agreement: number;
  expected_agreement: number;
  n: number;
}

export interface ServiceStats {
  total_cases: number;
  status_counts: Record<CaseStatus, number>;
  consensus_rate: number;
  escalation_rate: number;
  workload_reduction: number;
  escalation_progress: number;
  finished: number;
  final_distribution: Record<string, number>;
  valid_or_preferred: number;
  judge_kappa: AgreementStats | null;
  human_kappa: AgreementStats | null;
}

/** Field names that would identify which option is which; must never appear. */
const IDENTITY_FIELD = /gold|model|panel|verdict|raw|final/i;

export class BlindingViolation extends Error {}

/**
 * Validate a case payload from the wire: exactly the five blinded fields,
 * nothing that smells like an identity or provenance field.
 */
export function assertBlindedCase(payload: unknown): BlindedCase {
  if (payload === null || typeof payload !== 'object' || Array.isArray(payload)) {
    throw new BlindingViolation(`case payload is not an object: ${JSON.stringify(payload)}`);
  }
  const keys = Object.keys(payload as object).sort();
  const expected = [...BLINDED_FIELDS].sort();
  for (const key of keys) {
    if (IDENTITY_FIELD.test(key)) {
      throw new BlindingViolation(`identity field "${key}" in case payload`);
    }
  }
  if (keys.length !== expected.length || keys.some((k, i) => k !== expected[i])) {
    throw new BlindingViolation(
      `case payload fields [${keys.join(', ')}] != [${expected.join(', ')}]`);
  }
  const record = payload as Record<string, unknown>;
  for (const field of BLINDED_FIELDS) {
    if (field === 'status') continue;
    if (typeof record[field] !== 'string') {
      throw new BlindingViolation(`case field "${field}" is not a string`);
    }
  }
  return payload as unknown as BlindedCase;
}
