/**
 * Word-level diff for display: longest common subsequence over
 * space-separated tokens. Purely cosmetic — nothing downstream reads it.
 */

export type SpanKind = 'same' | 'added' | 'removed';

export interface DiffSpan {
  text: string;
  kind: SpanKind;
}

function tokens(text: string): string[] {
  return text.length === 0 ? [] : text.split(' ');
}

/**
 * Diff `before` -> `after` as token spans; adjacent tokens of the same kind
 * are merged into one span.
 */
export function wordDiff(before: string, after: string): DiffSpan[] {
  const a = tokens(before);
  const b = tokens(after);
  // lcs[i][j] = LCS length of a[i:], b[j:]
  const lcs: number[][] = Array.from({ length: a.length + 1 },
    () => new Array<number>(b.length + 1).fill(0));
  for (let i = a.length - 1; i >= 0; i--) {
    for (let j = b.length - 1; j >= 0; j--) {
      lcs[i][j] = a[i] === b[j]
        ? lcs[i + 1][j + 1] + 1
        : Math.max(lcs[i + 1][j], lcs[i][j + 1]);
    }
  }

  const raw: DiffSpan[] = [];
  let i = 0;
  let j = 0;
  while (i < a.length && j < b.length) {
    if (a[i] === b[j]) {
      raw.push({ text: a[i], kind: 'same' });
      i++; j++;
    } else if (lcs[i + 1][j] >= lcs[i][j + 1]) {
      raw.push({ text: a[i], kind: 'removed' });
      i++;
    } else {
      raw.push({ text: b[j], kind: 'added' });
      j++;
    }
  }
  for (; i < a.length; i++) raw.push({ text: a[i], kind: 'removed' });
  for (; j < b.length; j++) raw.push({ text: b[j], kind: 'added' });

  const merged: DiffSpan[] = [];
  for (const span of raw) {
    const last = merged[merged.length - 1];
    if (last && last.kind === span.kind) {
      last.text += ` ${span.text}`;
    } else {
      merged.push({ ...span });
    }
  }
  return merged;
}

/** Tokens of the left-hand side: same + removed spans, in order. */
export function beforeTokens(spans: DiffSpan[]): string[] {
  return spans.filter((s) => s.kind !== 'added').flatMap((s) => tokens(s.text));
}

/** Tokens of the right-hand side: same + added spans, in order. */
export function afterTokens(spans: DiffSpan[]): string[] {
  return spans.filter((s) => s.kind !== 'removed').flatMap((s) => tokens(s.text));
}
