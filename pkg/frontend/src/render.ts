/** DOM builders. All state lives in state.ts/dashboard.ts; this file only draws. */

import type { DashboardView } from './dashboard.js';
import { formatPct } from './dashboard.js';
import { wordDiff } from './diff.js';
import type { ReviewSession, Toast } from './state.js';
import type { DiscussionBoard } from './state.js';
import type { BlindedCase, VerdictToken } from './types.js';

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

/** One option panel: the candidate text with added/removed words vs the source marked. */
function optionPanel(title: string, source: string, candidate: string): HTMLElement {
  const panel = el('div', 'option-panel');
  panel.appendChild(el('h3', undefined, title));
  const body = el('p', 'option-text');
  for (const span of wordDiff(source, candidate)) {
    if (span.kind === 'removed') {
      body.appendChild(el('del', 'diff-removed', span.text));
    } else if (span.kind === 'added') {
      body.appendChild(el('ins', 'diff-added', span.text));
    } else {
      body.appendChild(document.createTextNode(span.text));
    }
    body.appendChild(document.createTextNode(' '));
  }
  panel.appendChild(body);
  return panel;
}

const VERDICT_BUTTONS: ReadonlyArray<{ label: string; hint: string; verdict: VerdictToken }> = [
  { label: 'Prefer A', hint: '1', verdict: 'OPTION_A' },
  { label: 'Prefer B', hint: '2', verdict: 'OPTION_B' },
  { label: 'Equally valid', hint: '3', verdict: 'TIE' },
];

export function renderCase(
  container: HTMLElement,
  current: BlindedCase,
  onVerdict: (verdict: VerdictToken) => void,
  disabled: boolean,
): void {
  container.replaceChildren();
  const meta = el('div', 'case-meta');
  meta.appendChild(el('span', 'case-id', `case ${current.case_id}`));
  meta.appendChild(el('span', 'case-status', current.status));
  container.appendChild(meta);

  const sourceBlock = el('div', 'source-block');
  sourceBlock.appendChild(el('h3', undefined, 'Source'));
  sourceBlock.appendChild(el('p', 'source-text', current.source));
  container.appendChild(sourceBlock);

  const panels = el('div', 'option-row');
  panels.appendChild(optionPanel('Option A', current.source, current.option_a));
  panels.appendChild(optionPanel('Option B', current.source, current.option_b));
  container.appendChild(panels);

  const buttons = el('div', 'verdict-row');
  for (const { label, hint, verdict } of VERDICT_BUTTONS) {
    const button = el('button', 'verdict-button');
    button.appendChild(el('span', 'key-hint', hint));
    button.appendChild(document.createTextNode(` ${label}`));
    button.disabled = disabled;
    button.addEventListener('click', () => onVerdict(verdict));
    buttons.appendChild(button);
  }
  container.appendChild(buttons);
}

export function renderReview(
  container: HTMLElement,
  session: ReviewSession,
  onVerdict: (verdict: VerdictToken) => void,
): void {
  if (session.current) {
    renderCase(container, session.current, onVerdict, session.busy);
  } else if (session.queueEmpty) {
    container.replaceChildren(el('p', 'empty-state', 'All cases complete.'));
  } else {
    container.replaceChildren(el('p', 'empty-state', session.busy ? 'Loading…' : 'No case loaded.'));
  }
}

export function renderToasts(
  container: HTMLElement,
  toasts: ReadonlyArray<Toast>,
  onDismiss: (id: number) => void,
): void {
  container.replaceChildren();
  for (const toast of toasts) {
    const node = el('div', 'toast', toast.message);
    node.addEventListener('click', () => onDismiss(toast.id));
    container.appendChild(node);
  }
}

export function renderDiscussion(
  container: HTMLElement,
  board: DiscussionBoard,
  onResolve: (caseId: string, verdict: VerdictToken) => void,
): void {
  container.replaceChildren();
  if (board.lastError) {
    container.appendChild(el('p', 'error-line', board.lastError));
  }
  if (board.cases.length === 0) {
    container.appendChild(el('p', 'empty-state', 'No cases awaiting discussion.'));
    return;
  }
  for (const item of board.cases) {
    const card = el('div', 'discussion-card');
    renderCase(card, item, (verdict) => onResolve(item.case_id, verdict), false);
    container.appendChild(card);
  }
}

function statRow(label: string, value: string): HTMLElement {
  const row = el('div', 'stat-row');
  row.appendChild(el('span', 'stat-label', label));
  row.appendChild(el('span', 'stat-value', value));
  return row;
}

export function renderDashboard(container: HTMLElement, view: DashboardView): void {
  container.replaceChildren();
  if (view.stale) {
    container.appendChild(el('div', 'stale-banner', 'Showing stale data — service unreachable.'));
  }
  const model = view.model;
  if (!model) {
    container.appendChild(el('p', 'empty-state', 'No stats yet.'));
    return;
  }
  container.appendChild(statRow('Total cases', String(model.totalCases)));
  container.appendChild(statRow('Finished', String(model.finished)));
  container.appendChild(statRow('Judge consensus', formatPct(model.consensusPct)));
  container.appendChild(statRow('Escalated to humans', formatPct(model.escalationPct)));
  container.appendChild(statRow('Workload reduction', formatPct(model.workloadReductionPct)));
  container.appendChild(statRow('Escalation progress', formatPct(model.escalationProgressPct)));
  for (const [status, count] of Object.entries(model.statusCounts)) {
    container.appendChild(statRow(status, String(count)));
  }
  const dist = el('div', 'distribution');
  dist.appendChild(el('h3', undefined, 'Final verdicts'));
  for (const row of model.distribution) {
    dist.appendChild(statRow(row.label, formatPct(row.pct)));
  }
  container.appendChild(dist);
  container.appendChild(statRow('Valid or preferred', formatPct(model.validOrPreferredPct)));
  if (model.judgeKappa !== null) {
    container.appendChild(statRow('Judge agreement (kappa)', model.judgeKappa.toFixed(4)));
  }
  if (model.humanKappa !== null) {
    container.appendChild(statRow('Human agreement (kappa)', model.humanKappa.toFixed(4)));
  }
}
