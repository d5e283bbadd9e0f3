/**
 * Application bootstrap: login panel (base URL, token, annotator id), the
 * Review / Discussion / Dashboard tabs, and the 1/2/3 verdict shortcuts.
 */

import { ApiClient } from './api.js';
import { StatsPoller } from './dashboard.js';
import { renderDashboard, renderDiscussion, renderReview, renderToasts } from './render.js';
import { DiscussionBoard, ReviewSession } from './state.js';
import type { VerdictToken } from './types.js';

type TabName = 'review' | 'discussion' | 'dashboard';

interface Config {
  baseUrl: string;
  token: string;
  annotatorId: string;
}

const CONFIG_KEY = 'geceval-ui-config';

function loadConfig(): Config | null {
  const raw = sessionStorage.getItem(CONFIG_KEY);
  if (!raw) return null;
  try {
    const parsed = JSON.parse(raw) as Partial<Config>;
    if (parsed.baseUrl !== undefined && parsed.annotatorId) {
      return { baseUrl: parsed.baseUrl, token: parsed.token ?? '', annotatorId: parsed.annotatorId };
    }
  } catch {
    sessionStorage.removeItem(CONFIG_KEY);
  }
  return null;
}

function byId(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

function startApp(config: Config): void {
  byId('login').hidden = true;
  byId('app').hidden = false;
  byId('whoami').textContent = config.annotatorId;

  const api = new ApiClient(config.baseUrl, config.token || undefined);
  const reviewPane = byId('review');
  const discussionPane = byId('discussion');
  const dashboardPane = byId('dashboard');
  const toastPane = byId('toasts');

  const submitVerdict = (verdict: VerdictToken) => void session.submit(verdict);
  const session = new ReviewSession(api, config.annotatorId, (s) => {
    renderReview(reviewPane, s, submitVerdict);
    renderToasts(toastPane, s.toasts, (id) => s.dismissToast(id));
  });
  const board = new DiscussionBoard(api, (b) => {
    renderDiscussion(discussionPane, b, (caseId, verdict) => void b.resolve(caseId, verdict));
  });
  const poller = new StatsPoller(api, (view) => renderDashboard(dashboardPane, view));

  let activeTab: TabName = 'review';
  const panes: Record<TabName, HTMLElement> = {
    review: reviewPane,
    discussion: discussionPane,
    dashboard: dashboardPane,
  };
  const showTab = (tab: TabName) => {
    activeTab = tab;
    for (const [name, pane] of Object.entries(panes)) {
      pane.hidden = name !== tab;
    }
    for (const button of document.querySelectorAll<HTMLButtonElement>('nav button')) {
      button.classList.toggle('active', button.dataset.tab === tab);
    }
    if (tab === 'review') void session.refresh();
    if (tab === 'discussion') void board.refresh();
  };
  for (const button of document.querySelectorAll<HTMLButtonElement>('nav button')) {
    button.addEventListener('click', () => showTab(button.dataset.tab as TabName));
  }

  // 1/2/3 map to Prefer A / Prefer B / Equally valid while reviewing
  const shortcuts: Record<string, VerdictToken> = { '1': 'OPTION_A', '2': 'OPTION_B', '3': 'TIE' };
  document.addEventListener('keydown', (event) => {
    if (activeTab !== 'review' || event.target instanceof HTMLInputElement) return;
    const verdict = shortcuts[event.key];
    if (verdict) submitVerdict(verdict);
  });

  poller.start();
  showTab('review');
}

function wireLogin(): void {
  const form = byId('login-form') as HTMLFormElement;
  form.addEventListener('submit', (event) => {
    event.preventDefault();
    const config: Config = {
      baseUrl: (byId('base-url') as HTMLInputElement).value.trim(),
      token: (byId('token') as HTMLInputElement).value.trim(),
      annotatorId: (byId('annotator-id') as HTMLInputElement).value.trim(),
    };
    if (!config.annotatorId) return;
    sessionStorage.setItem(CONFIG_KEY, JSON.stringify(config));
    startApp(config);
  });
}

document.addEventListener('DOMContentLoaded', () => {
  wireLogin();
  const saved = loadConfig();
  if (saved) startApp(saved);
});
