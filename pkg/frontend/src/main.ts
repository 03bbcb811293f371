// DOM wiring: poll the harness on a fixed cadence and reflect its state.
// Configure via query parameters: ?api=http://127.0.0.1:8777&secret=...&poll=10

import { ApiError, DashboardApi } from './api.js';
import {
  renderBanner,
  renderBottlenecks,
  renderGrowthChart,
  renderSections,
  renderStatus,
} from './render.js';
import type { LoopStatus } from './types.js';

const params = new URLSearchParams(window.location.search);
const apiBase = params.get('api') ?? 'http://127.0.0.1:8777';
const secret = params.get('secret') ?? '';
const pollSeconds = Number(params.get('poll') ?? '10');
const stride = Number(params.get('stride') ?? '1');

const api = new DashboardApi(apiBase, secret);

const el = (id: string) => document.getElementById(id)!;

let lastSeen: string | null = null;

function setControlsEnabled(enabled: boolean): void {
  for (const id of ['override-send', 'pause', 'resume', 'override-text']) {
    (el(id) as HTMLButtonElement | HTMLTextAreaElement).disabled = !enabled;
  }
}

function showConfirmation(message: string, status?: LoopStatus): void {
  const extra = status ? ` — pending overrides: ${status.pending_overrides}` : '';
  el('confirmation').textContent = `${message}${extra}`;
}

async function refresh(): Promise<void> {
  try {
    const [status, sections, bottlenecks, growth] = await Promise.all([
      api.getStatus(),
      api.getSections(),
      api.getBottlenecks(),
      api.getGrowth(stride),
    ]);
    lastSeen = new Date().toISOString();
    el('banner').innerHTML = '';
    el('status').innerHTML = renderStatus(status);
    el('sections').innerHTML = renderSections(sections.sections);
    el('bottlenecks').innerHTML = renderBottlenecks(bottlenecks.rows);
    el('growth').innerHTML = renderGrowthChart(growth.rows);
    setControlsEnabled(true);
    (el('pause') as HTMLButtonElement).disabled = status.paused;
    (el('resume') as HTMLButtonElement).disabled = !status.paused;
  } catch {
    el('banner').innerHTML = renderBanner(lastSeen);
    setControlsEnabled(false);
  }
}

async function sendOverride(): Promise<void> {
  const box = el('override-text') as HTMLTextAreaElement;
  const text = box.value.trim();
  if (!text) {
    showConfirmation('override text is empty');
    return;
  }
  try {
    const { status } = await api.postOverride(text);
    box.value = '';
    showConfirmation('override queued', status);
    el('status').innerHTML = renderStatus(status);
  } catch (err) {
    showConfirmation(err instanceof ApiError ? `rejected: ${err.message}` : 'request failed');
  }
}

async function setPaused(paused: boolean): Promise<void> {
  try {
    const { status } = paused ? await api.postPause() : await api.postResume();
    showConfirmation(paused ? 'loop paused' : 'loop resumed', status);
    el('status').innerHTML = renderStatus(status);
    (el('pause') as HTMLButtonElement).disabled = status.paused;
    (el('resume') as HTMLButtonElement).disabled = !status.paused;
  } catch (err) {
    showConfirmation(err instanceof ApiError ? `rejected: ${err.message}` : 'request failed');
  }
}

el('override-send').addEventListener('click', () => void sendOverride());
el('pause').addEventListener('click', () => void setPaused(true));
el('resume').addEventListener('click', () => void setPaused(false));

void refresh();
window.setInterval(() => void refresh(), pollSeconds * 1000);
