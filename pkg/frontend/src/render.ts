// Pure HTML/SVG string renderers, kept free of DOM access so they are
// directly testable under node.

import type {
  BottleneckRow,
  GrowthRow,
  LoopStatus,
  SectionRow,
} from './types.js';

export function escapeHtml(value: string): string {
  return value
    .replaceAll('&', '&amp;')
    .replaceAll('<', '&lt;')
    .replaceAll('>', '&gt;')
    .replaceAll('"', '&quot;');
}

export function renderStatus(status: LoopStatus): string {
  const checker = status.last_checker_result;
  const checkerText = checker
    ? `${checker.status}${checker.backup != null ? ` (bck${checker.backup})` : ''}`
    : 'none yet';
  const cells = [
    ['last backup', String(status.last_backup_number)],
    ['checker', checkerText],
    ['items', String(status.total_items)],
    ['admits', String(status.admit_count)],
    ['recursive admits', String(status.recadmit_count)],
    ['pending overrides', String(status.pending_overrides)],
    ['loop', status.paused ? 'PAUSED' : 'running'],
    ['last injection', status.last_injection_at ?? 'never'],
  ];
  const body = cells
    .map(([label, value]) => `<div class="stat"><span>${escapeHtml(label)}</span><strong>${escapeHtml(value)}</strong></div>`)
    .join('');
  return `<div class="status-grid">${body}</div>`;
}

export function renderSections(rows: SectionRow[]): string {
  const body = rows
    .map(
      (row) =>
        `<tr class="level-${row.level}"><td>§${row.section}</td>` +
        `<td>${escapeHtml(row.level)}</td>` +
        `<td>${row.stated}/${row.total}</td>` +
        `<td>${row.proved}/${row.total}</td></tr>`,
    )
    .join('');
  return (
    '<table class="sections"><thead><tr>' +
    '<th>section</th><th>level</th><th>stated</th><th>proved</th>' +
    `</tr></thead><tbody>${body}</tbody></table>`
  );
}

export function renderBottlenecks(rows: BottleneckRow[]): string {
  if (rows.length === 0) {
    return '<p class="empty">no admitted items — nothing is blocked</p>';
  }
  const body = rows
    .map(
      (row) =>
        `<li><code>${escapeHtml(row.name)}</code>` +
        `<span class="blocked">blocks ${row.blocked_count}</span></li>`,
    )
    .join('');
  return `<ul class="bottlenecks">${body}</ul>`;
}

const CHART_W = 640;
const CHART_H = 220;
const PAD = 36;

export function renderGrowthChart(rows: GrowthRow[]): string {
  if (rows.length === 0) {
    return '<p class="empty">no backups yet</p>';
  }
  const xs = rows.map((r) => r.number);
  const ys = rows.map((r) => r.lines);
  const xMin = Math.min(...xs);
  const xMax = Math.max(...xs);
  const yMax = Math.max(...ys, 1);
  const sx = (x: number) =>
    xMax === xMin ? CHART_W / 2 : PAD + ((x - xMin) / (xMax - xMin)) * (CHART_W - 2 * PAD);
  const sy = (y: number) => CHART_H - PAD - (y / yMax) * (CHART_H - 2 * PAD);

  const points = rows.map((r) => `${sx(r.number).toFixed(1)},${sy(r.lines).toFixed(1)}`);
  const circles = rows
    .map(
      (r) =>
        `<circle cx="${sx(r.number).toFixed(1)}" cy="${sy(r.lines).toFixed(1)}" r="3">` +
        `<title>bck${r.number}: ${r.lines} lines</title></circle>`,
    )
    .join('');
  return (
    `<svg class="growth" viewBox="0 0 ${CHART_W} ${CHART_H}" role="img">` +
    `<polyline fill="none" points="${points.join(' ')}" />` +
    circles +
    `<text x="${PAD}" y="${CHART_H - 8}">bck${xMin}</text>` +
    `<text x="${CHART_W - PAD}" y="${CHART_H - 8}" text-anchor="end">bck${xMax}</text>` +
    `<text x="4" y="${PAD}" class="ymax">${yMax} lines</text>` +
    '</svg>'
  );
}

export function renderBanner(lastSeen: string | null): string {
  const when = lastSeen ? `last seen ${escapeHtml(lastSeen)}` : 'never reached';
  return `<div class="banner">harness unreachable — showing stale data (${when}); controls disabled</div>`;
}
