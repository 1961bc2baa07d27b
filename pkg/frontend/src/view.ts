/**
 * HTML fragment builders for the planner: issue pool, combo editors
 * with RUL badges, and the ranked comparison table. Pure functions over
 * PlannerState so every displayed number is traceable to a service
 * response (or shown as pending).
 */

import type { ComboReport, IssueRow } from "./api"
import type { ComboDraft, PlannerState } from "./state"

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
}

export function rulBadge(report: ComboReport | undefined, stale: boolean): string {
  if (!report) return `<span class="badge pending">RUL —</span>`
  const staleClass = stale ? " stale" : ""
  if (report.censored) {
    return `<span class="badge censored${staleClass}">RUL &gt; ` +
      `${report.rul_releases}</span>`
  }
  return `<span class="badge${staleClass}">RUL ${report.rul_releases}</span>`
}

export function renderIssuePool(issues: IssueRow[]): string {
  const rows = issues.map(issue => {
    const sp = issue.story_points ?? "?"
    return `<li class="issue" draggable="true" data-issue="${esc(issue.id)}">` +
      `<strong>${esc(issue.id)}</strong> ${esc(issue.title)} ` +
      `<em>${esc(issue.impact_scale ?? "")} · SP ${sp} · ${esc(issue.sign)}</em></li>`
  })
  return `<ul class="issue-pool">${rows.join("")}</ul>`
}

export function renderCombo(
  combo: ComboDraft,
  report: ComboReport | undefined,
  stale: boolean,
): string {
  const projected = new Map(
    (report?.releases ?? []).map(r => [r.version, r]))
  const releases = combo.releases.map(release => {
    const projection = projected.get(release.version)
    const rt = projection && !stale
      ? `${projection.predicted_rt_ms.toFixed(0)} ms` +
        (projection.crossed ? " ⚠" : "")
      : "…"
    const issues = release.issueIds.map(id =>
      `<span class="chip" data-issue="${esc(id)}">${esc(id)}</span>`).join("")
    return `<div class="release" data-version="${esc(release.version)}">` +
      `<span class="version">${esc(release.version)}</span>` +
      `<span class="issues">${issues}</span>` +
      `<span class="rt">${rt}</span></div>`
  })
  return `<section class="combo" data-combo="${esc(combo.label)}">` +
    `<header><h3>${esc(combo.label)}</h3>${rulBadge(report, stale)}</header>` +
    `${releases.join("")}</section>`
}

export function renderCombos(state: PlannerState): string {
  return state.combos
    .map(combo => renderCombo(
      combo, state.reports.get(combo.label), state.stale.has(combo.label)))
    .join("")
}

/** Ranked comparison; the top (service-ranked) combo is the recommendation. */
export function renderComparison(state: PlannerState): string {
  if (state.ranking.length === 0) {
    return `<p class="empty">No projection yet.</p>`
  }
  const rows = state.ranking.map((label, index) => {
    const report = state.reports.get(label)
    if (!report) return ""
    const last = report.releases[report.releases.length - 1]
    const finalRt = last ? last.predicted_rt_ms.toFixed(0) : "—"
    const rul = report.censored
      ? `&gt; ${report.rul_releases}` : `${report.rul_releases}`
    const mark = index === 0 ? ` class="recommended"` : ""
    return `<tr${mark}><td>${index + 1}</td><td>${esc(label)}</td>` +
      `<td>${rul}</td><td>${finalRt}</td>` +
      `<td>${report.censored ? "no" : "yes"}</td></tr>`
  })
  return `<table class="comparison"><thead><tr><th>#</th><th>Combo</th>` +
    `<th>RUL (releases)</th><th>Final RT (ms)</th><th>Crosses</th></tr>` +
    `</thead><tbody>${rows.join("")}</tbody></table>`
}

export function renderErrorBanner(message: string): string {
  return `<div class="banner error">${esc(message)} ` +
    `<button data-action="retry">Retry</button></div>`
}

export function renderEmptyPoolNotice(): string {
  return `<div class="banner notice">No unresolved issues — nothing to plan.` +
    `</div>`
}
