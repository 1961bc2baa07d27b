/**
 * Planner state and its pure edit operations.
 *
 * All mutations are local; the service is only consulted to re-project
 * (see scheduler.ts). Invariant: an issue appears at most once across
 * the releases of any single combo. Each operation returns a new state
 * or throws EditRejected, leaving the input untouched.
 */

import type { ComboReport, IssueRow, PlanBody, PlanResponse } from "./api"

export interface ComboDraft {
  label: string
  /** ordered future versions -> assigned issue ids */
  releases: { version: string; issueIds: string[] }[]
}

export interface PlannerState {
  issuePool: IssueRow[]
  combos: ComboDraft[]
  /** latest service reports keyed by combo label */
  reports: Map<string, ComboReport>
  /** service ranking (best first) from the last /api/plan response */
  ranking: string[]
  /** combos edited since the report they are displayed with */
  stale: Set<string>
  thresholdMs: number
  snapshotVersion: string
}

export class EditRejected extends Error {}

export function initialState(
  issuePool: IssueRow[],
  futureVersions: string[],
  thresholdMs: number,
  snapshotVersion: string,
): PlannerState {
  return {
    issuePool,
    combos: [{
      label: "Combo-1",
      releases: futureVersions.map(version => ({ version, issueIds: [] })),
    }],
    reports: new Map(),
    ranking: [],
    stale: new Set(),
    thresholdMs,
    snapshotVersion,
  }
}

function findCombo(state: PlannerState, label: string): ComboDraft {
  const combo = state.combos.find(c => c.label === label)
  if (!combo) throw new EditRejected(`no combo named ${label}`)
  return combo
}

function cloneCombo(combo: ComboDraft): ComboDraft {
  return {
    label: combo.label,
    releases: combo.releases.map(r => ({
      version: r.version,
      issueIds: [...r.issueIds],
    })),
  }
}

function replaceCombo(state: PlannerState, next: ComboDraft): PlannerState {
  return markStale({
    ...state,
    combos: state.combos.map(c => (c.label === next.label ? next : c)),
  }, next.label)
}

function markStale(state: PlannerState, label: string): PlannerState {
  const stale = new Set(state.stale)
  stale.add(label)
  return { ...state, stale }
}

export function comboHasIssue(combo: ComboDraft, issueId: string): boolean {
  return combo.releases.some(r => r.issueIds.includes(issueId))
}

export function addIssue(
  state: PlannerState, label: string, version: string, issueId: string,
): PlannerState {
  if (!state.issuePool.some(i => i.id === issueId)) {
    throw new EditRejected(`unknown issue ${issueId}`)
  }
  const combo = findCombo(state, label)
  if (comboHasIssue(combo, issueId)) {
    throw new EditRejected(`issue ${issueId} is already in ${label}`)
  }
  const next = cloneCombo(combo)
  const release = next.releases.find(r => r.version === version)
  if (!release) throw new EditRejected(`no release ${version} in ${label}`)
  release.issueIds.push(issueId)
  return replaceCombo(state, next)
}

export function removeIssue(
  state: PlannerState, label: string, issueId: string,
): PlannerState {
  const combo = findCombo(state, label)
  if (!comboHasIssue(combo, issueId)) {
    throw new EditRejected(`issue ${issueId} is not in ${label}`)
  }
  const next = cloneCombo(combo)
  for (const release of next.releases) {
    release.issueIds = release.issueIds.filter(id => id !== issueId)
  }
  return replaceCombo(state, next)
}

export function moveIssue(
  state: PlannerState, label: string, issueId: string, toVersion: string,
): PlannerState {
  const combo = findCombo(state, label)
  if (!comboHasIssue(combo, issueId)) {
    throw new EditRejected(`issue ${issueId} is not in ${label}`)
  }
  const next = cloneCombo(combo)
  for (const release of next.releases) {
    release.issueIds = release.issueIds.filter(id => id !== issueId)
  }
  const target = next.releases.find(r => r.version === toVersion)
  if (!target) throw new EditRejected(`no release ${toVersion} in ${label}`)
  target.issueIds.push(issueId)
  return replaceCombo(state, next)
}

export function renameCombo(
  state: PlannerState, label: string, newLabel: string,
): PlannerState {
  if (!newLabel || state.combos.some(c => c.label === newLabel)) {
    throw new EditRejected(`cannot rename ${label} to '${newLabel}'`)
  }
  const combo = cloneCombo(findCombo(state, label))
  combo.label = newLabel
  const reports = new Map(state.reports)
  const report = reports.get(label)
  reports.delete(label)
  if (report) reports.set(newLabel, report)
  const stale = new Set(state.stale)
  if (stale.delete(label)) stale.add(newLabel)
  return {
    ...state,
    combos: state.combos.map(c => (c.label === label ? combo : c)),
    reports,
    ranking: state.ranking.map(l => (l === label ? newLabel : l)),
    stale,
  }
}

export function cloneComboAs(
  state: PlannerState, label: string, newLabel: string,
): PlannerState {
  if (!newLabel || state.combos.some(c => c.label === newLabel)) {
    throw new EditRejected(`label '${newLabel}' is taken`)
  }
  const copy = cloneCombo(findCombo(state, label))
  copy.label = newLabel
  return markStale({ ...state, combos: [...state.combos, copy] }, newLabel)
}

/** The whole-combos request body for /api/plan. */
export function toPlanBody(state: PlannerState): PlanBody {
  return {
    combos: state.combos.map(c => ({
      label: c.label,
      releases: c.releases.map(r => ({
        version: r.version,
        issues: [...r.issueIds],
      })),
    })),
  }
}

/**
 * Fold a /api/plan response into the state. Only combos that were not
 * edited after `sent` was captured lose their stale mark, so displayed
 * numbers always correspond to the state that produced them.
 */
export function applyPlanResponse(
  state: PlannerState, sent: PlanBody, response: PlanResponse,
): PlannerState {
  const reports = new Map(state.reports)
  for (const report of response.combos) reports.set(report.combo, report)
  const stale = new Set(state.stale)
  for (const sentCombo of sent.combos) {
    const current = state.combos.find(c => c.label === sentCombo.label)
    if (current && JSON.stringify(toPlanCombo(current)) ===
        JSON.stringify(sentCombo)) {
      stale.delete(sentCombo.label)
    }
  }
  return {
    ...state,
    reports,
    ranking: response.ranking,
    stale,
    snapshotVersion: response.snapshot_version,
  }
}

function toPlanCombo(combo: ComboDraft) {
  return {
    label: combo.label,
    releases: combo.releases.map(r => ({
      version: r.version,
      issues: [...r.issueIds],
    })),
  }
}
