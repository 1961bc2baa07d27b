/**
 * DOM wiring: load service state, render, and route edit gestures
 * through the pure state operations plus the debounced plan scheduler.
 */

import { ApiClient, type PlanBody, type PlanResponse } from "./api"
import { renderChart } from "./chart"
import { PlanScheduler } from "./scheduler"
import {
  EditRejected, type PlannerState, addIssue, applyPlanResponse,
  initialState, moveIssue, removeIssue, toPlanBody,
} from "./state"
import {
  renderCombos, renderComparison, renderEmptyPoolNotice, renderErrorBanner,
  renderIssuePool,
} from "./view"

const FUTURE_VERSIONS = ["6.0.0", "6.5.0", "6.5.1", "7.0.0", "7.5.0", "7.5.1"]

const api = new ApiClient()
let state: PlannerState | null = null
let historical: Awaited<ReturnType<ApiClient["releases"]>> | null = null

const el = (id: string) => document.getElementById(id)!

const scheduler = new PlanScheduler<PlanBody, PlanResponse>({
  send: body => api.plan(body),
  onResult: (body, response) => {
    if (!state) return
    state = applyPlanResponse(state, body, response)
    render()
  },
  onError: error => {
    const message = error instanceof Error ? error.message :
      typeof error === "object" && error && "message" in error
        ? String((error as { message: unknown }).message) : String(error)
    el("banner").innerHTML = renderErrorBanner(message)
  },
})

function replan(): void {
  if (state) scheduler.request(toPlanBody(state))
}

function render(): void {
  if (!state || !historical) return
  el("banner").innerHTML = state.issuePool.length === 0
    ? renderEmptyPoolNotice() : ""
  el("pool").innerHTML = renderIssuePool(
    state.issuePool.filter(issue =>
      !state!.combos.some(c =>
        c.releases.some(r => r.issueIds.includes(issue.id)))))
  el("combos").innerHTML = renderCombos(state)
  el("comparison").innerHTML = renderComparison(state)
  el("chart").innerHTML = renderChart({
    historical: historical.releases,
    combos: [...state.reports.values()],
    thresholdMs: state.thresholdMs,
  })
}

function flash(message: string): void {
  el("banner").innerHTML = renderErrorBanner(message)
  setTimeout(() => { el("banner").innerHTML = "" }, 2500)
}

function edit(fn: (s: PlannerState) => PlannerState): void {
  if (!state) return
  try {
    state = fn(state)
    render()
    replan()
  } catch (error) {
    if (error instanceof EditRejected) flash(error.message)
    else throw error
  }
}

function wireDragAndDrop(): void {
  document.addEventListener("dragstart", event => {
    const issue = (event.target as HTMLElement).closest?.("[data-issue]")
    if (issue && event instanceof DragEvent && event.dataTransfer) {
      event.dataTransfer.setData("text/issue", issue.getAttribute("data-issue")!)
    }
  })
  document.addEventListener("dragover", event => {
    if ((event.target as HTMLElement).closest?.("[data-version]")) {
      event.preventDefault()
    }
  })
  document.addEventListener("drop", event => {
    if (!(event instanceof DragEvent) || !event.dataTransfer) return
    const target = (event.target as HTMLElement).closest?.("[data-version]")
    const combo = (event.target as HTMLElement).closest?.("[data-combo]")
    const issueId = event.dataTransfer.getData("text/issue")
    if (!target || !issueId) return
    event.preventDefault()
    const version = target.getAttribute("data-version")!
    const label = combo?.getAttribute("data-combo") ?? state?.combos[0]?.label
    if (!label || !state) return
    const inCombo = state.combos.find(c => c.label === label)?.releases
      .some(r => r.issueIds.includes(issueId))
    edit(s => inCombo
      ? moveIssue(s, label, issueId, version)
      : addIssue(s, label, version, issueId))
  })
  document.addEventListener("dblclick", event => {
    const chip = (event.target as HTMLElement).closest?.(".chip[data-issue]")
    const combo = (event.target as HTMLElement).closest?.("[data-combo]")
    if (chip && combo) {
      edit(s => removeIssue(
        s, combo.getAttribute("data-combo")!, chip.getAttribute("data-issue")!))
    }
  })
}

async function load(): Promise<void> {
  try {
    const [releases, issues] = await Promise.all([
      api.releases(), api.unresolvedIssues(),
    ])
    historical = releases
    state = initialState(
      issues.issues, FUTURE_VERSIONS, releases.threshold_ms,
      releases.snapshot_version)
    render()
    scheduler.request(toPlanBody(state))
    scheduler.flush()
  } catch (error) {
    el("banner").innerHTML = renderErrorBanner(
      `Service unreachable: ${String(error)}`)
    el("banner").querySelector("[data-action=retry]")
      ?.addEventListener("click", () => void load())
  }
}

wireDragAndDrop()
void load()
