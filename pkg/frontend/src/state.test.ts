import { describe, expect, it } from "vitest"

import type { ComboReport, IssueRow, PlanResponse } from "./api"
import {
  EditRejected, addIssue, applyPlanResponse, cloneComboAs, initialState,
  moveIssue, removeIssue, renameCombo, toPlanBody,
} from "./state"

const FUTURES = ["6.0.0", "6.5.0", "6.5.1"]

function issue(id: string): IssueRow {
  return {
    id, kind: "fault", title: id, description: id, category: null,
    subcategory: null, impact_scale: "major", story_points: 3, sign: "+",
    resolved_release: null,
  }
}

function freshState() {
  return initialState([issue("U1"), issue("U2")], FUTURES, 9000, "v1")
}

function report(combo: string, rul: number): ComboReport {
  return {
    combo, threshold_ms: 9000, releases: [], first_crossing: rul,
    rul_releases: rul, censored: false,
  }
}

describe("edit operations", () => {
  it("adds an issue to a release", () => {
    const next = addIssue(freshState(), "Combo-1", "6.0.0", "U1")
    expect(next.combos[0].releases[0].issueIds).toEqual(["U1"])
    expect(next.stale.has("Combo-1")).toBe(true)
  })

  it("rejects a duplicate issue anywhere in the same combo", () => {
    const withU1 = addIssue(freshState(), "Combo-1", "6.0.0", "U1")
    expect(() => addIssue(withU1, "Combo-1", "6.5.0", "U1"))
      .toThrow(EditRejected)
    expect(() => addIssue(withU1, "Combo-1", "6.0.0", "U1"))
      .toThrow(EditRejected)
  })

  it("rejects unknown issues and releases, leaving state untouched", () => {
    const state = freshState()
    expect(() => addIssue(state, "Combo-1", "6.0.0", "ghost"))
      .toThrow(EditRejected)
    expect(() => addIssue(state, "Combo-1", "9.9.9", "U1"))
      .toThrow(EditRejected)
    expect(state.combos[0].releases.every(r => r.issueIds.length === 0))
      .toBe(true)
  })

  it("moves an issue between releases of one combo", () => {
    let state = addIssue(freshState(), "Combo-1", "6.0.0", "U1")
    state = moveIssue(state, "Combo-1", "U1", "6.5.1")
    expect(state.combos[0].releases[0].issueIds).toEqual([])
    expect(state.combos[0].releases[2].issueIds).toEqual(["U1"])
  })

  it("removes an issue back to the pool", () => {
    let state = addIssue(freshState(), "Combo-1", "6.0.0", "U1")
    state = removeIssue(state, "Combo-1", "U1")
    expect(state.combos[0].releases[0].issueIds).toEqual([])
    expect(() => removeIssue(state, "Combo-1", "U1")).toThrow(EditRejected)
  })

  it("allows the same issue in different combos", () => {
    let state = cloneComboAs(freshState(), "Combo-1", "Combo-2")
    state = addIssue(state, "Combo-1", "6.0.0", "U1")
    state = addIssue(state, "Combo-2", "6.5.0", "U1")
    expect(state.combos[1].releases[1].issueIds).toEqual(["U1"])
  })

  it("renames a combo and carries its report/ranking entries along", () => {
    let state = freshState()
    state = {
      ...state,
      reports: new Map([["Combo-1", report("Combo-1", 4)]]),
      ranking: ["Combo-1"],
    }
    state = renameCombo(state, "Combo-1", "Plan A")
    expect(state.combos[0].label).toBe("Plan A")
    expect(state.reports.get("Plan A")?.rul_releases).toBe(4)
    expect(state.ranking).toEqual(["Plan A"])
    expect(() => renameCombo(state, "Plan A", "")).toThrow(EditRejected)
  })
})

describe("plan request/response round trip", () => {
  it("serializes all combos whole", () => {
    let state = cloneComboAs(freshState(), "Combo-1", "Combo-2")
    state = addIssue(state, "Combo-1", "6.0.0", "U1")
    const body = toPlanBody(state)
    expect(body.combos.map(c => c.label)).toEqual(["Combo-1", "Combo-2"])
    expect(body.combos[0].releases[0]).toEqual({
      version: "6.0.0", issues: ["U1"],
    })
  })

  it("clears the stale mark only for combos unchanged since the request", () => {
    let state = addIssue(freshState(), "Combo-1", "6.0.0", "U1")
    const sent = toPlanBody(state)
    // A second edit lands while the request is in flight.
    state = addIssue(state, "Combo-1", "6.5.0", "U2")
    const response: PlanResponse = {
      snapshot_version: "v1",
      ranking: ["Combo-1"],
      combos: [report("Combo-1", 2)],
    }
    const next = applyPlanResponse(state, sent, response)
    expect(next.reports.get("Combo-1")?.rul_releases).toBe(2)
    expect(next.stale.has("Combo-1")).toBe(true)

    const settledBody = toPlanBody(next)
    const settled = applyPlanResponse(next, settledBody, response)
    expect(settled.stale.has("Combo-1")).toBe(false)
  })

  it("adopts the service ranking verbatim", () => {
    const state = freshState()
    const response: PlanResponse = {
      snapshot_version: "v2",
      ranking: ["B", "A"],
      combos: [report("B", 5), report("A", 1)],
    }
    const next = applyPlanResponse(state, toPlanBody(state), response)
    expect(next.ranking).toEqual(["B", "A"])
    expect(next.snapshotVersion).toBe("v2")
  })
})
