/**
 * SVG trajectory chart: solid historical RT polyline, dashed projection
 * polyline per combo, horizontal threshold line. Pure string builder so
 * it is testable without a DOM.
 */

import type { ComboReport, ReleaseRow } from "./api"

export interface ChartInput {
  historical: ReleaseRow[]
  combos: ComboReport[]
  thresholdMs: number
  width?: number
  height?: number
}

const PALETTE = ["#2563eb", "#db2777", "#059669", "#d97706", "#7c3aed"]
const MARGIN = { top: 16, right: 16, bottom: 28, left: 56 }

function fmt(value: number): string {
  return Number(value.toFixed(2)).toString()
}

export function renderChart(input: ChartInput): string {
  const width = input.width ?? 720
  const height = input.height ?? 320
  const innerW = width - MARGIN.left - MARGIN.right
  const innerH = height - MARGIN.top - MARGIN.bottom

  const historicalN = input.historical.length
  const horizon = Math.max(
    0, ...input.combos.map(c => c.releases.length))
  const steps = Math.max(historicalN + horizon - 1, 1)

  const rts = [
    input.thresholdMs,
    ...input.historical.map(r => r.measured_rt_ms),
    ...input.combos.flatMap(c => c.releases.map(r => r.predicted_rt_ms)),
  ]
  const maxRt = Math.max(...rts) * 1.05
  const x = (step: number) => MARGIN.left + (step / steps) * innerW
  const y = (rt: number) => MARGIN.top + innerH - (rt / maxRt) * innerH

  const parts: string[] = []
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${width} ${height}" ` +
    `role="img" aria-label="response time trajectory">`)

  const ty = y(input.thresholdMs)
  parts.push(
    `<line class="threshold" x1="${fmt(MARGIN.left)}" y1="${fmt(ty)}" ` +
    `x2="${fmt(width - MARGIN.right)}" y2="${fmt(ty)}" stroke="#dc2626" ` +
    `stroke-dasharray="2 3"/>`)

  const historicalPts = input.historical
    .map((r, i) => `${fmt(x(i))},${fmt(y(r.measured_rt_ms))}`)
    .join(" ")
  if (historicalN > 0) {
    parts.push(
      `<polyline class="historical" points="${historicalPts}" fill="none" ` +
      `stroke="#111827" stroke-width="2"/>`)
  }

  input.combos.forEach((combo, idx) => {
    const color = PALETTE[idx % PALETTE.length]
    const start = historicalN > 0
      ? [`${fmt(x(historicalN - 1))},` +
         `${fmt(y(input.historical[historicalN - 1].measured_rt_ms))}`]
      : []
    const pts = start.concat(combo.releases.map((r, i) =>
      `${fmt(x(historicalN + i))},${fmt(y(r.predicted_rt_ms))}`))
    parts.push(
      `<polyline class="projection" data-combo="${combo.combo}" ` +
      `points="${pts.join(" ")}" fill="none" stroke="${color}" ` +
      `stroke-width="2" stroke-dasharray="6 4"/>`)
  })

  for (let i = 0; i < historicalN; i++) {
    parts.push(
      `<circle cx="${fmt(x(i))}" cy="${fmt(y(input.historical[i].measured_rt_ms))}" ` +
      `r="2.5" fill="#111827"/>`)
  }

  parts.push(
    `<text x="${fmt(MARGIN.left)}" y="${fmt(ty - 4)}" fill="#dc2626" ` +
    `font-size="11">${fmt(input.thresholdMs)} ms</text>`)
  parts.push("</svg>")
  return parts.join("")
}
