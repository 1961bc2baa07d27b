/**
 * Typed client for the rulcast planning service. The UI never computes
 * CPV, regressions or RUL itself — every displayed number comes from
 * one of these responses.
 */

export interface ReleaseRow {
  version: string
  ordinal: number
  delta_cpv: number
  cumulative_cpv: number
  measured_rt_ms: number
  cluster: number
}

export interface ReleasesResponse {
  snapshot_version: string
  releases: ReleaseRow[]
  threshold_ms: number
}

export interface IssueRow {
  id: string
  kind: string
  title: string
  description: string
  category: string | null
  subcategory: string | null
  impact_scale: string | null
  story_points: number | null
  sign: string
  resolved_release: string | null
}

export interface IssuesResponse {
  snapshot_version: string
  issues: IssueRow[]
}

export interface PlanReleaseBody {
  version: string
  issues: string[]
  delta_cpv?: number
}

export interface PlanComboBody {
  label: string
  releases: PlanReleaseBody[]
}

export interface PlanBody {
  combos: PlanComboBody[]
}

export interface ProjectedRelease {
  version: string
  delta_cpv: number
  cumulative_cpv: number
  cluster: number
  predicted_rt_ms: number
  extrapolated: boolean
  crossed: boolean
}

export interface ComboReport {
  combo: string
  threshold_ms: number
  releases: ProjectedRelease[]
  first_crossing: number | null
  rul_releases: number
  censored: boolean
}

export interface PlanResponse {
  snapshot_version: string
  ranking: string[]
  combos: ComboReport[]
}

export interface ClassifyResponse {
  snapshot_version: string
  story_points: number
  posterior: Record<string, number>
  category: string
  subcategory: string
}

export interface ApiError {
  status: number
  message: string
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>

async function asError(response: Response): Promise<ApiError> {
  let message = `HTTP ${response.status}`
  try {
    const body = await response.json()
    if (typeof body.error === "string") message = body.error
    else if (Array.isArray(body.errors)) {
      message = body.errors
        .map((e: { field?: string; message?: string }) =>
          `${e.field ?? "?"}: ${e.message ?? "invalid"}`)
        .join("; ")
    }
  } catch {
    // non-JSON error body; keep the status line
  }
  return { status: response.status, message }
}

/** Thin wrapper over fetch; inject a fake FetchLike in tests. */
export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async get<T>(path: string): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path)
    if (!response.ok) throw await asError(response)
    return response.json() as Promise<T>
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    })
    if (!response.ok) throw await asError(response)
    return response.json() as Promise<T>
  }

  releases(): Promise<ReleasesResponse> {
    return this.get("/api/releases")
  }

  unresolvedIssues(): Promise<IssuesResponse> {
    return this.get("/api/issues?status=unresolved")
  }

  plan(body: PlanBody): Promise<PlanResponse> {
    return this.post("/api/plan", body)
  }

  classify(text: string): Promise<ClassifyResponse> {
    return this.post("/api/classify", { text })
  }
}
