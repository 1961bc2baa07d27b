/**
 * Debounced, latest-wins re-query loop: edits request a re-plan, the
 * request fires once the edits settle (300 ms), and a response is
 * dropped if a newer request has been issued since.
 */

export interface SchedulerOptions<TBody, TResponse> {
  debounceMs?: number
  send: (body: TBody) => Promise<TResponse>
  /** Called with the response and the body that produced it. */
  onResult: (body: TBody, response: TResponse) => void
  onError?: (error: unknown) => void
  setTimer?: (fn: () => void, ms: number) => ReturnType<typeof setTimeout>
  clearTimer?: (handle: ReturnType<typeof setTimeout>) => void
}

export class PlanScheduler<TBody, TResponse> {
  private readonly debounceMs: number
  private timer: ReturnType<typeof setTimeout> | null = null
  private pendingBody: TBody | null = null
  private generation = 0
  private inFlight = 0

  constructor(private readonly options: SchedulerOptions<TBody, TResponse>) {
    this.debounceMs = options.debounceMs ?? 300
  }

  /** Number of requests currently awaiting a response. */
  get inFlightCount(): number {
    return this.inFlight
  }

  /** Schedule a re-plan; coalesces with any not-yet-fired request. */
  request(body: TBody): void {
    this.pendingBody = body
    const set = this.options.setTimer ?? setTimeout
    const clear = this.options.clearTimer ?? clearTimeout
    if (this.timer !== null) clear(this.timer)
    this.timer = set(() => this.fire(), this.debounceMs)
  }

  /** Bypass the debounce (initial load). */
  flush(): void {
    if (this.timer !== null) {
      const clear = this.options.clearTimer ?? clearTimeout
      clear(this.timer)
      this.timer = null
    }
    this.fire()
  }

  private fire(): void {
    this.timer = null
    const body = this.pendingBody
    if (body === null) return
    this.pendingBody = null
    const myGeneration = ++this.generation
    this.inFlight += 1
    this.options.send(body).then(
      response => {
        this.inFlight -= 1
        if (myGeneration === this.generation) {
          this.options.onResult(body, response)
        }
      },
      error => {
        this.inFlight -= 1
        if (myGeneration === this.generation) {
          this.options.onError?.(error)
        }
      },
    )
  }
}
