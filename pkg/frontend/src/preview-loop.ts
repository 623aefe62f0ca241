/** Rate-limited, latest-wins preview scheduling.
 *
 * Parameter tuning fires a request per keystroke; the loop coalesces them so
 * at most one request is in flight and at most `maxPerSecond` leave the
 * client, and a response is delivered only if it belongs to the newest
 * request (stale responses are discarded by id).
 */

export interface ScheduledResult<R> {
  id: number;
  result: R;
}

export class PreviewLoop<Q, R> {
  private nextId = 0;
  private latestId = 0;
  private pending: Q | null = null;
  private inFlight = false;
  private lastSent = 0;
  private timer: ReturnType<typeof setTimeout> | null = null;
  readonly minIntervalMs: number;

  constructor(
    private send: (req: Q) => Promise<R>,
    private deliver: (res: R, error: unknown | null) => void,
    maxPerSecond = 4,
    private now: () => number = () => Date.now(),
  ) {
    this.minIntervalMs = Math.ceil(1000 / maxPerSecond);
  }

  /** Queue a request; newer calls supersede anything not yet sent. */
  schedule(req: Q): number {
    this.latestId = ++this.nextId;
    this.pending = req;
    this.pump();
    return this.latestId;
  }

  private pump(): void {
    if (this.inFlight || this.pending === null) return;
    const wait = this.lastSent + this.minIntervalMs - this.now();
    if (wait > 0) {
      if (this.timer === null) {
        this.timer = setTimeout(() => {
          this.timer = null;
          this.pump();
        }, wait);
      }
      return;
    }
    const id = this.latestId;
    const req = this.pending;
    this.pending = null;
    this.inFlight = true;
    this.lastSent = this.now();
    this.send(req).then(
      (res) => this.settle(id, res, null),
      (err) => this.settle(id, null, err),
    );
  }

  private settle(id: number, res: R | null, err: unknown | null): void {
    this.inFlight = false;
    if (id === this.latestId) {
      // only the newest request's outcome reaches the UI
      this.deliver(res as R, err);
    }
    this.pump();
  }
}
