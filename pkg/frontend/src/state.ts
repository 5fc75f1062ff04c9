/** Request-flow utilities enforcing the UI's concurrency contract:
 *  at most one request in flight, and the rendered state always reflects
 *  the most recent input, never a stale response. */

/** Trailing-edge debounce. Rapid calls collapse into one invocation with
 *  the latest arguments after `delayMs` of quiet. */
export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  delayMs: number,
): { (...args: A): void; cancel(): void } {
  let timer: ReturnType<typeof setTimeout> | null = null;
  const wrapped = (...args: A) => {
    if (timer !== null) clearTimeout(timer);
    timer = setTimeout(() => {
      timer = null;
      fn(...args);
    }, delayMs);
  };
  wrapped.cancel = () => {
    if (timer !== null) clearTimeout(timer);
    timer = null;
  };
  return wrapped;
}

/**
 * Serializes an async task: while one run is in flight, newer submissions
 * replace each other and only the latest executes afterwards. The task sees
 * the freshest arguments, and completion order equals submission order, so
 * whatever rendered last corresponds to the latest completed request.
 */
export class SingleFlight<A> {
  private inFlight = false;
  private pending: A | null = null;
  private settled: Promise<void> = Promise.resolve();
  private resolveSettled: (() => void) | null = null;

  constructor(private readonly run: (args: A) => Promise<void>) {}

  submit(args: A): void {
    if (this.inFlight) {
      this.pending = args;
      return;
    }
    this.inFlight = true;
    if (this.resolveSettled === null) {
      this.settled = new Promise((resolve) => {
        this.resolveSettled = resolve;
      });
    }
    void this.run(args)
      .catch(() => {
        // the task owns its error handling; never break the chain
      })
      .finally(() => {
        this.inFlight = false;
        const next = this.pending;
        this.pending = null;
        if (next !== null) {
          this.submit(next);
        } else {
          this.resolveSettled?.();
          this.resolveSettled = null;
        }
      });
  }

  get busy(): boolean {
    return this.inFlight;
  }

  /** Resolves once every submitted request has completed (test hook). */
  idle(): Promise<void> {
    return this.settled;
  }
}
