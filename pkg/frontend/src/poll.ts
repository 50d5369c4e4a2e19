/**
 * Interval polling with overlap protection: the next tick is only
 * scheduled after the previous refresh settles, so a slow server never
 * stacks requests. Good enough at desk scale; no push channel needed.
 */

export interface Poller {
  start(): void
  stop(): void
  readonly running: boolean
}

export function createPoller(
  refresh: () => Promise<void>,
  intervalMs: number,
  onError: (error: unknown) => void = () => {},
): Poller {
  let timer: ReturnType<typeof setTimeout> | undefined
  let active = false

  async function tick(): Promise<void> {
    try {
      await refresh()
    } catch (error) {
      onError(error)
    }
    if (active) {
      timer = setTimeout(tick, intervalMs)
    }
  }

  return {
    start() {
      if (active) {
        return
      }
      active = true
      timer = setTimeout(tick, intervalMs)
    },
    stop() {
      active = false
      if (timer !== undefined) {
        clearTimeout(timer)
        timer = undefined
      }
    },
    get running() {
      return active
    },
  }
}
