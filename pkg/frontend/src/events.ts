// Ordered event pipeline: a client-side seq counter, one in-flight batch at
// a time, and retry on network failure. A retried batch may contain events
// the server already applied; those come back as "duplicate" and count as
// acknowledged, so a dropped response never duplicates a stroke.

import type { BatchResponse, EventResult, OutgoingEvent } from "./api.js";

export type BatchSender = (events: OutgoingEvent[]) => Promise<BatchResponse>;

export interface QueueCallbacks {
  onApplied?: (result: EventResult, kind: string) => void;
  onRejected?: (result: EventResult, kind: string) => void;
  onClock?: (clock: BatchResponse["clock"]) => void;
  onError?: (error: unknown) => void;
}

interface PendingEvent extends OutgoingEvent {
  kindForCallback: string;
}

export class EventQueue {
  private seq = 0;
  private pending: PendingEvent[] = [];
  private inflight = false;

  constructor(
    private send: BatchSender,
    private callbacks: QueueCallbacks = {},
    private maxBatch = 64,
  ) {}

  get nextSeq(): number {
    return this.seq + 1;
  }

  get pendingCount(): number {
    return this.pending.length;
  }

  enqueue(kind: string, payload: Record<string, unknown> = {}): number {
    this.seq += 1;
    this.pending.push({ seq: this.seq, kind, payload, kindForCallback: kind });
    return this.seq;
  }

  /** Send pending batches until the queue drains; safe to call repeatedly. */
  async flush(): Promise<void> {
    if (this.inflight) {
      return;
    }
    this.inflight = true;
    try {
      while (this.pending.length > 0) {
        const batch = this.pending.slice(0, this.maxBatch);
        let response: BatchResponse;
        try {
          response = await this.send(
            batch.map(({ seq, kind, payload }) => ({ seq, kind, payload })),
          );
        } catch (error) {
          // network drop: keep the batch queued; the next flush retries it
          this.callbacks.onError?.(error);
          return;
        }
        const acked = new Set<number>();
        for (const result of response.results) {
          const source = batch.find((e) => e.seq === result.seq);
          if (result.status === "applied" || result.status === "duplicate") {
            acked.add(result.seq);
            this.callbacks.onApplied?.(result, source?.kindForCallback ?? "");
          } else if (result.status === "rejected") {
            acked.add(result.seq);
            this.callbacks.onRejected?.(result, source?.kindForCallback ?? "");
          }
          // "gap" stays queued: an earlier batch must land first
        }
        this.pending = this.pending.filter((e) => !acked.has(e.seq));
        this.callbacks.onClock?.(response.clock);
        if (acked.size === 0) {
          return; // nothing progressed; avoid a hot loop
        }
      }
    } finally {
      this.inflight = false;
    }
  }
}
