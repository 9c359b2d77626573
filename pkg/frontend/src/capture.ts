// Slide-capture state machine: a drag on the slide pane emulates the
// two-hand pinch (pause), dragging fine-tunes the area, releasing captures,
// and a glue sketch on the page embeds the picture (resume). Cancelling
// re-issues play only when the capture itself caused the pause.

import { dragToPinchPayload } from "./mapping.js";

export type EnqueueFn = (kind: string, payload?: Record<string, unknown>) => number;

export type CapturePhase = "idle" | "pinching" | "awaiting-glue";

export class CaptureFlow {
  private phase: CapturePhase = "idle";
  private startCorner: [number, number] | null = null;
  private wasPlaying = false;

  constructor(private enqueue: EnqueueFn) {}

  get state(): CapturePhase {
    return this.phase;
  }

  beginDrag(corner: [number, number], clockPlaying: boolean): void {
    this.phase = "pinching";
    this.startCorner = corner;
    this.wasPlaying = clockPlaying;
    this.enqueue("pinch-start", dragToPinchPayload(corner, nudge(corner)));
  }

  moveDrag(corner: [number, number]): void {
    if (this.phase !== "pinching" || !this.startCorner) {
      return;
    }
    this.enqueue("pinch-move", dragToPinchPayload(this.startCorner, corner));
  }

  endDrag(corner: [number, number]): void {
    if (this.phase !== "pinching" || !this.startCorner) {
      return;
    }
    this.enqueue("pinch-move", dragToPinchPayload(this.startCorner, corner));
    this.enqueue("unpinch");
    this.phase = "awaiting-glue";
    this.startCorner = null;
  }

  /** Glue sketch on the page; the service embeds and resumes the clock. */
  sketch(pointsMm: [number, number][]): boolean {
    if (this.phase !== "awaiting-glue" || pointsMm.length === 0) {
      return false;
    }
    this.enqueue("glue-sketch", { points_mm: pointsMm });
    this.phase = "idle";
    return true;
  }

  /** Abandon the capture; resumes only if the capture paused a playing clock. */
  cancel(): void {
    if (this.phase === "idle") {
      return;
    }
    if (this.phase === "pinching") {
      // finish the pinch so the session leaves its pinch state, then discard
      this.enqueue("unpinch");
    }
    if (this.wasPlaying) {
      this.enqueue("clock-play");
    }
    this.phase = "idle";
    this.startCorner = null;
  }
}

function nudge(corner: [number, number]): [number, number] {
  // a pinch pair needs nonzero extent; the first move refines it anyway
  return [corner[0] + 0.02, corner[1] + 0.02];
}
