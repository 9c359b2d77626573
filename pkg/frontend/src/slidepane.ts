// Slide pane: shows the stub slide for the current lecture time and turns
// a drag into the emulated pinch capture (which pauses the lecture).

import type { CaptureFlow } from "./capture.js";
import { paneToSlide, slideToPane } from "./mapping.js";
import { drawSlideForTime } from "./slides.js";

export class SlidePane {
  private liveRect: [number, number, number, number] | null = null;
  private currentTime = 0;
  private dragging = false;

  constructor(
    private canvas: HTMLCanvasElement,
    private capture: CaptureFlow,
    private clockPlaying: () => boolean,
  ) {
    canvas.addEventListener("pointerdown", (e) => {
      canvas.setPointerCapture(e.pointerId);
      this.dragging = true;
      this.capture.beginDrag(this.slideCoords(e), this.clockPlaying());
    });
    canvas.addEventListener("pointermove", (e) => {
      if (this.dragging) {
        this.capture.moveDrag(this.slideCoords(e));
      }
    });
    canvas.addEventListener("pointerup", (e) => {
      if (this.dragging) {
        this.dragging = false;
        this.capture.endDrag(this.slideCoords(e));
      }
    });
  }

  private slideCoords(e: PointerEvent): [number, number] {
    const rect = this.canvas.getBoundingClientRect();
    const x = ((e.clientX - rect.left) / rect.width) * this.canvas.width;
    const y = ((e.clientY - rect.top) / rect.height) * this.canvas.height;
    return paneToSlide(this.canvas.width, this.canvas.height, x, y);
  }

  /** Rect in slide coordinates, as acknowledged by the service. */
  showRect(rect: [number, number, number, number] | null): void {
    this.liveRect = rect;
    this.render(this.currentTime);
  }

  render(tS: number): void {
    this.currentTime = tS;
    const ctx = this.canvas.getContext("2d")!;
    drawSlideForTime(ctx, this.canvas.width, this.canvas.height, tS);
    if (this.liveRect) {
      const [u0, v0, u1, v1] = this.liveRect;
      const [x0, y0] = slideToPane(this.canvas.width, this.canvas.height, u0, v1);
      const [x1, y1] = slideToPane(this.canvas.width, this.canvas.height, u1, v0);
      ctx.strokeStyle = "#c0392b";
      ctx.lineWidth = 2;
      ctx.setLineDash([6, 4]);
      ctx.strokeRect(x0, y0, x1 - x0, y1 - y0);
      ctx.setLineDash([]);
    }
  }
}
