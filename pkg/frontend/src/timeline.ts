// Lecture timeline: a scrubber showing the service clock plus a strip of
// stub slide previews, so times can be eyeballed against slide content.
// Dragging seeks; the displayed position only ever comes from the service.

import type { ClockView } from "./api.js";
import { formatTime, secondsToTimelineX, slideIndexForTime, timelineToSeconds } from "./mapping.js";
import { drawStubSlide } from "./slides.js";

export class Timeline {
  private clock: ClockView = { playing: false, position_s: 0, duration_s: 1 };
  private dragging = false;

  constructor(
    private bar: HTMLCanvasElement,
    private preview: HTMLCanvasElement,
    private label: HTMLElement,
    private onSeek: (tS: number) => void,
    private onTogglePlay: () => void,
    private playButton: HTMLButtonElement,
  ) {
    bar.addEventListener("pointerdown", (e) => {
      this.dragging = true;
      bar.setPointerCapture(e.pointerId);
      this.seekFromEvent(e);
    });
    bar.addEventListener("pointermove", (e) => {
      if (this.dragging) {
        this.seekFromEvent(e);
      }
    });
    bar.addEventListener("pointerup", () => {
      this.dragging = false;
    });
    playButton.addEventListener("click", () => this.onTogglePlay());
    this.renderPreview();
  }

  private seekFromEvent(e: PointerEvent): void {
    const rect = this.bar.getBoundingClientRect();
    const x = ((e.clientX - rect.left) / rect.width) * this.bar.width;
    this.onSeek(timelineToSeconds(this.bar.width, x, this.clock.duration_s));
  }

  setClock(clock: ClockView): void {
    this.clock = clock;
    this.label.textContent =
      `${formatTime(clock.position_s)} / ${formatTime(clock.duration_s)}` +
      (clock.playing ? "" : " (paused)");
    this.playButton.textContent = clock.playing ? "pause" : "play";
    this.render();
  }

  get current(): ClockView {
    return this.clock;
  }

  private render(): void {
    const ctx = this.bar.getContext("2d")!;
    const { width, height } = this.bar;
    ctx.clearRect(0, 0, width, height);
    ctx.fillStyle = "#ddd6c4";
    ctx.fillRect(0, height / 3, width, height / 3);
    const x = secondsToTimelineX(width, this.clock.position_s, this.clock.duration_s);
    ctx.fillStyle = "#2d6a8f";
    ctx.fillRect(0, height / 3, x, height / 3);
    ctx.beginPath();
    ctx.arc(x, height / 2, height / 2.6, 0, Math.PI * 2);
    ctx.fillStyle = this.clock.playing ? "#2d6a8f" : "#8a8a8a";
    ctx.fill();
  }

  private renderPreview(): void {
    const ctx = this.preview.getContext("2d")!;
    const { width, height } = this.preview;
    const count = 8;
    const cellW = width / count;
    for (let i = 0; i < count; i++) {
      ctx.save();
      ctx.translate(i * cellW + 2, 2);
      const cellCtx = ctx;
      drawStubMini(cellCtx, cellW - 4, height - 4, i);
      ctx.restore();
    }
  }

  /** Slide index currently on screen, for the slide pane. */
  slideIndex(): number {
    return slideIndexForTime(this.clock.position_s);
  }
}

function drawStubMini(ctx: CanvasRenderingContext2D, w: number, h: number, index: number): void {
  drawStubSlide(ctx, w, h, index);
}
