// Stub lecture slides: deterministic placeholder artwork per slide index.
// Real lecture media is out of scope; these exist so the slide pane, the
// preview strip, and embedded picture crops have something to show.

import { SLIDE_HALF_H, SLIDE_HALF_W, slideIndexForTime } from "./mapping.js";

const PALETTE = ["#2d6a8f", "#8f2d5f", "#4f8f2d", "#8f6a2d", "#5f2d8f", "#2d8f86"];

export function drawStubSlide(
  ctx: CanvasRenderingContext2D,
  w: number,
  h: number,
  slideIndex: number,
): void {
  const hue = PALETTE[slideIndex % PALETTE.length];
  ctx.fillStyle = "#f8f6f0";
  ctx.fillRect(0, 0, w, h);
  ctx.fillStyle = hue;
  ctx.fillRect(0, 0, w, h * 0.16);
  ctx.fillStyle = "#ffffff";
  ctx.font = `${Math.round(h * 0.09)}px sans-serif`;
  ctx.textBaseline = "middle";
  ctx.fillText(`Slide ${slideIndex + 1}`, w * 0.04, h * 0.08);

  ctx.fillStyle = "#3a3a3a";
  const lines = 4 + (slideIndex % 3);
  for (let i = 0; i < lines; i++) {
    const y = h * (0.26 + i * 0.13);
    const width = w * (0.5 + 0.35 * Math.abs(Math.sin(slideIndex * 2.3 + i)));
    ctx.fillRect(w * 0.06, y, width, h * 0.035);
  }
  ctx.strokeStyle = hue;
  ctx.lineWidth = 2;
  ctx.strokeRect(1, 1, w - 2, h - 2);
}

export function drawSlideForTime(
  ctx: CanvasRenderingContext2D,
  w: number,
  h: number,
  tS: number,
): number {
  const index = slideIndexForTime(tS);
  drawStubSlide(ctx, w, h, index);
  return index;
}

/**
 * Render the cropped region of a captured slide into a picture's box.
 * crop is (u_min, v_min, u_max, v_max) in slide coordinates (meters).
 */
export function drawSlideCrop(
  ctx: CanvasRenderingContext2D,
  crop: [number, number, number, number],
  frameTimeS: number,
  x: number,
  y: number,
  w: number,
  h: number,
): void {
  const full = document.createElement("canvas");
  full.width = 320;
  full.height = 180;
  const fullCtx = full.getContext("2d")!;
  drawSlideForTime(fullCtx, full.width, full.height, frameTimeS);

  const [u0, v0, u1, v1] = crop;
  const sx = ((u0 + SLIDE_HALF_W) / (2 * SLIDE_HALF_W)) * full.width;
  const sw = ((u1 - u0) / (2 * SLIDE_HALF_W)) * full.width;
  const syTop = ((SLIDE_HALF_H - v1) / (2 * SLIDE_HALF_H)) * full.height;
  const sh = ((v1 - v0) / (2 * SLIDE_HALF_H)) * full.height;
  ctx.drawImage(full, sx, syTop, Math.max(sw, 1), Math.max(sh, 1), x, y, w, h);
  ctx.strokeStyle = "#888";
  ctx.strokeRect(x, y, w, h);
}
