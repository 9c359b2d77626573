// Pure coordinate mappings shared by the canvas views, kept DOM-free so
// they are unit-testable: page mm <-> pixels, slide pane pixels <-> slide
// coordinates, and the emulated 3D pinch pair for slide captures.

export const PAGE_WIDTH_MM = 210;
export const PAGE_HEIGHT_MM = 297;

// Must mirror the service's default slide screen and a seated viewer:
// slide plane center (0, 1.2, 0.5), u axis +x, v axis +z, extents 0.8 x 0.45.
export const SLIDE_HALF_W = 0.8;
export const SLIDE_HALF_H = 0.45;
const SLIDE_CENTER = [0, 1.2, 0.5] as const;
const EYE = [0, 0, 0.5] as const;
// pinch points sit halfway between the eye and the slide along each ray
const PINCH_DEPTH_FRACTION = 0.5;

export const HEAD_POSE = {
  eye: [...EYE],
  forward: [0, 1, 0],
  up: [0, 0, 1],
};

export interface PageTransform {
  scale: number; // px per mm
  offsetX: number;
  offsetY: number;
}

export function fitPageTransform(canvasW: number, canvasH: number): PageTransform {
  const scale = Math.min(canvasW / PAGE_WIDTH_MM, canvasH / PAGE_HEIGHT_MM);
  return {
    scale,
    offsetX: (canvasW - PAGE_WIDTH_MM * scale) / 2,
    offsetY: (canvasH - PAGE_HEIGHT_MM * scale) / 2,
  };
}

export function pageToPx(t: PageTransform, xMm: number, yMm: number): [number, number] {
  return [t.offsetX + xMm * t.scale, t.offsetY + yMm * t.scale];
}

export function pxToPage(t: PageTransform, x: number, y: number): [number, number] {
  return [(x - t.offsetX) / t.scale, (y - t.offsetY) / t.scale];
}

export function clampToPage(xMm: number, yMm: number): [number, number] {
  return [
    Math.min(Math.max(xMm, 0), PAGE_WIDTH_MM),
    Math.min(Math.max(yMm, 0), PAGE_HEIGHT_MM),
  ];
}

/** Slide-pane pixel -> slide-plane coordinates (meters, origin at center). */
export function paneToSlide(
  paneW: number,
  paneH: number,
  px: number,
  py: number,
): [number, number] {
  const u = (px / paneW - 0.5) * 2 * SLIDE_HALF_W;
  const v = (0.5 - py / paneH) * 2 * SLIDE_HALF_H; // pane y grows downward
  return [u, v];
}

export function slideToPane(
  paneW: number,
  paneH: number,
  u: number,
  v: number,
): [number, number] {
  return [
    (u / (2 * SLIDE_HALF_W) + 0.5) * paneW,
    (0.5 - v / (2 * SLIDE_HALF_H)) * paneH,
  ];
}

function pinchPoint(u: number, v: number): number[] {
  const target = [
    SLIDE_CENTER[0] + u,
    SLIDE_CENTER[1],
    SLIDE_CENTER[2] + v,
  ];
  return target.map((c, i) => EYE[i] + (c - EYE[i]) * PINCH_DEPTH_FRACTION);
}

/**
 * Two drag corners on the slide pane become the two pinched fingertips at a
 * fixed virtual depth; rays from the eye through them hit the slide exactly
 * at the dragged corners, so the captured area equals the dragged area.
 */
export function dragToPinchPayload(
  a: [number, number],
  b: [number, number],
): Record<string, unknown> {
  return {
    left: pinchPoint(a[0], a[1]),
    right: pinchPoint(b[0], b[1]),
    head: {
      eye: [...HEAD_POSE.eye],
      forward: [...HEAD_POSE.forward],
      up: [...HEAD_POSE.up],
    },
  };
}

export function timelineToSeconds(barWidth: number, x: number, durationS: number): number {
  const frac = Math.min(Math.max(x / barWidth, 0), 1);
  return frac * durationS;
}

export function secondsToTimelineX(barWidth: number, t: number, durationS: number): number {
  if (durationS <= 0) {
    return 0;
  }
  return Math.min(Math.max(t / durationS, 0), 1) * barWidth;
}

export function formatTime(seconds: number): string {
  const s = Math.max(0, Math.floor(seconds));
  const m = Math.floor(s / 60);
  return `${m}:${(s % 60).toString().padStart(2, "0")}`;
}

/** Stable stub slide index for a lecture time; one slide per half minute. */
export function slideIndexForTime(tS: number): number {
  return Math.floor(Math.max(0, tS) / 30);
}
