// The note page: renders the service's authoritative strokes and pictures,
// echoes the in-progress stroke locally, and reports pointer gestures to
// the app, which turns them into session events.

import type { PageData } from "./api.js";
import {
  clampToPage,
  fitPageTransform,
  pageToPx,
  pxToPage,
  type PageTransform,
} from "./mapping.js";
import { drawSlideCrop } from "./slides.js";

export interface PagePointerHandlers {
  onStrokeBegin(xMm: number, yMm: number): void;
  onStrokePoint(xMm: number, yMm: number): void;
  onStrokeEnd(): void;
  onErase(xMm: number, yMm: number): void;
  onSelectRect(x0: number, y0: number, x1: number, y1: number): void;
  onMove(dxMm: number, dyMm: number): void;
  onSketch(points: [number, number][]): void;
}

type DragMode = "stroke" | "erase" | "select" | "move" | "sketch" | null;

const STROKE_COLORS: Record<string, string> = {
  pen: "#1b2a4a",
  "marker-highlight": "rgba(250, 200, 40, 0.55)",
};

export class PageView {
  private transform: PageTransform;
  private data: PageData | null = null;
  private live: [number, number][] = [];
  private dragMode: DragMode = null;
  private dragStart: [number, number] = [0, 0];
  private dragLast: [number, number] = [0, 0];
  private selectionBox: [number, number, number, number] | null = null;
  tool = "stylus";

  constructor(
    private canvas: HTMLCanvasElement,
    private handlers: PagePointerHandlers,
  ) {
    this.transform = fitPageTransform(canvas.width, canvas.height);
    canvas.addEventListener("pointerdown", (e) => this.pointerDown(e));
    canvas.addEventListener("pointermove", (e) => this.pointerMove(e));
    canvas.addEventListener("pointerup", (e) => this.pointerUp(e));
    canvas.addEventListener("pointerleave", (e) => this.pointerUp(e));
  }

  setPage(data: PageData): void {
    this.data = data;
    this.render();
  }

  private eventMm(e: PointerEvent): [number, number] {
    const rect = this.canvas.getBoundingClientRect();
    const x = ((e.clientX - rect.left) / rect.width) * this.canvas.width;
    const y = ((e.clientY - rect.top) / rect.height) * this.canvas.height;
    const [mx, my] = pxToPage(this.transform, x, y);
    return clampToPage(mx, my);
  }

  private pointerDown(e: PointerEvent): void {
    this.canvas.setPointerCapture(e.pointerId);
    const p = this.eventMm(e);
    this.dragStart = p;
    this.dragLast = p;
    switch (this.tool) {
      case "stylus":
        this.dragMode = "stroke";
        this.live = [p];
        this.handlers.onStrokeBegin(p[0], p[1]);
        break;
      case "eraser":
        this.dragMode = "erase";
        this.handlers.onErase(p[0], p[1]);
        break;
      case "marker":
      case "knife":
        if (this.tool === "knife" && this.insideSelection(p)) {
          this.dragMode = "move";
        } else {
          this.dragMode = "select";
          this.selectionBox = [p[0], p[1], p[0], p[1]];
        }
        break;
      case "glue":
        this.dragMode = "sketch";
        this.live = [p];
        break;
      default:
        this.dragMode = null;
    }
  }

  private pointerMove(e: PointerEvent): void {
    if (!this.dragMode) {
      return;
    }
    const p = this.eventMm(e);
    const [lx, ly] = this.dragLast;
    if (Math.hypot(p[0] - lx, p[1] - ly) < 0.8) {
      return; // ~sub-millimeter moves are noise
    }
    this.dragLast = p;
    switch (this.dragMode) {
      case "stroke":
        this.live.push(p);
        this.handlers.onStrokePoint(p[0], p[1]);
        this.render();
        break;
      case "erase":
        this.handlers.onErase(p[0], p[1]);
        break;
      case "select":
        this.selectionBox = [this.dragStart[0], this.dragStart[1], p[0], p[1]];
        this.render();
        break;
      case "sketch":
        this.live.push(p);
        this.render();
        break;
      case "move":
        break; // applied once on pointer-up as a single translation
    }
  }

  private pointerUp(e: PointerEvent): void {
    if (!this.dragMode) {
      return;
    }
    const p = this.eventMm(e);
    const mode = this.dragMode;
    this.dragMode = null;
    switch (mode) {
      case "stroke":
        this.live = [];
        this.handlers.onStrokeEnd();
        break;
      case "select": {
        const [x0, y0] = this.dragStart;
        this.selectionBox = null;
        this.handlers.onSelectRect(x0, y0, p[0], p[1]);
        break;
      }
      case "move": {
        const [sx, sy] = this.dragStart;
        this.handlers.onMove(p[0] - sx, p[1] - sy);
        break;
      }
      case "sketch": {
        const points = this.live;
        this.live = [];
        if (points.length > 0) {
          this.handlers.onSketch(points);
        }
        break;
      }
      case "erase":
        break;
    }
    this.render();
  }

  private insideSelection(p: [number, number]): boolean {
    const data = this.data;
    if (!data || data.selection.length === 0) {
      return false;
    }
    let minX = Infinity, minY = Infinity, maxX = -Infinity, maxY = -Infinity;
    for (const stroke of data.strokes) {
      if (!data.selection.includes(stroke.id)) {
        continue;
      }
      for (const [x, y] of stroke.points) {
        minX = Math.min(minX, x);
        minY = Math.min(minY, y);
        maxX = Math.max(maxX, x);
        maxY = Math.max(maxY, y);
      }
    }
    return p[0] >= minX - 3 && p[0] <= maxX + 3 && p[1] >= minY - 3 && p[1] <= maxY + 3;
  }

  render(): void {
    const ctx = this.canvas.getContext("2d")!;
    const { width, height } = this.canvas;
    ctx.clearRect(0, 0, width, height);

    const [px0, py0] = pageToPx(this.transform, 0, 0);
    const [px1, py1] = pageToPx(this.transform, 210, 297);
    ctx.fillStyle = "#fffdf7";
    ctx.fillRect(px0, py0, px1 - px0, py1 - py0);
    ctx.strokeStyle = "#c9c2ae";
    ctx.strokeRect(px0, py0, px1 - px0, py1 - py0);

    const data = this.data;
    if (data) {
      for (const pic of data.pictures) {
        const [bx0, by0] = pageToPx(this.transform, pic.bbox_mm[0], pic.bbox_mm[1]);
        const [bx1, by1] = pageToPx(this.transform, pic.bbox_mm[2], pic.bbox_mm[3]);
        drawSlideCrop(ctx, pic.crop, pic.t_lecture_s, bx0, by0, bx1 - bx0, by1 - by0);
      }
      for (const stroke of data.strokes) {
        ctx.strokeStyle = STROKE_COLORS[stroke.tool] ?? "#1b2a4a";
        ctx.lineWidth = Math.max(1, stroke.width_mm * this.transform.scale);
        ctx.lineCap = "round";
        ctx.lineJoin = "round";
        if (data.selection.includes(stroke.id)) {
          ctx.strokeStyle = "#c0392b";
        }
        this.drawPolyline(ctx, stroke.points);
      }
    }

    if (this.live.length > 0) {
      ctx.strokeStyle = this.tool === "glue" ? "#2d8f56" : "#6080c0";
      ctx.lineWidth = 2;
      ctx.setLineDash(this.tool === "glue" ? [6, 4] : []);
      this.drawPolyline(ctx, this.live);
      ctx.setLineDash([]);
    }

    if (this.selectionBox) {
      const [x0, y0, x1, y1] = this.selectionBox;
      const [ax, ay] = pageToPx(this.transform, Math.min(x0, x1), Math.min(y0, y1));
      const [bx, by] = pageToPx(this.transform, Math.max(x0, x1), Math.max(y0, y1));
      ctx.strokeStyle = "#c0392b";
      ctx.setLineDash([5, 4]);
      ctx.strokeRect(ax, ay, bx - ax, by - ay);
      ctx.setLineDash([]);
    }
  }

  private drawPolyline(ctx: CanvasRenderingContext2D, points: [number, number][]): void {
    if (points.length === 0) {
      return;
    }
    ctx.beginPath();
    const [x0, y0] = pageToPx(this.transform, points[0][0], points[0][1]);
    ctx.moveTo(x0, y0);
    for (const [x, y] of points.slice(1)) {
      const [px, py] = pageToPx(this.transform, x, y);
      ctx.lineTo(px, py);
    }
    if (points.length === 1) {
      ctx.lineTo(x0 + 0.5, y0 + 0.5);
    }
    ctx.stroke();
  }
}
