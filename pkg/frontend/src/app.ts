// Orchestrator: owns the session, the event queue, and all views; routes
// pointer gestures to session events by active tool and re-renders from
// the service's authoritative state after every acknowledged batch.

import { SessionApi, type ClockView, type EventResult } from "./api.js";
import { CaptureFlow } from "./capture.js";
import { EventQueue } from "./events.js";
import { PageView } from "./pageview.js";
import { SlidePane } from "./slidepane.js";
import { Timeline } from "./timeline.js";

const TOOLS = ["stylus", "eraser", "magic-stick", "marker", "glue", "knife"];

export class App {
  private api = new SessionApi();
  private sessionId = "";
  private queue!: EventQueue;
  private page!: PageView;
  private timeline!: Timeline;
  private slidePane!: SlidePane;
  private capture!: CaptureFlow;
  private clock: ClockView = { playing: false, position_s: 0, duration_s: 1 };
  private currentPage = 0;
  private flushTimer: number | null = null;
  private toolButtons = new Map<string, HTMLButtonElement>();

  async start(): Promise<void> {
    const created = await this.api.createSession(1800);
    this.sessionId = created.session_id;

    this.queue = new EventQueue(
      (events) => this.api.sendEvents(this.sessionId, events),
      {
        onApplied: (result, kind) => this.onApplied(result, kind),
        onRejected: (result, kind) => this.toast(`${kind} rejected: ${result.reason ?? "?"}`),
        onClock: (clock) => this.setClock(clock),
        onError: () => this.toast("network hiccup, retrying..."),
      },
    );

    this.capture = new CaptureFlow((kind, payload) => this.emit(kind, payload));
    this.buildViews();
    this.buildToolbar();

    window.setInterval(() => this.pollClock(), 500);
    document.addEventListener("keydown", (e) => {
      if (e.key === "Escape") {
        this.capture.cancel();
        this.slidePane.showRect(null);
        this.flushSoon();
      }
    });

    await this.refreshPage();
    this.setStatus(`session ${this.sessionId}`);
  }

  // -- event plumbing -----------------------------------------------------

  private emit(kind: string, payload: Record<string, unknown> = {}): number {
    const seq = this.queue.enqueue(kind, payload);
    this.flushSoon();
    return seq;
  }

  private flushSoon(): void {
    if (this.flushTimer !== null) {
      return;
    }
    this.flushTimer = window.setTimeout(() => {
      this.flushTimer = null;
      void this.queue.flush();
    }, 25);
  }

  private onApplied(result: EventResult, kind: string): void {
    const data = result.result ?? {};
    switch (kind) {
      case "stroke-end":
      case "erase":
      case "move":
      case "glue-sketch":
        void this.refreshPage();
        if (kind === "glue-sketch") {
          this.slidePane.showRect(null);
          this.toast(`picture ${data["picture_id"]} embedded`);
          this.selectTool("stylus");
        }
        break;
      case "swipe":
        this.currentPage = data["page_index"] as number;
        void this.refreshPage();
        break;
      case "tool-cycle":
        this.setActiveTool(data["tool"] as string);
        break;
      case "marker-select":
      case "knife-select": {
        const ids = (data["stroke_ids"] as number[]) ?? [];
        void this.refreshPage();
        if (kind === "marker-select") {
          if (ids.length === 0) {
            this.toast("nothing selected");
          } else {
            this.emit("review-seek");
          }
        }
        break;
      }
      case "review-seek":
        this.toast(`review: jumped to ${data["t_lecture_s"]} s`);
        this.setStatus(`review at ${data["t_lecture_s"]} s`);
        break;
      case "pinch-start":
      case "pinch-move":
      case "unpinch":
        this.slidePane.showRect((data["rect"] as [number, number, number, number]) ?? null);
        if (kind === "unpinch") {
          this.toast("captured; sketch a glue area on the page");
          this.selectTool("glue");
        }
        break;
    }
  }

  // -- views ----------------------------------------------------------------

  private buildViews(): void {
    const pageCanvas = document.getElementById("page") as HTMLCanvasElement;
    this.page = new PageView(pageCanvas, {
      onStrokeBegin: (x, y) => this.emit("stroke-begin", { x_mm: x, y_mm: y }),
      onStrokePoint: (x, y) => this.emit("stroke-point", { x_mm: x, y_mm: y }),
      onStrokeEnd: () => this.emit("stroke-end"),
      onErase: (x, y) => this.emit("erase", { x_mm: x, y_mm: y, radius_mm: 4 }),
      onSelectRect: (x0, y0, x1, y1) => {
        const kind = this.page.tool === "marker" ? "marker-select" : "knife-select";
        this.emit(kind, { x0_mm: x0, y0_mm: y0, x1_mm: x1, y1_mm: y1 });
      },
      onMove: (dx, dy) => this.emit("move", { dx_mm: dx, dy_mm: dy }),
      onSketch: (points) => {
        if (!this.capture.sketch(points)) {
          this.toast("glue needs a captured slide area first");
        }
        this.flushSoon();
      },
    });

    this.timeline = new Timeline(
      document.getElementById("timeline") as HTMLCanvasElement,
      document.getElementById("preview") as HTMLCanvasElement,
      document.getElementById("clock-label")!,
      (t) => this.emit("slider-seek", { t_s: t }),
      () => this.emit(this.clock.playing ? "clock-pause" : "clock-play"),
      document.getElementById("play") as HTMLButtonElement,
    );

    this.slidePane = new SlidePane(
      document.getElementById("slide") as HTMLCanvasElement,
      this.capture,
      () => this.clock.playing,
    );
    this.slidePane.render(0);
  }

  private buildToolbar(): void {
    const bar = document.getElementById("tools")!;
    for (const tool of TOOLS) {
      const button = document.createElement("button");
      button.textContent = tool;
      button.addEventListener("click", () => this.selectTool(tool));
      bar.appendChild(button);
      this.toolButtons.set(tool, button);
    }
    this.setActiveTool("stylus");

    (document.getElementById("prev-page") as HTMLButtonElement).addEventListener(
      "click", () => this.emit("swipe", { direction: "right" }));
    (document.getElementById("next-page") as HTMLButtonElement).addEventListener(
      "click", () => this.emit("swipe", { direction: "left" }));
    (document.getElementById("export") as HTMLButtonElement).addEventListener(
      "click", () => void this.exportDocument());
  }

  private selectTool(tool: string): void {
    this.emit("tool-cycle", { tool });
  }

  private setActiveTool(tool: string): void {
    this.page.tool = tool;
    for (const [name, button] of this.toolButtons) {
      button.classList.toggle("active", name === tool);
    }
  }

  // -- service state --------------------------------------------------------

  private setClock(clock: ClockView): void {
    const slideChanged =
      Math.floor(this.clock.position_s / 30) !== Math.floor(clock.position_s / 30);
    this.clock = clock;
    this.timeline.setClock(clock);
    if (slideChanged) {
      this.slidePane.render(clock.position_s);
    }
  }

  private async pollClock(): Promise<void> {
    try {
      this.setClock(await this.api.getClock(this.sessionId));
    } catch {
      // transient; the next poll retries
    }
  }

  private async refreshPage(): Promise<void> {
    try {
      const data = await this.api.getPage(this.sessionId, this.currentPage);
      this.currentPage = data.current_page;
      const page = data.page_index === data.current_page
        ? data
        : await this.api.getPage(this.sessionId, this.currentPage);
      this.page.setPage(page);
      this.setStatus(`page ${page.current_page + 1} / ${page.page_count}`);
    } catch (error) {
      this.toast(`page refresh failed: ${error}`);
    }
  }

  private async exportDocument(): Promise<void> {
    const text = await this.api.getDocument(this.sessionId);
    const blob = new Blob([text], { type: "application/json" });
    const link = document.createElement("a");
    link.href = URL.createObjectURL(blob);
    link.download = `session-${this.sessionId}.json`;
    link.click();
    URL.revokeObjectURL(link.href);
  }

  // -- feedback ---------------------------------------------------------------

  private toast(message: string): void {
    const host = document.getElementById("toasts")!;
    const node = document.createElement("div");
    node.className = "toast";
    node.textContent = message;
    host.appendChild(node);
    window.setTimeout(() => node.remove(), 3500);
  }

  private setStatus(message: string): void {
    document.getElementById("status")!.textContent = message;
  }
}
