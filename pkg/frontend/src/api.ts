// Typed client for the local session service. The service owns all
// timestamps: every lecture time shown in the UI comes from these responses.

export interface ClockView {
  playing: boolean;
  position_s: number;
  duration_s: number;
}

export interface EventResult {
  seq: number;
  status: "applied" | "rejected" | "duplicate" | "gap";
  reason?: string;
  result?: Record<string, unknown>;
}

export interface BatchResponse {
  results: EventResult[];
  clock: ClockView;
}

export interface StrokeData {
  id: number;
  tool: string;
  width_mm: number;
  t_start_s: number;
  points: [number, number][];
}

export interface PictureData {
  id: number;
  bbox_mm: [number, number, number, number];
  t_lecture_s: number;
  crop: [number, number, number, number];
}

export interface PageData {
  page_index: number;
  page_count: number;
  current_page: number;
  tool: string;
  selection: number[];
  strokes: StrokeData[];
  pictures: PictureData[];
}

export interface OutgoingEvent {
  seq: number;
  kind: string;
  payload: Record<string, unknown>;
}

async function asJson<T>(resp: Response): Promise<T> {
  if (!resp.ok) {
    throw new Error(`${resp.status} ${resp.statusText}: ${await resp.text()}`);
  }
  return resp.json() as Promise<T>;
}

export class SessionApi {
  constructor(private baseUrl: string = "") {}

  async createSession(durationS: number): Promise<{ session_id: string; duration_s: number }> {
    return asJson(
      await fetch(`${this.baseUrl}/api/sessions`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ duration_s: durationS }),
      }),
    );
  }

  async sendEvents(sessionId: string, events: OutgoingEvent[]): Promise<BatchResponse> {
    return asJson(
      await fetch(`${this.baseUrl}/api/sessions/${sessionId}/events`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ events }),
      }),
    );
  }

  async getClock(sessionId: string): Promise<ClockView> {
    return asJson(await fetch(`${this.baseUrl}/api/sessions/${sessionId}/clock`));
  }

  async getPage(sessionId: string, pageIndex: number): Promise<PageData> {
    return asJson(await fetch(`${this.baseUrl}/api/sessions/${sessionId}/pages/${pageIndex}`));
  }

  async getDocument(sessionId: string): Promise<string> {
    const resp = await fetch(`${this.baseUrl}/api/sessions/${sessionId}/document`);
    if (!resp.ok) {
      throw new Error(`${resp.status} ${resp.statusText}`);
    }
    return resp.text();
  }
}
