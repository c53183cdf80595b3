/** REST + WebSocket client for the simulation steering server.
 *
 * Stream messages carry the same field names as the server's output CSVs
 * (site/tons, site/cat/count, species/tons). The stream resumes from the
 * last seen sequence number after a disconnect, so chart history survives
 * reconnects and page reloads.
 */

export interface LandingRow { site: string; tons: number }
export interface FleetRow { site: string; cat: number; count: number }
export interface BiomassRow { species: string; tons: number }

export interface FrameEvent {
  seq: number;
  type: "frame";
  index: number;
  date: string;
  landings: LandingRow[];
  fleet: FleetRow[];
  biomass: BiomassRow[];
  short_migrations: number;
  long_migrations: number;
  country_catch: Record<string, number>;
}

export interface InterventionEvent {
  seq: number;
  type: "intervention";
  effective_date: string;
  command: Record<string, unknown>;
}

export interface EndEvent { seq: number; type: "end"; status: string; error: string | null }

export type StreamEvent = FrameEvent | InterventionEvent | EndEvent;

export interface SiteInfo {
  name: string;
  lat: number;
  lon: number;
  country: string;
  capacity: number;
}

export interface RunInfo {
  run_id: string;
  status: string;
  frames: number;
  events: number;
  speed: number | null;
  date: string;
  error: string | null;
  sites: SiteInfo[];
  species: string[];
}

export function streamUrl(base: string, runId: string, from: number): string {
  const ws = base.replace(/^http/, "ws").replace(/\/$/, "");
  return `${ws}/runs/${encodeURIComponent(runId)}/stream?from=${from}`;
}

export class ApiClient {
  constructor(private base: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.base + path, init);
    const body = await response.json().catch(() => ({}));
    if (!response.ok) {
      const detail = (body as { detail?: string }).detail ?? response.statusText;
      throw new Error(detail);
    }
    return body as T;
  }

  listRuns(): Promise<RunInfo[]> {
    return this.request("/runs");
  }

  getRun(runId: string): Promise<RunInfo> {
    return this.request(`/runs/${encodeURIComponent(runId)}`);
  }

  control(runId: string, action: string, speed?: number): Promise<RunInfo> {
    return this.request(`/runs/${encodeURIComponent(runId)}/control`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(speed === undefined ? { action } : { action, speed }),
    });
  }

  intervene(runId: string, command: Record<string, unknown>):
      Promise<{ effective_date: string }> {
    return this.request(`/runs/${encodeURIComponent(runId)}/interventions`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(command),
    });
  }

  fetchEvents(runId: string, from: number): Promise<{ events: StreamEvent[]; next: number }> {
    return this.request(`/runs/${encodeURIComponent(runId)}/frames?from=${from}`);
  }
}

export interface StreamHandle { close(): void }

/** Subscribe to a run's event stream with automatic resume.
 *
 * Reconnects with a capped backoff from the next unseen sequence number;
 * the server replays the backlog, so no event is lost or duplicated.
 */
export function openStream(
  base: string,
  runId: string,
  onEvent: (event: StreamEvent) => void,
  makeSocket: (url: string) => WebSocket = (url) => new WebSocket(url),
): StreamHandle {
  let cursor = 0;
  let closed = false;
  let retryMs = 500;
  let socket: WebSocket | null = null;

  const connect = () => {
    if (closed) return;
    socket = makeSocket(streamUrl(base, runId, cursor));
    socket.onmessage = (message: MessageEvent) => {
      retryMs = 500;
      const event = JSON.parse(String(message.data)) as StreamEvent;
      if (event.seq !== undefined && event.seq < cursor) return;  // replay overlap
      cursor = (event.seq ?? cursor) + 1;
      onEvent(event);
      if (event.type === "end") closed = true;
    };
    socket.onclose = () => {
      if (closed) return;
      setTimeout(connect, retryMs);
      retryMs = Math.min(retryMs * 2, 8000);
    };
    socket.onerror = () => { /* onclose drives the retry */ };
  };

  connect();
  return {
    close() {
      closed = true;
      socket?.close();
    },
  };
}
