/** REST + WebSocket client for the simulation steering server.
 *
 * Stream messages carry the same field names as the server's output CSVs
 * (site/tons, site/cat/count, species/tons). The stream resumes from the
 * last seen sequence number after a disconnect, so chart history survives
 * reconnects and page reloads.
 */
export function streamUrl(base, runId, from) {
    const ws = base.replace(/^http/, "ws").replace(/\/$/, "");
    return `${ws}/runs/${encodeURIComponent(runId)}/stream?from=${from}`;
}
export class ApiClient {
    constructor(base = "") {
        this.base = base;
    }
    async request(path, init) {
        const response = await fetch(this.base + path, init);
        const body = await response.json().catch(() => ({}));
        if (!response.ok) {
            const detail = body.detail ?? response.statusText;
            throw new Error(detail);
        }
        return body;
    }
    listRuns() {
        return this.request("/runs");
    }
    getRun(runId) {
        return this.request(`/runs/${encodeURIComponent(runId)}`);
    }
    control(runId, action, speed) {
        return this.request(`/runs/${encodeURIComponent(runId)}/control`, {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(speed === undefined ? { action } : { action, speed }),
        });
    }
    intervene(runId, command) {
        return this.request(`/runs/${encodeURIComponent(runId)}/interventions`, {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(command),
        });
    }
    fetchEvents(runId, from) {
        return this.request(`/runs/${encodeURIComponent(runId)}/frames?from=${from}`);
    }
}
/** Subscribe to a run's event stream with automatic resume.
 *
 * Reconnects with a capped backoff from the next unseen sequence number;
 * the server replays the backlog, so no event is lost or duplicated.
 */
export function openStream(base, runId, onEvent, makeSocket = (url) => new WebSocket(url)) {
    let cursor = 0;
    let closed = false;
    let retryMs = 500;
    let socket = null;
    const connect = () => {
        if (closed)
            return;
        socket = makeSocket(streamUrl(base, runId, cursor));
        socket.onmessage = (message) => {
            retryMs = 500;
            const event = JSON.parse(String(message.data));
            if (event.seq !== undefined && event.seq < cursor)
                return; // replay overlap
            cursor = (event.seq ?? cursor) + 1;
            onEvent(event);
            if (event.type === "end")
                closed = true;
        };
        socket.onclose = () => {
            if (closed)
                return;
            setTimeout(connect, retryMs);
            retryMs = Math.min(retryMs * 2, 8000);
        };
        socket.onerror = () => { };
    };
    connect();
    return {
        close() {
            closed = true;
            socket?.close();
        },
    };
}
