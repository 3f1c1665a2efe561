// Thin typed client over the service endpoints. All server interaction in
// the app flows through here; fetch is injectable for tests.

import type {
  DocumentWire,
  RefineResponseWire,
  ReportWire,
  SnapshotWire,
  TimelineWire,
} from "./types.js";

export interface ApiError {
  status: number;
  error: string;
  detail?: string;
  violations?: { object_id: string; rule: string; message: string }[];
}

export class ApiRequestError extends Error {
  constructor(readonly info: ApiError) {
    super(`${info.status} ${info.error}${info.detail ? `: ${info.detail}` : ""}`);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, init);
    const body = await response.json();
    if (!response.ok) {
      throw new ApiRequestError({ status: response.status, ...body });
    }
    return body as T;
  }

  private json(method: string, payload: unknown): RequestInit {
    return {
      method,
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    };
  }

  async createCorpus(files: { name: string; content: string }[]): Promise<string> {
    const form = new FormData();
    for (const file of files) {
      form.append("files", new Blob([file.content], { type: "text/plain" }), file.name);
    }
    const body = await this.request<{ corpus_id: string }>(
      "/corpora", { method: "POST", body: form });
    return body.corpus_id;
  }

  async getCorpus(corpusId: string): Promise<DocumentWire[]> {
    const body = await this.request<{ documents: DocumentWire[] }>(
      `/corpora/${corpusId}`);
    return body.documents;
  }

  async createSession(corpusId: string, method?: string): Promise<{
    session_id: string;
    snapshot: SnapshotWire;
    report: ReportWire;
  }> {
    return this.request("/sessions", this.json("POST", {
      corpus_id: corpusId,
      ...(method ? { method } : {}),
    }));
  }

  async getWorkspace(sessionId: string): Promise<SnapshotWire> {
    return this.request(`/sessions/${sessionId}/workspace`);
  }

  async putWorkspace(sessionId: string, snapshot: SnapshotWire): Promise<void> {
    await this.request(`/sessions/${sessionId}/workspace`,
                       this.json("PUT", snapshot));
  }

  async refine(sessionId: string, method?: string): Promise<RefineResponseWire> {
    return this.request(`/sessions/${sessionId}/refine`,
                        this.json("POST", method ? { method } : {}));
  }

  async getReport(sessionId: string, n: number): Promise<ReportWire> {
    return this.request(`/sessions/${sessionId}/reports/${n}`);
  }

  async getTimeline(sessionId: string): Promise<TimelineWire> {
    return this.request(`/sessions/${sessionId}/timeline`);
  }
}

/**
 * Serializes refine calls: while one is in flight every further attempt is
 * rejected immediately, mirroring the server's 409. The UI disables the
 * button too, but the gate is the actual guarantee.
 */
export class RefineGate {
  private inFlight = false;

  get busy(): boolean {
    return this.inFlight;
  }

  async run<T>(action: () => Promise<T>): Promise<T> {
    if (this.inFlight) {
      throw new Error("refine already in flight");
    }
    this.inFlight = true;
    try {
      return await action();
    } finally {
      this.inFlight = false;
    }
  }
}
