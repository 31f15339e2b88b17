// Typed client over the REST API. Every mutation the UI performs goes
// through these methods; nothing touches engine state any other way.

import type {
  Artifact,
  ChatResponse,
  HealthFinding,
  Job,
  ProjectDoc,
  ProjectListing,
  Tim,
  TraceLink,
  ViewSpec,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const response = await fetch(url, {
    headers: { "Content-Type": "application/json" },
    ...init,
  });
  const body = await response.json().catch(() => ({}));
  if (!response.ok) {
    throw new ApiError(
      response.status,
      (body as { error?: string }).error ?? "Unknown",
      (body as { message?: string }).message ?? response.statusText,
    );
  }
  return body as T;
}

export class ApiClient {
  constructor(
    public base: string = "",
    public projectId: string = "",
  ) {}

  private url(path: string): string {
    return `${this.base}/projects/${encodeURIComponent(this.projectId)}${path}`;
  }

  async listProjects(): Promise<ProjectListing[]> {
    return request(`${this.base}/projects`);
  }

  async getProject(): Promise<ProjectDoc> {
    return request(this.url(""));
  }

  async getTim(): Promise<Tim> {
    return request(this.url("/tim"));
  }

  async getArtifact(artifactId: string): Promise<Artifact> {
    return request(this.url(`/artifacts/${artifactId}`));
  }

  async getLinks(): Promise<TraceLink[]> {
    return request(this.url("/links"));
  }

  async getView(artifactId: string, up: number, down: number): Promise<ViewSpec> {
    return request(this.url(`/views/${artifactId}?up=${up}&down=${down}`));
  }

  async search(params: {
    q?: string;
    type?: string;
    flagged?: boolean;
    status?: string;
    sort?: string;
    limit?: number;
  }): Promise<Artifact[]> {
    const query = new URLSearchParams();
    if (params.q) query.set("q", params.q);
    if (params.type) query.set("type", params.type);
    if (params.flagged !== undefined) query.set("flagged", String(params.flagged));
    if (params.status) query.set("status", params.status);
    if (params.sort) query.set("sort", params.sort);
    if (params.limit !== undefined) query.set("limit", String(params.limit));
    return request(this.url(`/search?${query.toString()}`));
  }

  async reviewLink(
    childId: string,
    parentId: string,
    decision: "approve" | "reject",
    reviewer = "webui",
  ): Promise<{ link: TraceLink; revision: number }> {
    return request(this.url(`/links/${childId}/${parentId}/review`), {
      method: "POST",
      body: JSON.stringify({ decision, reviewer }),
    });
  }

  async chat(question: string, k = 5): Promise<ChatResponse> {
    return request(this.url("/chat"), {
      method: "POST",
      body: JSON.stringify({ question, k }),
    });
  }

  async runHealth(artifactId: string): Promise<HealthFinding[]> {
    return request(this.url(`/artifacts/${artifactId}/health`), {
      method: "POST",
      body: JSON.stringify({}),
    });
  }

  async getFindings(artifactId?: string): Promise<HealthFinding[]> {
    const suffix = artifactId ? `?artifact=${encodeURIComponent(artifactId)}` : "";
    return request(this.url(`/findings${suffix}`));
  }

  async actOnFinding(
    findingId: string,
    action: "resolve" | "dismiss" | "promote-term",
  ): Promise<{ finding: HealthFinding }> {
    return request(this.url(`/findings/${findingId}`), {
      method: "POST",
      body: JSON.stringify({ action }),
    });
  }

  async flagArtifact(artifactId: string, note: string): Promise<{ revision: number }> {
    return request(this.url(`/artifacts/${artifactId}/flag`), {
      method: "POST",
      body: JSON.stringify({ note }),
    });
  }

  async listJobs(): Promise<Job[]> {
    return request(this.url("/jobs"));
  }

  async getJob(jobId: string): Promise<Job> {
    return request(this.url(`/jobs/${jobId}`));
  }

  async submitJob(kind: string, params: Record<string, unknown>): Promise<{ jobId: string }> {
    return request(this.url("/jobs"), {
      method: "POST",
      body: JSON.stringify({ kind, params }),
    });
  }

  /** Follow a job's events: server push when EventSource exists, else polling. */
  watchJob(
    jobId: string,
    onEvent: (message: string, job?: Job) => void,
    onDone: (job: Job) => void,
  ): () => void {
    const EventSourceCtor = (globalThis as { EventSource?: typeof EventSource }).EventSource;
    if (EventSourceCtor) {
      const source = new EventSourceCtor(this.url(`/jobs/${jobId}/events`));
      source.onmessage = (event) => {
        const payload = JSON.parse(event.data) as { message: string };
        onEvent(payload.message);
        if (["completed", "failed", "cancelled"].includes(payload.message.split(":")[0])) {
          source.close();
          void this.getJob(jobId).then(onDone);
        }
      };
      return () => source.close();
    }
    let stopped = false;
    let seen = 0;
    const poll = async () => {
      while (!stopped) {
        const job = await this.getJob(jobId);
        for (const event of job.events.slice(seen)) {
          onEvent(event.message, job);
        }
        seen = job.events.length;
        if (["completed", "failed", "cancelled"].includes(job.state)) {
          onDone(job);
          return;
        }
        await new Promise((resolve) => setTimeout(resolve, 150));
      }
    };
    void poll();
    return () => {
      stopped = true;
    };
  }
}
