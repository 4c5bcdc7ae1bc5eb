/** Typed client for the versioned JSON API. */

import {
  CloseReadingDoc,
  DatasetInfo,
  LayoutDoc,
  MatricesDoc,
  MetricsDoc,
  NeighborsDoc,
  OccurrenceDoc,
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

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    public base: string,
    private fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(`${this.base}${path}`, init);
    const body = await response.json();
    if (!response.ok) {
      throw new ApiError(response.status, body.error ?? "ERROR", body.message ?? path);
    }
    return body as T;
  }

  listDatasets(): Promise<{ datasets: DatasetInfo[] }> {
    return this.request("/datasets");
  }

  createSession(config: Record<string, unknown>): Promise<{ id: string; n_points: number }> {
    return this.request("/sessions", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(config),
    });
  }

  layout(id: string): Promise<LayoutDoc> {
    return this.request(`/sessions/${id}/layout`);
  }

  metrics(id: string): Promise<MetricsDoc> {
    return this.request(`/sessions/${id}/metrics`);
  }

  matrices(id: string): Promise<MatricesDoc> {
    return this.request(`/sessions/${id}/matrices`);
  }

  neighbors(id: string, k: number): Promise<NeighborsDoc> {
    return this.request(`/sessions/${id}/neighbors?k=${k}`);
  }

  closereading(id: string, layer: number, projection = 0): Promise<CloseReadingDoc> {
    return this.request(`/sessions/${id}/closereading?layer=${layer}&projection=${projection}`);
  }

  context(id: string, pid: number): Promise<OccurrenceDoc> {
    return this.request(`/sessions/${id}/points/${pid}/context`);
  }
}
