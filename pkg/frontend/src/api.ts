/** Typed client for the llull HTTP API. The UI talks to nothing else. */

export interface VenueInfo {
  key: string;
  venue: string;
  year: number;
}

export interface DiskElement {
  canonical: string;
  visits: number;
}

export interface TemplateInfo {
  source: string;
  visits: number;
}

export interface RawIdea {
  text: string;
  template_source: string;
  bindings: Record<string, string>;
}

export interface IdeaRecord {
  title: string;
  raw: RawIdea;
  model_name: string;
  request_digest: string;
}

export interface SpinPayload {
  venue: string;
  template_source: string;
  locks: Record<string, string>;
  seed?: number;
  wild?: boolean;
}

export interface ProjectionPoint {
  idea_ref: string;
  venue: string;
  x: number;
  y: number;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    const body = await response.json().catch(() => ({}));
    if (!response.ok) {
      const error = (body as { error?: { code?: string; message?: string } }).error ?? {};
      throw new ApiError(response.status, error.code ?? "unknown", error.message ?? "request failed");
    }
    return body as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  async venues(): Promise<VenueInfo[]> {
    const body = await this.request<{ venues: VenueInfo[] }>("/api/venues");
    return body.venues;
  }

  async disk(venue: string, disk: "A" | "B" | "C", k: number): Promise<DiskElement[]> {
    const query = `venue=${encodeURIComponent(venue)}&disk=${disk}&k=${k}`;
    const body = await this.request<{ elements: DiskElement[] }>(`/api/disks?${query}`);
    return body.elements;
  }

  async templates(venue: string): Promise<TemplateInfo[]> {
    const body = await this.request<{ templates: TemplateInfo[] }>(
      `/api/templates?venue=${encodeURIComponent(venue)}`,
    );
    return body.templates;
  }

  spin(payload: SpinPayload): Promise<RawIdea> {
    return this.post<RawIdea>("/api/spin", payload);
  }

  rewrite(idea: RawIdea): Promise<IdeaRecord> {
    return this.post<IdeaRecord>("/api/rewrite", idea);
  }

  async favorites(session: string): Promise<IdeaRecord[]> {
    const body = await this.request<{ favorites: IdeaRecord[] }>(
      `/api/favorites?session=${encodeURIComponent(session)}`,
    );
    return body.favorites;
  }

  async addFavorite(session: string, record: IdeaRecord): Promise<IdeaRecord[]> {
    const body = await this.post<{ favorites: IdeaRecord[] }>("/api/favorites", {
      session,
      record,
    });
    return body.favorites;
  }

  async projection(run: string): Promise<ProjectionPoint[]> {
    const body = await this.request<{ points: ProjectionPoint[] }>(
      `/api/projection?run=${encodeURIComponent(run)}`,
    );
    return body.points;
  }
}
