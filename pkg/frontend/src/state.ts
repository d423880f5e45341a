/** Session state and the controller that drives it.
 *
 * Every view renders from SessionState alone. Idea text and titles only ever
 * arrive from API responses; the client never fabricates them. Stale
 * responses are discarded by a per-session request sequence number, so at
 * most one in-flight spin or rewrite wins.
 */

import {
  ApiClient,
  ApiError,
  DiskElement,
  IdeaRecord,
  RawIdea,
  SpinPayload,
  TemplateInfo,
  VenueInfo,
} from "./api.js";

export type Disk = "A" | "B" | "C";

export const DISK_LABELS: Record<Disk, string> = {
  A: "Theme",
  B: "Domain",
  C: "Method",
};

export interface WheelState {
  disk: Disk;
  elements: DiskElement[];
  locked: string | null;
  current: string | null;
}

export interface SessionState {
  venues: VenueInfo[];
  venue: string | null;
  templates: TemplateInfo[];
  templateSource: string;
  wheels: Record<Disk, WheelState>;
  idea: RawIdea | null;
  record: IdeaRecord | null;
  favorites: IdeaRecord[];
  pending: "spin" | "rewrite" | null;
  error: string | null;
}

export function initialState(): SessionState {
  const wheel = (disk: Disk): WheelState => ({
    disk,
    elements: [],
    locked: null,
    current: null,
  });
  return {
    venues: [],
    venue: null,
    templates: [],
    templateSource: "basic",
    wheels: { A: wheel("A"), B: wheel("B"), C: wheel("C") },
    idea: null,
    record: null,
    favorites: [],
    pending: null,
    error: null,
  };
}

export class Session {
  state: SessionState = initialState();
  private seq = 0;

  constructor(
    private readonly api: ApiClient,
    private readonly onChange: (state: SessionState) => void = () => {},
    readonly sessionLabel: string = "default",
    readonly wheelSize: number = 12,
  ) {}

  private emit(): void {
    this.onChange(this.state);
  }

  private fail(err: unknown): void {
    this.state.error = err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
    this.state.pending = null;
    this.emit();
  }

  async loadVenues(): Promise<void> {
    this.state.venues = await this.api.venues();
    this.emit();
  }

  async selectVenue(key: string): Promise<void> {
    this.state.venue = key;
    this.state.idea = null;
    this.state.record = null;
    this.state.error = null;
    const [a, b, c, templates] = await Promise.all([
      this.api.disk(key, "A", this.wheelSize),
      this.api.disk(key, "B", this.wheelSize),
      this.api.disk(key, "C", this.wheelSize),
      this.api.templates(key),
    ]);
    this.state.wheels = {
      A: { disk: "A", elements: a, locked: null, current: null },
      B: { disk: "B", elements: b, locked: null, current: null },
      C: { disk: "C", elements: c, locked: null, current: null },
    };
    this.state.templates = templates;
    this.emit();
  }

  selectTemplate(source: string): void {
    this.state.templateSource = source;
    this.emit();
  }

  /** Lock a wheel to an element, or unlock when called with null. */
  setLock(disk: Disk, canonical: string | null): void {
    this.state.wheels[disk].locked = canonical;
    this.emit();
  }

  /** Current lock state, exactly as the next spin request will carry it. */
  buildSpinPayload(seed?: number, wild = false): SpinPayload {
    if (!this.state.venue) {
      throw new Error("no venue selected");
    }
    const locks: Record<string, string> = {};
    for (const disk of ["A", "B", "C"] as Disk[]) {
      const locked = this.state.wheels[disk].locked;
      if (locked !== null) {
        locks[`${disk}1`] = locked;
      }
    }
    const payload: SpinPayload = {
      venue: this.state.venue,
      template_source: this.state.templateSource,
      locks,
    };
    if (seed !== undefined) {
      payload.seed = seed;
    }
    if (wild) {
      payload.wild = wild;
    }
    return payload;
  }

  async spin(seed?: number, wild = false): Promise<RawIdea | null> {
    const payload = this.buildSpinPayload(seed, wild);
    const ticket = ++this.seq;
    this.state.pending = "spin";
    this.state.error = null;
    this.emit();
    let idea: RawIdea;
    try {
      idea = await this.api.spin(payload);
    } catch (err) {
      if (ticket === this.seq) {
        this.fail(err);
      }
      return null;
    }
    if (ticket !== this.seq) {
      return null; // a newer request superseded this one
    }
    this.state.idea = idea;
    this.state.record = null;
    for (const disk of ["A", "B", "C"] as Disk[]) {
      const bound = idea.bindings[`${disk}1`];
      this.state.wheels[disk].current = bound ?? null;
    }
    this.state.pending = null;
    this.emit();
    return idea;
  }

  async rewriteCurrent(): Promise<IdeaRecord | null> {
    if (!this.state.idea) {
      throw new Error("no current raw idea");
    }
    const ticket = ++this.seq;
    this.state.pending = "rewrite";
    this.state.error = null;
    this.emit();
    let record: IdeaRecord;
    try {
      record = await this.api.rewrite(this.state.idea);
    } catch (err) {
      if (ticket === this.seq) {
        this.fail(err);
      }
      return null;
    }
    if (ticket !== this.seq) {
      return null;
    }
    this.state.record = record;
    this.state.pending = null;
    this.emit();
    return record;
  }

  async addCurrentToFavorites(): Promise<void> {
    if (!this.state.record) {
      throw new Error("no rewritten title to keep");
    }
    // append-only in the UI: the server response is the source of truth
    this.state.favorites = await this.api.addFavorite(this.sessionLabel, this.state.record);
    this.emit();
  }

  async loadFavorites(): Promise<void> {
    this.state.favorites = await this.api.favorites(this.sessionLabel);
    this.emit();
  }
}
