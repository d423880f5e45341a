/** DOM wiring: render everything from SessionState, delegate actions to Session. */

import { ApiClient, IdeaRecord, ProjectionPoint } from "./api.js";
import { DISK_LABELS, Disk, Session, SessionState } from "./state.js";
import { LayerToggles, colorFor, renderProjection, venuesOf } from "./projection.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) {
    node.className = className;
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

function option(label: string, value: string, selected: boolean): HTMLOptionElement {
  const node = el("option", undefined, label);
  node.value = value;
  node.selected = selected;
  return node;
}

export function apiBaseUrl(): string {
  const fromQuery = new URLSearchParams(window.location.search).get("api");
  const fromGlobal = (window as unknown as { LLULL_API_BASE?: string }).LLULL_API_BASE;
  return fromQuery ?? fromGlobal ?? "http://127.0.0.1:8765";
}

function renderWheel(session: Session, state: SessionState, disk: Disk): HTMLElement {
  const wheel = state.wheels[disk];
  const box = el("section", "wheel");
  const head = el("header");
  head.append(el("h2", undefined, DISK_LABELS[disk]));
  if (wheel.locked !== null) {
    const unlock = el("button", "unlock", `locked: ${wheel.locked} ✕`);
    unlock.addEventListener("click", () => session.setLock(disk, null));
    head.append(unlock);
  }
  box.append(head);
  const list = el("ul", "elements");
  for (const element of wheel.elements) {
    const item = el("li");
    if (element.canonical === wheel.current) {
      item.classList.add("current");
    }
    if (element.canonical === wheel.locked) {
      item.classList.add("locked");
    }
    const pick = el("button", "element", `${element.canonical}`);
    pick.title = `${element.visits} visits — click to lock`;
    pick.addEventListener("click", () => session.setLock(disk, element.canonical));
    item.append(pick, el("span", "visits", String(element.visits)));
    list.append(item);
  }
  box.append(list);
  const search = el("input", "lock-search");
  search.placeholder = "lock any element…";
  search.addEventListener("keydown", (event) => {
    if (event.key === "Enter" && search.value.trim()) {
      session.setLock(disk, search.value.trim());
    }
  });
  box.append(search);
  return box;
}

function renderResult(session: Session, state: SessionState): HTMLElement {
  const box = el("section", "result");
  if (state.error) {
    box.append(el("p", "error", state.error));
  }
  if (state.idea) {
    box.append(el("p", "raw-idea", state.idea.text));
  }
  if (state.record) {
    const title = el("p", "title", state.record.title);
    const bindings = Object.entries(state.record.raw.bindings)
      .map(([slot, value]) => `${slot}=${value}`)
      .join("  ");
    title.title = `template: ${state.record.raw.template_source}\n${bindings}`;
    box.append(title);
    const provenance = el(
      "p",
      "provenance",
      `from "${state.record.raw.template_source}" with ${bindings}`,
    );
    box.append(provenance);
  }
  return box;
}

function renderFavorites(favorites: IdeaRecord[]): HTMLElement {
  const box = el("section", "favorites");
  box.append(el("h2", undefined, `Favorites (${favorites.length})`));
  const list = el("ul");
  for (const record of favorites) {
    const item = el("li", undefined, record.title);
    item.title = record.raw?.text ?? "";
    list.append(item);
  }
  box.append(list);
  return box;
}

export function render(root: HTMLElement, session: Session, state: SessionState): void {
  root.textContent = "";

  const controls = el("section", "controls");
  const venueSelect = el("select", "venue-select");
  venueSelect.append(option("pick a venue…", "", state.venue === null));
  for (const venue of state.venues) {
    venueSelect.append(
      option(`${venue.venue} ${venue.year}`, venue.key, venue.key === state.venue),
    );
  }
  venueSelect.addEventListener("change", () => {
    if (venueSelect.value) {
      void session.selectVenue(venueSelect.value);
    }
  });
  controls.append(venueSelect);

  const templateSelect = el("select", "template-select");
  templateSelect.append(option("A1, B1, C1 (basic)", "basic",
    state.templateSource === "basic"));
  for (const template of state.templates) {
    templateSelect.append(
      option(template.source, template.source, template.source === state.templateSource),
    );
  }
  templateSelect.addEventListener("change", () => session.selectTemplate(templateSelect.value));
  controls.append(templateSelect);

  const seedInput = el("input", "seed-input");
  seedInput.type = "number";
  seedInput.placeholder = "seed (optional)";
  controls.append(seedInput);

  const wild = el("input", "wild-toggle");
  wild.type = "checkbox";
  wild.id = "wild";
  const wildLabel = el("label", undefined, "wild (full disk)");
  wildLabel.htmlFor = "wild";
  controls.append(wild, wildLabel);

  const spin = el("button", "spin", state.pending === "spin" ? "spinning…" : "Spin");
  spin.disabled = state.venue === null || state.pending !== null;
  spin.addEventListener("click", () => {
    const seed = seedInput.value === "" ? undefined : Number(seedInput.value);
    void session.spin(seed, wild.checked);
  });
  controls.append(spin);

  const rewrite = el(
    "button",
    "rewrite",
    state.pending === "rewrite" ? "rewriting…" : "Rewrite",
  );
  rewrite.disabled = state.idea === null || state.pending !== null;
  rewrite.addEventListener("click", () => void session.rewriteCurrent());
  controls.append(rewrite);

  const favorite = el("button", "favorite", "★ Keep");
  favorite.disabled = state.record === null;
  favorite.addEventListener("click", () => void session.addCurrentToFavorites());
  controls.append(favorite);

  root.append(controls);

  const wheels = el("div", "wheels");
  for (const disk of ["A", "B", "C"] as Disk[]) {
    wheels.append(renderWheel(session, state, disk));
  }
  root.append(wheels);
  root.append(renderResult(session, state));
  root.append(renderFavorites(state.favorites));
}

export async function mountProjection(
  root: HTMLElement,
  api: ApiClient,
  run: string,
): Promise<void> {
  root.textContent = "";
  let points: ProjectionPoint[];
  try {
    points = await api.projection(run);
  } catch {
    root.append(el("p", "empty", "No projection run available yet."));
    return;
  }
  const venues = venuesOf(points);
  const toggles: LayerToggles = Object.fromEntries(venues.map((v) => [v, true]));
  const bar = el("div", "layer-toggles");
  const canvas = el("canvas", "projection-canvas");
  canvas.width = 640;
  canvas.height = 640;
  const redraw = () => renderProjection(canvas, points, toggles);
  for (const venue of venues) {
    const toggle = el("input");
    toggle.type = "checkbox";
    toggle.checked = true;
    toggle.id = `layer-${venue}`;
    toggle.addEventListener("change", () => {
      toggles[venue] = toggle.checked;
      redraw();
    });
    const label = el("label", undefined, venue);
    label.htmlFor = toggle.id;
    label.style.color = colorFor(venue, venues);
    bar.append(toggle, label);
  }
  root.append(bar, canvas);
  redraw();
}

export function main(): void {
  const api = new ApiClient(apiBaseUrl());
  const machineRoot = document.getElementById("machine");
  const projectionRoot = document.getElementById("projection");
  if (!machineRoot || !projectionRoot) {
    return;
  }
  const session = new Session(api, (state) => render(machineRoot, session, state));
  void session.loadVenues().then(() => session.loadFavorites());

  const runInput = document.getElementById("projection-run") as HTMLInputElement | null;
  const loadRun = document.getElementById("projection-load");
  loadRun?.addEventListener("click", () => {
    void mountProjection(projectionRoot, api, runInput?.value ?? "default");
  });
}

if (typeof document !== "undefined" && document.getElementById("machine")) {
  main();
}
