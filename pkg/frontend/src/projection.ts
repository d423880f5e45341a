/** Venue-comparison view: per-venue density layers over shared 2-D coordinates. */

import { ProjectionPoint } from "./api.js";

export const VENUE_COLORS = [
  "#0b3d91",
  "#b2182b",
  "#1a9850",
  "#7b3294",
  "#e66101",
  "#35978f",
];

export interface LayerToggles {
  [venue: string]: boolean;
}

export function venuesOf(points: ProjectionPoint[]): string[] {
  return [...new Set(points.map((p) => p.venue))].sort();
}

export function colorFor(venue: string, venues: string[]): string {
  return VENUE_COLORS[venues.indexOf(venue) % VENUE_COLORS.length];
}

/** Bin points into a grid per venue; cell alpha encodes density. */
export function densityBins(
  points: ProjectionPoint[],
  resolution: number,
): { bounds: [number, number, number, number]; byVenue: Map<string, Float64Array> } {
  const xs = points.map((p) => p.x);
  const ys = points.map((p) => p.y);
  const xmin = Math.min(...xs);
  const xmax = Math.max(...xs);
  const ymin = Math.min(...ys);
  const ymax = Math.max(...ys);
  const byVenue = new Map<string, Float64Array>();
  const width = xmax - xmin || 1;
  const height = ymax - ymin || 1;
  for (const point of points) {
    let grid = byVenue.get(point.venue);
    if (!grid) {
      grid = new Float64Array(resolution * resolution);
      byVenue.set(point.venue, grid);
    }
    const ix = Math.min(resolution - 1, Math.floor(((point.x - xmin) / width) * resolution));
    const iy = Math.min(resolution - 1, Math.floor(((point.y - ymin) / height) * resolution));
    grid[iy * resolution + ix] += 1;
  }
  return { bounds: [xmin, xmax, ymin, ymax], byVenue };
}

/** Points represented by the currently visible layers. */
export function visibleCount(points: ProjectionPoint[], toggles: LayerToggles): number {
  return points.filter((p) => toggles[p.venue] !== false).length;
}

/** Draw toggled venue layers; returns how many points the drawing represents. */
export function renderProjection(
  canvas: HTMLCanvasElement,
  points: ProjectionPoint[],
  toggles: LayerToggles,
  resolution = 48,
): number {
  const count = visibleCount(points, toggles);
  const ctx = canvas.getContext("2d");
  if (!ctx) {
    return count; // headless test environments have no 2-D context
  }
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  if (points.length === 0) {
    return 0;
  }
  const venues = venuesOf(points);
  const { byVenue } = densityBins(points, resolution);
  const cellW = canvas.width / resolution;
  const cellH = canvas.height / resolution;
  let max = 0;
  for (const grid of byVenue.values()) {
    for (const v of grid) {
      max = Math.max(max, v);
    }
  }
  for (const venue of venues) {
    if (toggles[venue] === false) {
      continue;
    }
    const grid = byVenue.get(venue);
    if (!grid) {
      continue;
    }
    ctx.fillStyle = colorFor(venue, venues);
    for (let iy = 0; iy < resolution; iy += 1) {
      for (let ix = 0; ix < resolution; ix += 1) {
        const value = grid[iy * resolution + ix];
        if (value <= 0) {
          continue;
        }
        ctx.globalAlpha = 0.15 + 0.6 * (value / max);
        ctx.fillRect(ix * cellW, (resolution - 1 - iy) * cellH, cellW, cellH);
      }
    }
  }
  ctx.globalAlpha = 1;
  return count;
}
