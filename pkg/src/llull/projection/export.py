"""Projection artifacts: coordinate CSV, per-venue SVG heatmaps, manifest.

All writers format deterministically so re-exporting the same data produces
byte-identical files.
"""

import json
from pathlib import Path

import numpy as np

CANVAS = 512
# white -> deep blue two-stop ramp
_LOW = (255, 255, 255)
_HIGH = (11, 61, 145)


def _slug(name: str) -> str:
    return "".join(c if c.isalnum() else "-" for c in name)


def _color(value: float, vmax: float) -> str:
    t = 0.0 if vmax <= 0 else min(max(value / vmax, 0.0), 1.0)
    rgb = [round(lo + (hi - lo) * t) for lo, hi in zip(_LOW, _HIGH)]
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def points_to_csv(points) -> str:
    """points: iterable of (idea_ref, venue, x, y) or EmbeddedPoint."""
    lines = ["idea_ref,venue,x,y"]
    for p in points:
        if hasattr(p, "idea_ref"):
            ref, venue, x, y = p.idea_ref, p.venue, p.x, p.y
        else:
            ref, venue, x, y = p
        lines.append(f"{ref},{venue},{x!r},{y!r}")
    return "\n".join(lines) + "\n"


def heatmap_svg(grid: np.ndarray, venue: str, vmax: float) -> str:
    res = grid.shape[0]
    cell = CANVAS / res
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{CANVAS}" height="{CANVAS}" '
        f'viewBox="0 0 {CANVAS} {CANVAS}">',
        f"<desc>venue={venue} resolution={res} scale_max={vmax:.9f}</desc>",
    ]
    for iy in range(res):
        for ix in range(res):
            x = ix * cell
            y = (res - 1 - iy) * cell  # grid rows grow upward, SVG y grows down
            parts.append(
                f'<rect x="{x:.2f}" y="{y:.2f}" width="{cell:.2f}" height="{cell:.2f}" '
                f'fill="{_color(float(grid[iy, ix]), vmax)}"/>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def export(points, grids: dict[str, np.ndarray], out_dir, params: dict) -> dict[str, Path]:
    """Write projection.csv, one heatmap per venue, and a parameter manifest."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: dict[str, Path] = {}

    csv_path = out_dir / "projection.csv"
    csv_path.write_text(points_to_csv(points), encoding="utf-8")
    written["csv"] = csv_path

    vmax = max((float(g.max()) for g in grids.values()), default=0.0)
    for venue in sorted(grids):
        svg_path = out_dir / f"heatmap_{_slug(venue)}.svg"
        svg_path.write_text(heatmap_svg(grids[venue], venue, vmax), encoding="utf-8")
        written[f"heatmap:{venue}"] = svg_path

    manifest = dict(params)
    manifest["scale_max"] = vmax
    manifest["venues"] = sorted(grids)
    manifest_path = out_dir / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                             encoding="utf-8")
    written["manifest"] = manifest_path
    return written
