"""Gaussian-kernel density grids over a shared bounding box.

Every venue is rendered on the pooled bounding box with a shared bandwidth,
so the per-venue grids are directly comparable and sum to the pooled grid.
"""

import numpy as np


def pooled_bounds(points: np.ndarray) -> tuple[float, float, float, float]:
    """(xmin, xmax, ymin, ymax) over all points, zero-extent axes expanded."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.size == 0:
        raise ValueError("no points")
    xmin, ymin = pts.min(axis=0)
    xmax, ymax = pts.max(axis=0)
    if xmax > xmin and ymax <= ymin:
        ymin, ymax = ymin - 0.5, ymax + 0.5
    elif ymax > ymin and xmax <= xmin:
        xmin, xmax = xmin - 0.5, xmax + 0.5
    return float(xmin), float(xmax), float(ymin), float(ymax)


def scott_bandwidth(points: np.ndarray) -> float:
    """Scott's rule for 2-D data with a mean-sigma scalar bandwidth."""
    pts = np.asarray(points, dtype=np.float64)
    n = len(pts)
    sigma = float(pts.std(axis=0).mean())
    if sigma <= 0 or n < 2:
        return 1.0
    return sigma * n ** (-1.0 / 6.0)


def density_grid(points, resolution: int, bounds: tuple[float, float, float, float],
                 bandwidth: float) -> np.ndarray:
    """Kernel mass per grid cell; grid[iy, ix] with cell centers on the bounds.

    Contributions are exp(-d^2 / (2 h^2)) / (2 pi h^2), summed per point, so
    grids are additive across point subsets. All points identical (degenerate
    bounds) put the whole mass in the single center cell.
    """
    if resolution < 1:
        raise ValueError("resolution must be >= 1")
    if bandwidth <= 0:
        raise ValueError("bandwidth must be positive")
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    grid = np.zeros((resolution, resolution))
    if len(pts) == 0:
        return grid
    xmin, xmax, ymin, ymax = bounds
    if xmax <= xmin and ymax <= ymin:
        grid[resolution // 2, resolution // 2] = float(len(pts))
        return grid
    cx = np.linspace(xmin, xmax, resolution)
    cy = np.linspace(ymin, ymax, resolution)
    inv = 1.0 / (2.0 * bandwidth * bandwidth)
    kx = np.exp(-((cx[None, :] - pts[:, 0:1]) ** 2) * inv)   # (M, R)
    ky = np.exp(-((cy[None, :] - pts[:, 1:2]) ** 2) * inv)   # (M, R)
    grid = np.einsum("mi,mj->ij", ky, kx) / (2.0 * np.pi * bandwidth * bandwidth)
    return grid
