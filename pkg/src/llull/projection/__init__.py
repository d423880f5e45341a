"""Corpus projection: TF-IDF vectors, joint t-SNE embedding, density heatmaps.

Idea texts from all venues are pooled into one TF-IDF space and embedded
jointly, so the per-venue panels share one coordinate system and one color
scale.
"""

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .density import density_grid, pooled_bounds, scott_bandwidth
from .export import export, heatmap_svg, points_to_csv
from .tfidf import TfidfVectorizer
from .tsne import TSNE

__all__ = [
    "DocVector", "EmbeddedPoint", "TfidfVectorizer", "TSNE",
    "tfidf", "tsne", "density_grid", "pooled_bounds", "scott_bandwidth",
    "export", "heatmap_svg", "points_to_csv", "run_projection",
]


@dataclass(frozen=True)
class DocVector:
    idea_ref: str
    venue: str
    weights: dict  # term id -> tf-idf weight


@dataclass(frozen=True)
class EmbeddedPoint:
    idea_ref: str
    venue: str
    x: float
    y: float


def tfidf(texts_by_venue: dict[str, list[str]]) -> tuple[list[DocVector], list[str]]:
    """Vectorize texts pooled across venues; returns (vectors, vocabulary)."""
    refs: list[tuple[str, str]] = []
    docs: list[str] = []
    for venue in sorted(texts_by_venue):
        for i, text in enumerate(texts_by_venue[venue]):
            refs.append((f"{venue}:{i}", venue))
            docs.append(text)
    vec = TfidfVectorizer()
    X = vec.fit_transform(docs)
    vocabulary = sorted(vec.vocabulary_, key=vec.vocabulary_.get)
    vectors = []
    for (ref, venue), row in zip(refs, X):
        nz = np.nonzero(row)[0]
        vectors.append(DocVector(idea_ref=ref, venue=venue,
                                 weights={int(j): float(row[j]) for j in nz}))
    return vectors, vocabulary


def _to_matrix(vectors: list[DocVector], n_terms: int) -> np.ndarray:
    X = np.zeros((len(vectors), n_terms))
    for i, v in enumerate(vectors):
        for j, w in v.weights.items():
            X[i, j] = w
    return X


def tsne(vectors: list[DocVector], n_terms: int, perplexity: float = 30.0,
         iterations: int = 1000, seed: int = 0) -> list[EmbeddedPoint]:
    """Embed doc vectors into 2-D; deterministic per seed."""
    model = TSNE(perplexity=perplexity, n_iter=iterations, seed=seed)
    Y = model.fit_transform(_to_matrix(vectors, n_terms))
    return [EmbeddedPoint(idea_ref=v.idea_ref, venue=v.venue,
                          x=float(y[0]), y=float(y[1]))
            for v, y in zip(vectors, Y)]


def run_projection(texts_by_venue: dict[str, list[str]], out_dir,
                   perplexity: float = 30.0, iterations: int = 1000, seed: int = 0,
                   resolution: int = 64, bandwidth: float | None = None) -> dict[str, Path]:
    """Full projection pipeline: vectorize, embed, grid per venue, export."""
    vectors, vocabulary = tfidf(texts_by_venue)
    points = tsne(vectors, len(vocabulary), perplexity=perplexity,
                  iterations=iterations, seed=seed)
    coords = np.array([[p.x, p.y] for p in points])
    bounds = pooled_bounds(coords)
    h = bandwidth if bandwidth is not None else scott_bandwidth(coords)
    grids = {}
    for venue in sorted(texts_by_venue):
        venue_pts = np.array([[p.x, p.y] for p in points if p.venue == venue]).reshape(-1, 2)
        grids[venue] = density_grid(venue_pts, resolution, bounds, h)
    params = {
        "perplexity": perplexity,
        "iterations": iterations,
        "seed": seed,
        "resolution": resolution,
        "bandwidth": h,
    }
    return export(points, grids, out_dir, params)
