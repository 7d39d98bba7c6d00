"""Geometry of the unit sphere: points, distances, sampling, mesh norm.

Points are unit vectors stored as float64 numpy arrays, shape (3,) for a
single point or (m, 3) for a batch.  All functions are pure.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "UNIT_NORM_TOL",
    "EvaluationGrid",
    "sphere_point",
    "as_unit_vectors",
    "euclidean_distance",
    "geodesic_distance",
    "uniform_random_points",
    "mesh_norm",
]

UNIT_NORM_TOL = 1e-12


def sphere_point(coords) -> np.ndarray:
    """Validate and normalize a single point on the sphere.

    Accepts any 3-vector whose norm is within 1e-12 of 1 and returns it
    normalized exactly.  Rejects everything else.
    """
    v = np.asarray(coords, dtype=np.float64)
    if v.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {v.shape}")
    r = float(np.linalg.norm(v))
    if abs(r - 1.0) > UNIT_NORM_TOL:
        raise ValueError(f"not a unit vector: |coords| = {r!r}")
    return v / r


def as_unit_vectors(points) -> np.ndarray:
    """Coerce an (m, 3) array to float64 and check every row is unit length."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[None, :]
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValueError(f"expected (m, 3) points, got shape {pts.shape}")
    norms = np.linalg.norm(pts, axis=1)
    bad = np.abs(norms - 1.0) > UNIT_NORM_TOL
    if np.any(bad):
        j = int(np.argmax(bad))
        raise ValueError(f"row {j} is not a unit vector: |x| = {norms[j]!r}")
    return pts / norms[:, None]


@dataclass(frozen=True)
class EvaluationGrid:
    """A batch of unit vectors used as evaluation targets, with its seed."""

    points: np.ndarray
    seed: int

    def __post_init__(self):
        pts = as_unit_vectors(self.points)
        if pts.shape[0] == 0:
            raise ValueError("evaluation grid must contain at least one point")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.shape[0]


def _clamped_dot(x, y):
    d = np.sum(np.asarray(x, dtype=np.float64) * np.asarray(y, dtype=np.float64),
               axis=-1)
    return np.clip(d, -1.0, 1.0)


def euclidean_distance(x, y):
    """|x - y| = sqrt(2 (1 - x.y)) for unit vectors, broadcast over batches.

    The radicand is clamped at 0 so round-off near coincident points can
    never produce a NaN.
    """
    d = _clamped_dot(x, y)
    return np.sqrt(np.maximum(2.0 * (1.0 - d), 0.0))


def geodesic_distance(x, y):
    """Great-circle distance arccos(x.y) in radians, in [0, pi]."""
    return np.arccos(_clamped_dot(x, y))


def uniform_random_points(m: int, seed: int) -> EvaluationGrid:
    """m independent uniform points on the sphere, reproducible from seed.

    Standard Gaussian draws normalized to unit length; exact in
    distribution, bit-identical for a fixed seed.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    rng = np.random.default_rng(seed)
    v = rng.standard_normal((m, 3))
    norms = np.linalg.norm(v, axis=1)
    while np.any(norms == 0.0):  # pragma: no cover - probability zero
        bad = norms == 0.0
        v[bad] = rng.standard_normal((int(bad.sum()), 3))
        norms = np.linalg.norm(v, axis=1)
    return EvaluationGrid(points=v / norms[:, None], seed=seed)


def mesh_norm(points, probe: EvaluationGrid, chunk: int = 4096) -> float:
    """Geodesic radius of the largest hole of a point set, probed densely.

    Returns max over probe points of the geodesic distance to the nearest
    point of the set.  A lower bound on the true mesh norm that converges
    from below as the probe refines; a probe of >= 100x the set size is
    recommended.
    """
    pts = as_unit_vectors(points)
    if pts.shape[0] == 0:
        raise ValueError("mesh_norm of an empty point set is undefined")
    grid = probe.points
    worst = -1.0
    for start in range(0, grid.shape[0], chunk):
        block = grid[start:start + chunk]
        dots = np.clip(block @ pts.T, -1.0, 1.0)
        nearest = np.max(dots, axis=1)  # largest dot = smallest angle
        worst = max(worst, float(np.arccos(np.min(nearest))))
    return worst
