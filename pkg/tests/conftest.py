"""Shared fixtures: bundled designs, probe grids, the octahedron rule."""

from __future__ import annotations

import numpy as np
import pytest

from sphsolve import (
    EvaluationGrid,
    QuadratureRule,
    bundled_pointset_path,
    load_pointset,
    uniform_random_points,
)


def design_rule(t: int) -> QuadratureRule:
    """Bundled t-design with m = (t+1)^2 points and equal weights."""
    m = (t + 1) ** 2
    return load_pointset(bundled_pointset_path(f"td{t:03d}_{m:05d}.txt"),
                         weight_mode="equal", label=f"td{t}")


@pytest.fixture(scope="session")
def td10() -> QuadratureRule:
    return design_rule(10)


@pytest.fixture(scope="session")
def td20() -> QuadratureRule:
    return design_rule(20)


@pytest.fixture(scope="session")
def td40() -> QuadratureRule:
    return design_rule(40)


@pytest.fixture(scope="session")
def octahedron() -> QuadratureRule:
    pts = np.vstack([np.eye(3), -np.eye(3)])
    return QuadratureRule(points=pts, weights=np.full(6, 4.0 * np.pi / 6.0),
                          label="octahedron")


@pytest.fixture(scope="session")
def probe_grid() -> EvaluationGrid:
    # 100k uniform points; dense enough to probe mesh norms to ~1e-2.
    return uniform_random_points(100_000, seed=7)


@pytest.fixture(scope="session")
def eval_grid() -> EvaluationGrid:
    # The seeded 5000-point grid every experiment reports errors on.
    return uniform_random_points(5000, seed=2024)
