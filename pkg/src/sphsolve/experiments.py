"""Preset experiment configurations with constant exact solution phi == 1.

Each preset fixes (h, K) and the constant right-hand side f = 1 - (A 1)(x),
where A is the integral operator; f is then constant because h and K are
radial, and the equation has the known solution phi == 1:

  1: h = 1,                      K = sin(10|x-y|)
  2: h = |x-y|^-0.5,             K = cos(10|x-y|)
  3: h = log|x-y|,               K = 1
  4: h = |x-y|^-0.5 |x+y|^-0.5,  K = sin(10|x-y|)

Presets 1 and 2 carry frozen reference constants; preset 3 has the exact
value 1 - pi(4 ln 2 - 2); preset 4 is recomputed from the 1-D oracle.
recompute_f cross-validates any of them against the oracle.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .moments import SingularKernel, profile_integral
from .pointsets import QuadratureRule
from .solver import (ContinuousKernel, ProblemSpec, solve_stage1,
                     uniform_error)
from .sphere import EvaluationGrid, uniform_random_points

__all__ = ["ExperimentRecord", "EXPERIMENT_IDS", "experiment_kernels",
           "experiment_f", "recompute_f", "run_experiment",
           "DEFAULT_GRID_SIZE", "DEFAULT_GRID_SEED"]

DEFAULT_GRID_SIZE = 5000
DEFAULT_GRID_SEED = 2024

EXPERIMENT_IDS = (1, 2, 3, 4)

# Frozen reference constants for the oscillatory-K presets.  The preset 2
# value is a published reference rounded upstream; it differs from the
# oracle recomputation by ~3.4e-8 (see tests), far below the accuracy the
# preset is used to demonstrate.
_F_REFERENCE = {
    1: 1.455449001125579,
    2: 0.303738699125466,
}


@dataclass(frozen=True)
class ExperimentRecord:
    """One run: configuration echo plus the measured outcomes."""

    experiment: int
    n: int
    m: int
    eta: float
    uniform_error: float
    residual: float
    seconds: float
    condition_estimate: float
    rule_label: str
    f: float

    def csv_row(self) -> str:
        return (f"{self.experiment},{self.n},{self.m},{self.eta:.17g},"
                f"{self.uniform_error:.17g},{self.residual:.17g},"
                f"{self.seconds:.17g}")


def experiment_kernels(exp_id: int) -> tuple[SingularKernel, ContinuousKernel]:
    if exp_id == 1:
        return SingularKernel.one(), ContinuousKernel.sin_scaled(10.0)
    if exp_id == 2:
        return SingularKernel.algebraic(-0.5), ContinuousKernel.cos_scaled(10.0)
    if exp_id == 3:
        return SingularKernel.log(), ContinuousKernel.constant(1.0)
    if exp_id == 4:
        return SingularKernel.mixed(-0.5, -0.5), ContinuousKernel.sin_scaled(10.0)
    raise ValueError(f"experiment id must be one of {EXPERIMENT_IDS}, got {exp_id}")


@lru_cache(maxsize=None)
def recompute_f(exp_id: int) -> float:
    """f = 1 - 2pi int h1d(t) K1d(t) dt from the endpoint-refined oracle."""
    kernel, K = experiment_kernels(exp_id)

    def k_of_t(t):
        return K.of_distance(np.sqrt(np.maximum(2.0 * (1.0 - t), 0.0)))

    integral = profile_integral(
        lambda t: kernel.profile(t) * k_of_t(t),
        near_one=lambda u: kernel.profile_near_one(u)
        * K.of_distance(np.sqrt(2.0 * u)),
        near_minus_one=lambda u: kernel.profile_near_minus_one(u)
        * K.of_distance(np.sqrt(2.0 * (2.0 - u))),
    )
    return 1.0 - integral


def experiment_f(exp_id: int) -> float:
    """The constant right-hand side each preset runs with."""
    if exp_id in _F_REFERENCE:
        return _F_REFERENCE[exp_id]
    if exp_id == 3:
        return 1.0 - math.pi * (4.0 * math.log(2.0) - 2.0)
    return recompute_f(exp_id)


def run_experiment(exp_id: int, n: int, rule: QuadratureRule,
                   grid: EvaluationGrid | None = None) -> ExperimentRecord:
    """Full pipeline for one preset: solve, evaluate, compare against phi == 1."""
    kernel, K = experiment_kernels(exp_id)
    f = experiment_f(exp_id)
    if grid is None:
        grid = uniform_random_points(DEFAULT_GRID_SIZE, seed=DEFAULT_GRID_SEED)
    start = time.perf_counter()
    spec = ProblemSpec(kernel=kernel, K=K, f=f, n=n, rule=rule)
    sol = solve_stage1(spec)
    err = uniform_error(sol, 1.0, grid)
    seconds = time.perf_counter() - start
    return ExperimentRecord(experiment=exp_id, n=n, m=rule.m,
                            eta=sol.gamma[2], uniform_error=err,
                            residual=sol.residual, seconds=seconds,
                            condition_estimate=sol.condition_estimate,
                            rule_label=rule.label, f=f)
