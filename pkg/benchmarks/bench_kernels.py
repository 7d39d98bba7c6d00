"""Timing comparison of the jitted hot kernels against the numpy fallback.

Run from the repository root:

    python3 benchmarks/bench_kernels.py [--sizes small|large]

Both implementations are importable side by side regardless of the
SPHSOLVE_BACKEND value, so one process benchmarks both.  The jitted
functions are warmed once before timing so compilation never pollutes
the numbers.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from sphsolve import _kernels
from sphsolve.sphere import uniform_random_points


def best_of(fn, repeats: int = 5) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def format_row(name: str, shape: str, t_numpy: float,
               t_numba: float | None) -> str:
    if t_numba is None:
        return f"{name:24s} {shape:>18s} {t_numpy * 1e3:10.2f} {'-':>10s} {'-':>8s}"
    return (f"{name:24s} {shape:>18s} {t_numpy * 1e3:10.2f} "
            f"{t_numba * 1e3:10.2f} {t_numpy / t_numba:7.1f}x")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", choices=("small", "large"),
                        default="large")
    args = parser.parse_args()

    if args.sizes == "large":
        m_points, n_grid, degree = 1681, 5000, 40
    else:
        m_points, n_grid, degree = 441, 1000, 20

    rng = np.random.default_rng(0)
    pts = uniform_random_points(m_points, seed=1).points
    grid = uniform_random_points(n_grid, seed=2).points
    dots = np.clip(grid @ pts.T, -1.0, 1.0)
    coeffs = rng.standard_normal(degree + 1)
    w = np.full(m_points, 4.0 * np.pi / m_points)

    have = _kernels.HAVE_NUMBA
    print(f"backend available: numba={'yes' if have else 'no'}  "
          f"(dispatch now: {_kernels.BACKEND})")
    print(f"{'kernel':24s} {'shape':>18s} {'numpy ms':>10s} "
          f"{'numba ms':>10s} {'speedup':>8s}")

    cases = [
        ("zonal_sum",
         f"({n_grid}, {m_points}) l<={degree}",
         lambda: _kernels.zonal_sum_numpy(coeffs, dots),
         (lambda: _kernels.zonal_sum_numba(coeffs, dots)) if have else None),
        ("basis_matrix",
         f"deg {degree} x {m_points}",
         lambda: _kernels.basis_matrix_numpy(degree, pts),
         (lambda: _kernels.basis_matrix_numba(degree, pts)) if have else None),
        ("product_weight_matrix",
         f"({n_grid}, {m_points}) sin",
         lambda: _kernels.product_weight_matrix_numpy(
             dots, w, coeffs, _kernels.K_SIN, 10.0),
         (lambda: _kernels.product_weight_matrix_numba(
             dots, w, coeffs, _kernels.K_SIN, 10.0)) if have else None),
    ]

    for name, shape, numpy_fn, numba_fn in cases:
        if numba_fn is not None:
            numba_fn()  # warm the jit cache
            a, b = numpy_fn(), numba_fn()
            assert np.max(np.abs(a - b)) <= 1e-12 * (1.0 + np.max(np.abs(a)))
        t_np = best_of(numpy_fn)
        t_nb = best_of(numba_fn) if numba_fn is not None else None
        print(format_row(name, shape, t_np, t_nb))


if __name__ == "__main__":
    main()
